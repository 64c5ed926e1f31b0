"""Finitely represented strategies and their synthesis from solver traces.

A PFM strategy reads only the last state through finitely many regular
guards; a counting strategy mixes an urgent and a fallback PFM strategy with
weight p_k = 2^(-1/2^k) after k completed rounds, so the urgent component is
always live yet cannot be played forever (the products converge to 1/4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from . import regset, zerosum
from .arena import JointName, TwoPlayerGame
from .regset import RegularSet, Word
from .zerosum import ASTrace, NZTrace, Region, RestrictedArena, as_board


class StrategyError(RuntimeError):
    pass


@lru_cache(maxsize=None)
def schedule_weight(k: int, bits: int = 192) -> Fraction:
    """p_k = 2^(-1/2^k) as an exact-precision rational approximation
    (iterated integer square roots of 1/2); p_0 is exactly 1/2."""
    if k < 0:
        raise StrategyError("round index must be ≥ 0")
    num, den = 1, 2
    scale = 1 << bits
    for _ in range(k):
        num, den = math.isqrt((num * scale * scale) // den), scale
    return Fraction(num, den)


@dataclass
class Cell:
    name: str
    guard: RegularSet
    dist: Optional[dict[JointName, Fraction]]   # None = uniform over allowed
    clip_to_allowed: bool = False               # renormalize over allowed support


class PFMStrategy:
    """First matching cell decides; a default cell (uniform over allowed
    actions) is always present."""

    def __init__(self, game: TwoPlayerGame, player: int, cells: Sequence[Cell],
                 name: str = "pfm"):
        self.game = game
        self.player = player
        self.cells = list(cells)
        self.name = name

    def dist_at(self, state: Word) -> dict[JointName, Fraction]:
        allowed = self.game.allowed_actions(state, self.player)
        if not allowed:
            raise StrategyError(f"no allowed action at {' '.join(state)}")
        for cell in self.cells:
            if not cell.guard.contains(state):
                continue
            if cell.dist is None:
                return {a: Fraction(1, len(allowed)) for a in allowed}
            if cell.clip_to_allowed:
                kept = {a: p for a, p in cell.dist.items()
                        if a in allowed and p > 0}
                total = sum(kept.values())
                if total > 0:
                    return {a: p / total for a, p in kept.items()}
                return {a: Fraction(1, len(allowed)) for a in allowed}
            bad = [a for a, p in cell.dist.items() if p > 0 and a not in allowed]
            if bad:
                raise StrategyError(
                    f"cell {cell.name!r} proposes disallowed {bad[0]!r} at "
                    f"{' '.join(state)}")
            return dict(cell.dist)
        return {a: Fraction(1, len(allowed)) for a in allowed}

    def query(self, history: Sequence[Word]) -> dict[JointName, Fraction]:
        if not history:
            raise StrategyError("history must be non-empty")
        return self.dist_at(tuple(history[-1]))


class CountingStrategy:
    """p_k-weighted mix of an urgent and a fallback PFM strategy; k counts
    completed rounds (k = 0 at the initial state)."""

    def __init__(self, game: TwoPlayerGame, player: int,
                 urgent: PFMStrategy, fallback: PFMStrategy, name: str = "counting"):
        self.game = game
        self.player = player
        self.urgent = urgent
        self.fallback = fallback
        self.name = name

    def query(self, history: Sequence[Word]) -> dict[JointName, Fraction]:
        if not history:
            raise StrategyError("history must be non-empty")
        k = len(history) - 1
        p = schedule_weight(k)
        u = self.urgent.query(history)
        v = self.fallback.query(history)
        out: dict[JointName, Fraction] = {}
        for a, w in u.items():
            out[a] = out.get(a, Fraction(0)) + p * w
        for a, w in v.items():
            out[a] = out.get(a, Fraction(0)) + (1 - p) * w
        return out


Strategy = object   # PFMStrategy | CountingStrategy


class UniformStrategy(PFMStrategy):
    """Uniform over allowed actions everywhere."""

    def __init__(self, game: TwoPlayerGame, player: int, name: str = "uniform"):
        super().__init__(game, player, [], name=name)


# -- synthesis ------------------------------------------------------------------


def _subsets_by_size(actions: Sequence[JointName]):
    import itertools
    for size in range(1, len(actions) + 1):
        for combo in itertools.combinations(sorted(actions), size):
            yield combo


def synth_nz_reach(region_or_trace) -> PFMStrategy:
    """Cells keyed by the fixpoint difference layers; each plays the uniform
    distribution over a minimal action set that keeps, against every opposing
    action, positive one-step probability into the previous layer."""
    trace: NZTrace = region_or_trace.trace if isinstance(region_or_trace, Region) \
        else region_or_trace
    board = trace.board
    game = board.game
    player = trace.player
    cells: list[Cell] = []
    for j in range(1, len(trace.layers)):
        remaining = regset.difference(trace.layers[j], trace.layers[j - 1])
        for subset in _subsets_by_size(game.acts[player]):
            if remaining.is_empty():
                break
            covered = zerosum.pre(board, player, trace.layers[j - 1],
                                  action_subset=subset)
            part = regset.intersection(remaining, covered)
            if part.is_empty():
                continue
            dist = {a: Fraction(1, len(subset)) for a in subset}
            cells.append(Cell(f"layer{j}-{'+'.join('.'.join(a) for a in subset)}",
                              part, dist))
            remaining = regset.difference(remaining, part)
        if not remaining.is_empty():
            raise StrategyError("difference layer not covered by any support")
    return PFMStrategy(game, player, cells, name="nz-reach")


def _expand_restriction_cells(game, regions: dict[JointName, RegularSet],
                              label: str) -> list[Cell]:
    """Cells with fixed uniform distributions over each distinct restricted
    action set (guards partition by the exact set of permitted actions)."""
    import itertools
    acts = sorted(regions)
    cells = []
    for size in range(len(acts), 0, -1):
        for combo in itertools.combinations(acts, size):
            guard = None
            for a in acts:
                part = regions[a] if a in combo else regset.complement(regions[a])
                guard = part if guard is None else regset.intersection(guard, part)
            if guard is None or guard.is_empty():
                continue
            dist = {a: Fraction(1, len(combo)) for a in combo}
            cells.append(Cell(f"{label}-{'+'.join('.'.join(a) for a in combo)}",
                              guard, dist))
    return cells


def synth_as_reach(region: Region) -> PFMStrategy:
    """Uniform over the final Stay-restricted action sets on the winning
    region; guards are projected back through the lift (before the target is
    hit the monitor agrees with the entry bits; afterwards anything goes)."""
    trace: ASTrace = region.trace
    board = trace.final_board
    game = board.game
    player = trace.player
    regions = board.regions or {a: game.allowed_region(player, a)
                                for a in game.acts[player]}
    lifted_cells = _expand_restriction_cells(game, regions, "stay")
    projected = []
    base = trace.lifted.base_game() if trace.lifted is not None else game
    for cell in lifted_cells:
        guard = cell.guard
        if trace.lifted is not None:
            guard = trace.lifted.project_entry(guard)
        if guard.is_empty():
            continue
        projected.append(Cell(cell.name, guard, cell.dist))
    return PFMStrategy(base, player, projected, name="as-reach")


def _sure_keep_count(board: RestrictedArena, opp_player: int, beta: JointName,
                     block: RegularSet) -> int:
    """How many solver responses does `beta` surely confine to `block`
    (no positive-probability one-step escape)?"""
    game = board.game
    solver = 2 if opp_player == 1 else 1
    escape = zerosum._successor_channel_sets(board, regset.complement(block))
    if not regset.is_subset(block, game.allowed_region(opp_player, beta)):
        return -1
    count = 0
    for alpha in game.acts[solver]:
        a1, a2 = (alpha, beta) if solver == 1 else (beta, alpha)
        term = zerosum._reach_term(board, a1, a2, escape)
        if regset.intersection(block, term).is_empty():
            count += 1
    return count


def synth_spoiler(region: Region) -> CountingStrategy:
    """Counting spoiler for the opponent of an almost-sure reachability
    region, derived from the iteration trace: slices confinable by the
    opponent get their escape-blocking action as the urgent component
    (fallback uniform over the rest); the remaining slices get, per location
    block, the action that surely preserves the block against the most solver
    responses, or the uniform fallback when none exists."""
    trace: ASTrace = region.trace
    if not trace.iterations:
        raise StrategyError("empty trace")
    game = trace.iterations[0].board.game
    player = trace.player
    opp = 2 if player == 1 else 1
    top = trace.iterations[0].board.universe()
    complement_final = regset.complement(
        trace.iterations[-1].next_region)
    if complement_final.is_empty():
        raise StrategyError("the region is everything; nothing to spoil")

    urgent_cells: list[Cell] = []
    fallback_cells: list[Cell] = []
    d_prev = top
    consistent = trace.lifted.stable_region() if trace.lifted is not None else top
    for it in trace.iterations:
        board = it.board
        y = it.positive.layers[-1]
        slice1 = regset.intersection(regset.difference(d_prev, y), it.confinement)
        slice1 = regset.intersection(slice1, consistent)
        if not slice1.is_empty():
            stay_opp = zerosum.stay(board, opp, it.confinement)
            remaining = slice1
            for beta in sorted(game.acts[opp]):
                part = regset.intersection(remaining, stay_opp[beta])
                if part.is_empty():
                    continue
                _add_counting_cells(game, opp, urgent_cells, fallback_cells,
                                    part, beta, trace, f"confine-{'.'.join(beta)}")
                remaining = regset.difference(remaining, part)
            if not remaining.is_empty():
                _add_uniform_cells(urgent_cells, fallback_cells, remaining,
                                   trace, "confine-rest")
        slice2 = regset.intersection(regset.difference(y, it.next_region), d_prev)
        slice2 = regset.intersection(regset.difference(slice2, slice1), consistent)
        if not slice2.is_empty():
            for loc in game.locations():
                block = regset.intersection(
                    slice2, RegularSet.state(game.alphabet, loc,
                                             RegularSet.universe(game.alphabet,
                                                                 "channel")))
                if block.is_empty():
                    continue
                best, best_count = None, 0
                for beta in sorted(game.acts[opp]):
                    c = _sure_keep_count(board, opp, beta, block)
                    if c > best_count:
                        best, best_count = beta, c
                if best is None:
                    _add_uniform_cells(urgent_cells, fallback_cells, block,
                                       trace, f"drift-{loc}")
                else:
                    _add_counting_cells(game, opp, urgent_cells, fallback_cells,
                                        block, best, trace,
                                        f"stall-{loc}-{'.'.join(best)}")
        d_prev = it.next_region

    base = trace.lifted.base_game() if trace.lifted is not None else game
    urgent = PFMStrategy(base, opp, urgent_cells, name="spoiler-urgent")
    fallback = PFMStrategy(base, opp, fallback_cells, name="spoiler-fallback")
    return CountingStrategy(base, opp, urgent, fallback, name="spoiler")


def _project_guard(trace: ASTrace, guard: RegularSet) -> RegularSet:
    return trace.lifted.project_entry(guard) if trace.lifted is not None else guard


def _add_counting_cells(game, opp, urgent_cells, fallback_cells, guard, beta,
                        trace, label):
    pguard = _project_guard(trace, guard)
    if pguard.is_empty():
        return
    urgent_cells.append(Cell(label, pguard, {beta: Fraction(1)}))
    others = [a for a in game.acts[opp] if a != beta]
    if others:
        dist = {a: Fraction(1, len(others)) for a in others}
        fallback_cells.append(Cell(label, pguard, dist, clip_to_allowed=True))
    else:
        fallback_cells.append(Cell(label, pguard, None))


def _add_uniform_cells(urgent_cells, fallback_cells, guard, trace, label):
    pguard = _project_guard(trace, guard)
    if pguard.is_empty():
        return
    urgent_cells.append(Cell(label, pguard, None))
    fallback_cells.append(Cell(label, pguard, None))


def random_pfm(game: TwoPlayerGame, player: int, rng, n_guards: int = 4,
               name: str = "random") -> PFMStrategy:
    """Random opposing strategy: uniformly drawn weights over four random
    regular guards (weights renormalized over the allowed actions)."""
    al = game.alphabet
    msgs = al.messages
    cells = []
    for i in range(n_guards):
        loc = rng.choice(al.locations)
        shape = rng.randrange(3)
        if shape == 0:
            chan = regset.from_regex(al, "M*", "channel")
        elif shape == 1:
            chan = regset.from_regex(al, f"M* {rng.choice(msgs)}", "channel")
        else:
            word = tuple(rng.choice(msgs)
                         for _ in range(rng.randint(0, 2)))
            chan = regset.up_closure_subword(
                RegularSet.from_words(al, "channel", [word]))
        guard = RegularSet.state(al, loc, chan)
        weights = {a: Fraction(rng.randint(1, 6)) for a in game.acts[player]
                   if rng.random() < 0.8}
        if not weights:
            weights = {rng.choice(game.acts[player]): Fraction(1)}
        total = sum(weights.values())
        dist = {a: w / total for a, w in weights.items()}
        cells.append(Cell(f"{name}-{i}", guard, dist, clip_to_allowed=True))
    return PFMStrategy(game, player, cells, name=name)


# -- serialization / DOT ----------------------------------------------------------


def strategy_summary(strategy) -> dict:
    if isinstance(strategy, CountingStrategy):
        return {"kind": "counting",
                "urgent": strategy_summary(strategy.urgent),
                "fallback": strategy_summary(strategy.fallback)}
    cells = []
    for c in strategy.cells:
        cells.append({
            "name": c.name,
            "guard": c.guard.digest()[:12],
            "dist": None if c.dist is None else
                    {"+".join(a): str(p) for a, p in c.dist.items()},
        })
    return {"kind": "pfm", "player": strategy.player, "cells": cells,
            "default": "uniform-over-allowed"}


def strategy_to_dot(strategy, name: str = "strategy") -> str:
    summary = strategy_summary(strategy)
    lines = [f"digraph {name} {{", "  node [shape=box];"]
    def emit(s, prefix):
        if s["kind"] == "counting":
            lines.append(f'  "{prefix}" [label="counting p_k mix"];')
            emit(s["urgent"], prefix + "/urgent")
            emit(s["fallback"], prefix + "/fallback")
            lines.append(f'  "{prefix}" -> "{prefix}/urgent" [label="p_k"];')
            lines.append(f'  "{prefix}" -> "{prefix}/fallback" [label="1-p_k"];')
        else:
            for i, c in enumerate(s["cells"]):
                d = c["dist"] or "U(allowed)"
                lines.append(f'  "{prefix}/{i}" [label="{c["name"]}\\n{d}"];')
                if i:
                    lines.append(f'  "{prefix}/{i-1}" -> "{prefix}/{i}" '
                                 f'[label="else"];')
    emit(summary, name)
    lines.append("}")
    return "\n".join(lines)

"""Conjunctions of qualitative objectives.

Pipeline: positive-safety conjuncts are first traded for positive
reachability of "still winnable and every reach target already visited";
safety conjuncts restrict the arena through Stay; reach targets get one
latching bit each and are solved as almost-sure reachability of the all-bits
region; repeated-reachability targets (one-player queries only, beyond a
single-target two-player query) fold into one via a modular counter; the
remaining positive-reachability conjuncts are intersected on the final
restricted arena.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from . import regset, zerosum
from .arena import LiftedGame, Monitor, TwoPlayerGame, make_absorbing
from .regset import RegularSet
from .zerosum import Region, RestrictedArena, as_board


class FragmentError(ValueError):
    """Objective outside the decidable fragment this tool solves."""


PATHS = ("F", "G", "GF")          # eventually, always, repeatedly


@dataclass(frozen=True)
class Objective:
    quant: str                     # AS | NZ
    path: str                      # F | G | GF
    region: RegularSet
    label: str = ""
    after_reach: bool = False      # NZ(F) produced by NZ(G)-elimination:
                                   # target also requires all reach bits set
    stay_inside: Optional[RegularSet] = None
                                   # ... and that this set was never left
                                   # before the switch point

    def __post_init__(self):
        if self.quant not in ("AS", "NZ") or self.path not in PATHS:
            raise FragmentError(f"bad objective {self.quant}({self.path})")

    def negate(self) -> "Objective":
        quant = "NZ" if self.quant == "AS" else "AS"
        if self.path == "GF":
            raise FragmentError(
                "negating a repeated-reachability objective needs NZ(◇□), "
                "which is outside the solvable fragment")
        path = "G" if self.path == "F" else "F"
        return Objective(quant, path, regset.complement(self.region),
                         label=f"not({self.label})" if self.label else "")

    def key(self):
        return (self.quant, self.path, self.after_reach,
                self.stay_inside.digest() if self.stay_inside is not None else None,
                self.region.digest())

    def describe(self) -> str:
        return self.label or f"{self.quant}({self.path} ...)"


@dataclass
class Conjunction:
    items: list[Objective]

    def __post_init__(self):
        if not self.items:
            raise FragmentError("empty conjunction")

    def check_fragment(self, one_player: bool):
        buchi = [o for o in self.items if o.path == "GF"]
        for o in buchi:
            if o.quant != "AS":
                raise FragmentError("NZ(□◇) is outside the solvable fragment")
        if buchi and not one_player:
            if len(self.items) > 1:
                raise FragmentError(
                    "repeated-reachability conjuncts are only solvable alone "
                    "in two-player queries, or in one-player queries")

    def describe(self) -> str:
        return " & ".join(o.describe() for o in self.items)


def is_one_player(game: TwoPlayerGame) -> bool:
    return len(game.acts[2]) <= 1


# -- NZ(□) elimination ---------------------------------------------------------


def eliminate_nz_box(conj: Conjunction, game_or_board, player: int) -> Conjunction:
    """Replace each NZ(□ X) by NZ(◇ X′): X′ = the NZ(□ X) winning region,
    to be intersected once the latching bits exist with "every reach target
    already visited" and "X never left so far" (a positive branch that waits
    for the reach objectives inside X and then plays the positive-safety
    witness stays in X throughout)."""
    board = as_board(game_or_board)
    if not any(o.quant == "NZ" and o.path == "G" for o in conj.items):
        raise FragmentError("no NZ(always) conjunct to eliminate")
    out = []
    for o in conj.items:
        if o.quant == "NZ" and o.path == "G":
            winnable = zerosum.nz_safe(board, player, o.region).winning
            out.append(Objective("NZ", "F", winnable,
                                 label=f"elim({o.describe()})",
                                 after_reach=True, stay_inside=o.region))
        else:
            out.append(o)
    return Conjunction(out)


# -- degeneralization ------------------------------------------------------------


def buchi_degeneralize(game: TwoPlayerGame, targets: Sequence[RegularSet]
                       ) -> tuple[TwoPlayerGame, RegularSet]:
    """Fold visiting every target infinitely often into one target via a
    modular counter (state k marks the wrap; a path hits the wrap states
    infinitely often iff it hits every target infinitely often)."""
    targets = list(targets)
    if not targets:
        raise FragmentError("need at least one repeated-reachability target")
    if len(targets) == 1:
        return game, targets[0]
    lifted = LiftedGame(game, Monitor.cyclic_counter(targets), label="counter")
    return lifted, lifted.monitor_region(lambda q: q == len(targets))


# -- the solver --------------------------------------------------------------------


@dataclass
class PipelineTrace:
    steps: list[tuple[str, object]] = field(default_factory=list)

    def add(self, name: str, payload: object = None):
        self.steps.append((name, payload))


def solve_conjunction(game_or_board, player: int, conj: Conjunction) -> Region:
    board = as_board(game_or_board)
    game = board.game
    one_player = is_one_player(game) if player == 1 else len(game.acts[1]) <= 1
    conj.check_fragment(one_player)
    trace = PipelineTrace()

    items = list(dict((o.key(), o) for o in conj.items).values())  # dedup

    # lone two-player Büchi query goes straight to the iterated-restriction solver
    buchi = [o for o in items if o.path == "GF"]
    if buchi and len(items) == 1 and not one_player:
        return zerosum.as_buchi(board, player, buchi[0].region)

    if any(o.quant == "NZ" and o.path == "G" for o in items):
        items = eliminate_nz_box(Conjunction(items), board, player).items
        trace.add("eliminate-nz-box")

    as_box = [o for o in items if o.quant == "AS" and o.path == "G"]
    as_reach = [o for o in items if o.quant == "AS" and o.path == "F"]
    nz_reach = [o for o in items if o.quant == "NZ" and o.path == "F"]
    buchi = [o for o in items if o.path == "GF"]

    lifts: list[LiftedGame] = []

    def lift_up(region: RegularSet, from_level: int = 0) -> RegularSet:
        for lg in lifts[from_level:]:
            region = lg.lift_set(region)
        return region

    def project_down(region: RegularSet) -> RegularSet:
        for lg in reversed(lifts):
            region = lg.project_entry(region)
        return region

    components: list[RegularSet] = []          # at the current top level

    # safety restriction
    safe_target = board.universe()
    for o in as_box:
        safe_target = regset.intersection(safe_target, o.region)
    w_safe = zerosum.as_safe(board, player, safe_target).winning
    trace.add("safety-region", w_safe)
    cur = board
    if as_box:
        cur = cur.restrict_further(player, zerosum.stay(cur, player, w_safe))
        components.append(w_safe)

    # latching bits: one per reach target, plus one per eliminated NZ(always)
    # conjunct tracking whether its safety set was ever left
    all_bits: Optional[RegularSet] = None
    never_left: dict[int, RegularSet] = {}
    escape_sources = [(i, o.stay_inside) for i, o in enumerate(nz_reach)
                      if o.stay_inside is not None]
    if as_reach or escape_sources:
        track = [o.region for o in as_reach]
        track += [regset.complement(s) for _, s in escape_sources]
        lifted, bit_regions = make_absorbing(cur.game, track)
        lifts.append(lifted)
        regions = {a: lifted.lift_set(r) for a, r in cur.regions.items()}
        cur = RestrictedArena(lifted, cur.controller or player, regions or None)
        components = [lifted.lift_set(c) for c in components]
        for (i, _), bit in zip(escape_sources, bit_regions[len(as_reach):]):
            never_left[i] = regset.complement(bit)
        if as_reach:
            all_bits = cur.universe()
            for br in bit_regions[:len(as_reach)]:
                all_bits = regset.intersection(all_bits, br)
            w_reach = zerosum.as_buchi(cur, player, all_bits).winning
            trace.add("reach-region", w_reach)
            cur = cur.restrict_further(player, zerosum.stay(cur, player, w_reach))
            components.append(w_reach)

    # repeated reachability (one-player pipelines; the lone 2.5p case returned above)
    if buchi:
        lifted_targets = [lift_up(o.region) for o in buchi]
        counter_game, counter_target = buchi_degeneralize(cur.game, lifted_targets)
        if counter_game is not cur.game:
            lifts.append(counter_game)
            regions = {a: counter_game.lift_set(r) for a, r in cur.regions.items()}
            cur = RestrictedArena(counter_game, cur.controller or player,
                                  regions or None)
            components = [counter_game.lift_set(c) for c in components]
            if all_bits is not None:
                all_bits = counter_game.lift_set(all_bits)
            never_left = {i: counter_game.lift_set(r)
                          for i, r in never_left.items()}
        w_buchi = zerosum.as_buchi(cur, player, counter_target).winning
        trace.add("buchi-region", w_buchi)
        cur = cur.restrict_further(player, zerosum.stay(cur, player, w_buchi))
        components.append(w_buchi)

    # positive reachability on the final restricted arena
    for i, o in enumerate(nz_reach):
        target = lift_up(o.region)
        if o.after_reach and all_bits is not None:
            target = regset.intersection(target, all_bits)
        if i in never_left:
            target = regset.intersection(target, never_left[i])
        w = zerosum.nz_reach(cur, player, target).winning
        trace.add(f"nz-region {o.describe()}", w)
        components.append(w)

    if not components:
        components.append(w_safe)     # pure-safety degenerate case

    final = components[0]
    for c in components[1:]:
        final = regset.intersection(final, c)
    final = regset.difference(final, cur.stuck_region(player))
    projected = project_down(final)
    trace.add("final", projected)
    return Region(projected, player, conj.describe(), trace)

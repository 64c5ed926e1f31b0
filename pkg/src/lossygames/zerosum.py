"""Symbolic two-player solvers: one-step Pre, positive reachability,
almost-sure safety via determinacy, the Stay restriction, and almost-sure
(repeated) reachability by iterated restriction.

Pre uses the mixed-action reading (for every opposing action some own action
reaches the target with positive probability); strategies are distributions,
so a player may randomize over the witnessing actions. Message losses reach
every subword, hence the plain subword closure of the target's channel
residuals; the computed Pre is nonetheless upward-closed for the state order
on every location block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import regset
from .arena import JointName, LiftedGame, TwoPlayerGame, make_absorbing
from .regset import RegularSet


def _opp(player: int) -> int:
    return 2 if player == 1 else 1


class RestrictedArena:
    """A two-player game plus per-action regions restricting one player.

    The restricted player's effective region for an action is the base
    allowed region intersected with the restriction; successive restrictions
    compose by intersection. A state where the controller's every effective
    region misses it counts as removed (the player is stuck there)."""

    def __init__(self, game: TwoPlayerGame, controller: Optional[int] = None,
                 regions: Optional[dict[JointName, RegularSet]] = None):
        self.game = game
        self.controller = controller
        self.regions = regions or {}

    def eff_region(self, player: int, action: JointName) -> RegularSet:
        base = self.game.allowed_region(player, action)
        if player == self.controller and action in self.regions:
            base = regset.intersection(base, self.regions[action])
        return base

    def restrict_further(self, player: int,
                         regions: dict[JointName, RegularSet]) -> "RestrictedArena":
        if self.controller not in (None, player):
            raise ValueError("restriction composition across players")
        merged = dict(regions)
        for act, reg in self.regions.items():
            merged[act] = regset.intersection(merged[act], reg) if act in merged else reg
        return RestrictedArena(self.game, player, merged)

    def stuck_region(self, player: int) -> RegularSet:
        al = self.game.alphabet
        having = regset.union_all(al, "state",
                                  [self.eff_region(player, a)
                                   for a in self.game.acts[player]])
        return regset.complement(having)

    def universe(self) -> RegularSet:
        return self.game.universe()


def as_board(game_or_board) -> RestrictedArena:
    if isinstance(game_or_board, RestrictedArena):
        return game_or_board
    return RestrictedArena(game_or_board)


# -- traces and regions -------------------------------------------------------


@dataclass
class NZTrace:
    algorithm: str
    player: int
    target: RegularSet
    layers: list[RegularSet]
    board: RestrictedArena

    def iterations(self) -> int:
        return len(self.layers) - 1


@dataclass
class ASIteration:
    confinement: RegularSet          # C_k (spoiler evidence only)
    positive: NZTrace                # Y_k with its own layers
    next_region: RegularSet          # D_{k+1}
    board: RestrictedArena           # arena the iteration ran on
    stay_regions: Optional[dict[JointName, RegularSet]]


@dataclass
class ASTrace:
    algorithm: str
    player: int
    target: RegularSet               # target in the (possibly lifted) game
    iterations: list[ASIteration]
    final_board: RestrictedArena
    lifted: Optional[LiftedGame]     # set when as_reach lifted the game


@dataclass
class Region:
    winning: RegularSet
    player: int
    objective: str
    trace: object

    def member(self, state) -> bool:
        return self.winning.contains(state)


# -- the Pre operator ---------------------------------------------------------


def _successor_channel_sets(board: RestrictedArena, B: RegularSet):
    """Per target location l2: the ⪯-closed channel set C(l2) with
    f(μ) ∈ C(l2) iff some loss outcome of f(μ) lands (post-relocation) in B."""
    game = board.game
    cache: dict[str, RegularSet] = {}

    def closed(l2: str) -> RegularSet:
        if l2 not in cache:
            al = game.alphabet
            parts = []
            for l_final, pat in game.relocation_patterns(l2):
                resid = regset.residual_location(B, l_final)
                parts.append(regset.intersection(resid, pat))
            chan = regset.union_all(al, "channel", parts)
            cache[l2] = regset.up_closure_subword(chan)
        return cache[l2]

    return closed


def _reach_term(board: RestrictedArena, a1: JointName, a2: JointName,
                closed) -> RegularSet:
    """States where the joint (a1, a2) has a positive-probability one-step
    transition into the target (losses included, definedness encoded)."""
    game = board.game
    al = game.alphabet
    parts = []
    for l1 in game.locations():
        for (l2, op, _p) in game.rows(l1, a1, a2):
            chan = regset.op_preimage(op, closed(l2))
            if not chan.is_empty():
                parts.append(RegularSet.state(al, l1, chan))
    return regset.union_all(al, "state", parts)


def pre(game_or_board, player: int, B: RegularSet,
        action_subset: Optional[Sequence[JointName]] = None) -> RegularSet:
    """One-step positive-probability forcing set for `player` toward B.

    `action_subset` limits the player's randomization support (used by the
    strategy synthesizer to find minimal sufficient supports)."""
    board = as_board(game_or_board)
    game = board.game
    al = game.alphabet
    if B.is_empty():
        return RegularSet.empty(al, "state")
    closed = _successor_channel_sets(board, B)
    own = tuple(action_subset) if action_subset is not None else game.acts[player]
    opp_acts = game.acts[_opp(player)]
    can_move = regset.union_all(al, "state",
                                [board.eff_region(player, a) for a in own])
    out = can_move
    for b in opp_acts:
        per_alpha = []
        for a in own:
            aa, bb = (a, b) if player == 1 else (b, a)
            term = regset.intersection(board.eff_region(player, a),
                                       _reach_term(board, aa, bb, closed))
            per_alpha.append(term)
        covered = regset.union_all(al, "state", per_alpha)
        clause = regset.union(regset.complement(board.eff_region(_opp(player), b)),
                              covered)
        out = regset.intersection(out, clause)
    return out


# -- positive reachability (least fixpoint) -----------------------------------


def nz_reach(game_or_board, player: int, target: RegularSet) -> Region:
    board = as_board(game_or_board)
    layers = [target]
    current = target
    while True:
        step = pre(board, player, current)
        new = regset.union(current, step)
        if regset.is_subset(new, current):
            break
        current = new
        layers.append(current)
    trace = NZTrace("positive-reachability", player, target, layers, board)
    return Region(current, player, "NZ(eventually)", trace)


def as_safe(game_or_board, player: int, region: RegularSet) -> Region:
    """⟦AS(□ region)⟧ via determinacy: complement of the opponent's positive
    reachability of the complement."""
    board = as_board(game_or_board)
    inner = nz_reach(board, _opp(player), regset.complement(region))
    win = regset.complement(inner.winning)
    return Region(win, player, "AS(always)", inner.trace)


# -- Stay ----------------------------------------------------------------------


def stay(game_or_board, player: int, region: RegularSet) -> dict[JointName, RegularSet]:
    """Largest per-action restriction on `region` keeping the next state in
    `region` almost surely: restriction(α) = region ∖ Bad(α), within the
    effective allowed region of α."""
    board = as_board(game_or_board)
    game = board.game
    al = game.alphabet
    escape = _successor_channel_sets(board, regset.complement(region))
    out = {}
    for a in game.acts[player]:
        bad_parts = []
        for b in game.acts[_opp(player)]:
            aa, bb = (a, b) if player == 1 else (b, a)
            bad_parts.append(_reach_term(board, aa, bb, escape))
        bad = regset.union_all(al, "state", bad_parts)
        out[a] = regset.intersection(board.eff_region(player, a),
                                     regset.difference(region, bad))
    return out


# -- almost-sure (repeated) reachability ----------------------------------------


def as_buchi(game_or_board, player: int, target: RegularSet) -> Region:
    """⟦AS(□◇ target)⟧ by iterated Stay-restriction; equals ⟦AS(◇ target)⟧
    when the target is absorbing (as_reach arranges that via the bit lift)."""
    board = as_board(game_or_board)
    D = board.universe()
    iterations: list[ASIteration] = []
    while True:
        conf = as_safe(board, _opp(player), regset.difference(D, target))
        pos = nz_reach(board, player, target)
        nxt = as_safe(board, player, pos.winning)
        d_next = regset.difference(nxt.winning, board.stuck_region(player))
        if not regset.is_subset(d_next, D):
            raise AssertionError("almost-sure region increased across iterations")
        done = regset.is_subset(D, d_next)
        stay_regions = None if done else stay(board, player, d_next)
        iterations.append(ASIteration(conf.winning, pos.trace, d_next, board,
                                      stay_regions))
        if done:
            break
        board = board.restrict_further(player, stay_regions)
        D = d_next
    trace = ASTrace("almost-sure-reachability", player, target, iterations,
                    iterations[-1].board, lifted=None)
    return Region(D, player, "AS(repeatedly)", trace)


def as_reach(game_or_board, player: int, target: RegularSet) -> Region:
    """⟦AS(◇ target)⟧: make the target absorbing with a monitor bit, solve
    repeated reachability there, then project back to original states."""
    board = as_board(game_or_board)
    lifted, (ltarget,) = make_absorbing(board.game, [target])
    lregions = {a: lifted.lift_set(r) for a, r in board.regions.items()} \
        if board.regions else None
    lboard = RestrictedArena(lifted, board.controller, lregions)
    inner = as_buchi(lboard, player, ltarget)
    inner.trace.lifted = lifted
    projected = lifted.project_entry(inner.winning)
    return Region(projected, player, "AS(eventually)", inner.trace)


def nz_safe(game_or_board, player: int, region: RegularSet) -> Region:
    """⟦NZ(□ region)⟧ = complement of the opponent's ⟦AS(◇ complement)⟧."""
    board = as_board(game_or_board)
    inner = as_reach(board, _opp(player), regset.complement(region))
    win = regset.complement(inner.winning)
    return Region(win, player, "NZ(always)", inner.trace)

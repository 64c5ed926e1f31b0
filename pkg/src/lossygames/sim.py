"""Monte Carlo execution and exact brute-force oracles.

The simulator samples the three-factor round kernel (strategies, transition
table, independent per-message losses) with a per-episode random stream, so
episode counts can change without perturbing earlier episodes. The one-step
oracle and the bounded-channel controller search are the independent checks
the symbolic solvers are validated against.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .arena import Arena, LossModel, TwoPlayerGame, subwords
from .conjunction import Conjunction
from .regset import RegularSet, Word
from .zerosum import RestrictedArena, as_board


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimConfig:
    loss: LossModel
    horizon: int
    episodes: int
    seed: int

    def __post_init__(self):
        if self.horizon < 0 or self.episodes < 1:
            raise ValueError("horizon must be ≥ 0 and episodes ≥ 1")


@dataclass
class Step:
    joint: tuple
    target_location: str
    op: str
    post_op_channel: Word
    state: Word


@dataclass
class Trace:
    states: list[Word]
    steps: list[Step]

    def visited(self, region: RegularSet) -> bool:
        return any(region.contains(s) for s in self.states)

    def always(self, region: RegularSet) -> bool:
        return all(region.contains(s) for s in self.states)

    def last_quarter_visit(self, region: RegularSet) -> bool:
        cut = (3 * len(self.states)) // 4
        return any(region.contains(s) for s in self.states[cut:])


def _episode_rng(seed: int, episode: int) -> random.Random:
    # integer stream split so episode counts can grow without perturbing
    # earlier episodes
    return random.Random((seed * 1_000_003 + episode) & 0x7FFF_FFFF_FFFF_FFFF)


def _sample(rng: random.Random, weighted: Sequence[tuple[object, Fraction]]):
    x = rng.random()
    acc = 0.0
    for item, p in weighted:
        acc += float(p)
        if x < acc:
            return item
    return weighted[-1][0]


def _row_for(game, location: str, actions: tuple):
    if isinstance(game, Arena):
        return game.table[(location, tuple(actions))]
    return game.table[(location, actions[0], actions[1])]


def simulate(game, profile, cfg: SimConfig,
             objectives: Optional[dict[str, tuple[str, RegularSet]]] = None,
             keep_traces: bool = False):
    """Run episodes of `profile` (one strategy per player of `game`).

    `objectives` maps names to (mode, region) with mode in eventually/always/
    repeatedly; repeatedly is approximated by a visit in the last quarter of
    the horizon (reporting only). Returns (traces, stats)."""
    players = game.players()
    if len(profile) != len(players):
        raise SimulationError("profile size does not match the player count")
    lam = cfg.loss.rate
    counters = {name: 0 for name in (objectives or {})}
    traces: list[Trace] = []
    for ep in range(cfg.episodes):
        rng = _episode_rng(cfg.seed, ep)
        state = game.initial_state()
        history = [state]
        steps: list[Step] = []
        for _ in range(cfg.horizon):
            joint = []
            for (pname, _acts), strat in zip(players, profile):
                dist = strat.query(history)
                allowed = set(game.allowed_actions(state, pname))
                bad = [a for a, p in dist.items() if p > 0 and a not in allowed]
                if bad:
                    raise SimulationError(
                        f"strategy for {pname!r} proposes disallowed {bad[0]!r} "
                        f"after history of length {len(history)} at state "
                        f"{' '.join(state)}")
                joint.append(_sample(rng, list(dist.items())))
            row = _row_for(game, state[0], tuple(joint))
            l2, op = _sample(rng, [((t, o), p) for (t, o, p) in row])
            channel = op.apply(state[1:])
            if channel is None:
                raise SimulationError(
                    f"undefined channel operation {op} sampled at "
                    f"{' '.join(state)} under joint {joint}")
            kept = tuple(m for m in channel if rng.random() >= float(lam))
            final_loc = game.relocate(l2, kept)
            state = (final_loc,) + kept
            steps.append(Step(tuple(joint), l2, str(op), channel, state))
            history.append(state)
        trace = Trace(history, steps)
        if keep_traces:
            traces.append(trace)
        for name, (mode, region) in (objectives or {}).items():
            hit = {"eventually": trace.visited,
                   "always": trace.always,
                   "repeatedly": trace.last_quarter_visit}[mode](region)
            counters[name] += int(hit)
    stats = {name: counters[name] / cfg.episodes for name in counters}
    return traces, stats


# -- one-step oracle ------------------------------------------------------------


def _effective_actions(board: RestrictedArena, player: int, state: Word):
    game = board.game
    acts = []
    for a in game.allowed_actions(state, player):
        if player == board.controller and a in board.regions \
                and not board.regions[a].contains(state):
            continue
        acts.append(a)
    return acts


def oracle_pre(game_or_board, player: int, target: RegularSet, state: Word) -> bool:
    """Brute-force one-step check: for every opposing effective action some
    own effective action reaches the target with positive probability
    (transition support plus some loss pattern)."""
    board = as_board(game_or_board)
    game = board.game
    mine = _effective_actions(board, player, state)
    if not mine:
        return False
    theirs = _effective_actions(board, 2 if player == 1 else 1, state)
    channel = state[1:]
    for b in theirs:
        if not any(_one_step_hits(game, a if player == 1 else b,
                                  b if player == 1 else a, state[0], channel,
                                  target)
                   for a in mine):
            return False
    return True


def _one_step_hits(game, a1, a2, location: str, channel: Word,
                   target: RegularSet) -> bool:
    for (l2, op, _p) in game.rows(location, a1, a2):
        after = op.apply(channel)
        if after is None:
            continue
        for sub in subwords(after):
            if target.contains((game.relocate(l2, sub),) + sub):
                return True
    return False


# -- bounded-channel controller search --------------------------------------------


def explore_states(game, channel_bound: int) -> list[Word]:
    """All states reachable under any action/loss resolution; errors out when
    the channel exceeds the bound."""
    acts1, acts2 = game.acts[1], game.acts[2]
    seen = {game.initial_state()}
    stack = [game.initial_state()]
    while stack:
        state = stack.pop()
        l, channel = state[0], state[1:]
        for a1 in acts1:
            for a2 in acts2:
                for (l2, op, _p) in game.rows(l, a1, a2):
                    after = op.apply(channel)
                    if after is None:
                        continue
                    if len(after) > channel_bound:
                        raise SimulationError(
                            f"channel bound {channel_bound} exceeded at "
                            f"{' '.join(state)}")
                    for sub in subwords(after):
                        nxt = (game.relocate(l2, sub),) + sub
                        if nxt not in seen:
                            seen.add(nxt)
                            stack.append(nxt)
    return sorted(seen)


def _reach_set(succ: dict, sources: set) -> set:
    out = set(sources)
    stack = list(sources)
    while stack:
        s = stack.pop()
        for t in succ.get(s, ()):
            if t not in out:
                out.add(t)
                stack.append(t)
    return out


def _backward_reach(succ: dict, nodes, targets: set) -> set:
    pred: dict = {}
    for s, ts in succ.items():
        for t in ts:
            pred.setdefault(t, set()).add(s)
    return _reach_set(pred, set(targets) & set(nodes))


def _safe_core(succ: dict, nodes: set) -> set:
    """Largest subset closed under every transition."""
    core = set(nodes)
    changed = True
    while changed:
        changed = False
        for s in list(core):
            if any(t not in core for t in succ.get(s, ())):
                core.discard(s)
                changed = True
    return core


def _eval_chain(succ: dict, init, quant: str, path: str, members: set) -> bool:
    nodes = _reach_set(succ, {init})
    inside = {s for s in nodes if s in members}
    if path == "F":
        can = _backward_reach(succ, nodes, inside)
        if quant == "NZ":
            return init in can
        bad = {s for s in nodes if s not in can}
        return not (_reach_set(succ, {init}) & bad)
    if path == "G":
        if init not in inside:
            return False
        if quant == "NZ":
            # positive probability of staying forever: reach, through inside
            # states only, a set closed under every supported transition
            core = _safe_core({s: succ.get(s, ()) for s in inside}, inside)
            sub = {s: [t for t in succ.get(s, ()) if t in inside]
                   for s in inside}
            inner = _reach_set(sub, {init})
            return bool(inner & core)
        return nodes <= inside
    # GF: almost-sure repeated reachability on a finite chain: every
    # reachable bottom component must intersect the target
    if quant != "AS":
        raise SimulationError("NZ(GF) is not supported by the chain oracle")
    for comp in _bottom_components(succ, nodes):
        if not (comp & inside):
            return False
    return True


def _bottom_components(succ: dict, nodes: set) -> list[set]:
    index = {}
    low = {}
    on = []
    onset = set()
    out = []
    counter = itertools.count()

    def strongconnect(v):
        work = [(v, iter(succ.get(v, ())))]
        index[v] = low[v] = next(counter)
        on.append(v)
        onset.add(v)
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in nodes:
                    continue
                if w not in index:
                    index[w] = low[w] = next(counter)
                    on.append(w)
                    onset.add(w)
                    work.append((w, iter(succ.get(w, ()))))
                    advanced = True
                    break
                if w in onset:
                    low[node] = min(low[node], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = set()
                while True:
                    w = on.pop()
                    onset.discard(w)
                    comp.add(w)
                    if w == node:
                        break
                out.append(comp)

    for v in nodes:
        if v not in index:
            strongconnect(v)
    bottoms = []
    for comp in out:
        succs = {t for s in comp for t in succ.get(s, ()) if t in nodes}
        if succs <= comp:
            bottoms.append(comp)
    return bottoms


def oracle_small_controller(game: TwoPlayerGame, conj: Conjunction,
                            memory_bound: int, channel_bound: int) -> bool:
    """Exhaustive search over deterministic finite-memory controllers of the
    one-player game; each controller induces a finite Markov chain evaluated
    with graph algorithms only (no numerics)."""
    if len(game.acts[2]) > 1:
        raise SimulationError("controller oracle needs a one-player game")
    dummy = game.acts[2][0]
    states = explore_states(game, channel_bound)
    members = {o.key(): {s for s in states if o.region.contains(s)}
               for o in conj.items}
    init = game.initial_state()
    mems = range(memory_bound)

    def allowed(state):
        return game.allowed_actions(state, 1)

    slots = [(m, s) for m in mems for s in states]
    choice_sets = []
    for (m, s) in slots:
        acts = allowed(s)
        if not acts:
            return False
        choice_sets.append([(a, m2) for a in acts for m2 in mems])
    for assignment in itertools.product(*choice_sets):
        ctrl = dict(zip(slots, assignment))
        succ: dict = {}
        for (m, s) in slots:
            a, m2 = ctrl[(m, s)]
            nexts = set()
            for (l2, op, _p) in game.rows(s[0], a, dummy):
                after = op.apply(s[1:])
                if after is None:
                    continue
                for sub in subwords(after):
                    nexts.add((m2, (game.relocate(l2, sub),) + sub))
            succ[(m, s)] = nexts
        start = (0, init)
        ok = True
        for o in conj.items:
            node_members = {(m, s) for (m, s) in slots if s in members[o.key()]}
            if not _eval_chain(succ, start, o.quant, o.path, node_members):
                ok = False
                break
        if ok:
            return True
    return False

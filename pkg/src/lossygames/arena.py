"""Game model: arenas over a single lossy FIFO channel.

An n-player `Arena` carries the raw transition table. Solvers work on
two-player views (`TwoPlayerGame`), obtained by coalition projection, and on
monitor-lifted views (`LiftedGame`) that latch visits to regular target sets
in the location component. Push prepends (newest message at the head), pop
removes the trailing message, and every queued message is lost independently
with probability λ after each operation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import regset
from .regset import Alphabet, RegularSet, RegsetError, Word


class ArenaError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelOp:
    tag: str                       # nop | push | pop
    message: Optional[str] = None

    def __post_init__(self):
        if self.tag not in ("nop", "push", "pop"):
            raise ArenaError(f"bad channel op {self.tag!r}")
        if (self.tag == "nop") != (self.message is None):
            raise ArenaError("push/pop need a message, nop takes none")

    def apply(self, channel: Word) -> Optional[Word]:
        if self.tag == "nop":
            return channel
        if self.tag == "push":
            return (self.message,) + channel
        if channel and channel[-1] == self.message:
            return channel[:-1]
        return None

    def defined_on_trailing(self, trailing: Optional[str]) -> bool:
        """Definedness depends only on the trailing letter (None = empty)."""
        return self.tag != "pop" or trailing == self.message

    def __str__(self):
        if self.tag == "nop":
            return "nop"
        return ("push " if self.tag == "push" else "pop ") + self.message


NOP = ChannelOp("nop")


@dataclass(frozen=True)
class LossModel:
    rate: Fraction

    def __post_init__(self):
        if not (0 < self.rate < 1):
            raise ArenaError(f"loss rate must be in (0,1), got {self.rate}")


def _subseq_embeddings(w: Word, v: Word) -> int:
    """Number of position subsets of w spelling v."""
    dp = [1] + [0] * len(v)
    for c in w:
        for j in range(len(v) - 1, -1, -1):
            if v[j] == c:
                dp[j + 1] += dp[j]
    return dp[len(v)]


def loss_probability(model: LossModel, w: Sequence[str], v: Sequence[str]) -> Fraction:
    """Probability that independent per-message losses turn w into v."""
    w, v = tuple(w), tuple(v)
    if len(v) > len(w):
        return Fraction(0)
    count = _subseq_embeddings(w, v)
    lam = model.rate
    return count * lam ** (len(w) - len(v)) * (1 - lam) ** len(v)


def subwords(w: Word) -> set[Word]:
    out = set()
    for r in range(len(w) + 1):
        for idx in itertools.combinations(range(len(w)), r):
            out.add(tuple(w[i] for i in idx))
    return out


Row = tuple[tuple[str, ChannelOp, Fraction], ...]


@dataclass
class Arena:
    """n-player concurrent arena; table keyed by (location, joint action)."""

    agents: tuple[str, ...]
    alphabet: Alphabet
    initial_location: str
    actions: dict[str, tuple[str, ...]]          # per-agent action names
    table: dict[tuple[str, tuple[str, ...]], Row]

    def __post_init__(self):
        self._allowed_cache: dict = {}

    def joint_actions(self) -> list[tuple[str, ...]]:
        return [j for j in itertools.product(*(self.actions[a] for a in self.agents))]

    def initial_state(self) -> Word:
        return (self.initial_location,)

    def players(self) -> list[tuple[str, tuple[str, ...]]]:
        return [(a, self.actions[a]) for a in self.agents]

    def rows(self, location: str, joint: tuple[str, ...]) -> Row:
        return self.table[(location, joint)]

    def relocate(self, target_location: str, channel: Word) -> str:
        return target_location

    def locations(self) -> tuple[str, ...]:
        return self.alphabet.locations

    # -- allowed actions ---------------------------------------------------
    def _completions(self, idx: int, action: str):
        parts = [self.actions[a] if i != idx else (action,)
                 for i, a in enumerate(self.agents)]
        return itertools.product(*parts)

    def allowed_actions(self, state: Word, agent: str) -> tuple[str, ...]:
        """Actions with at least one fully-defined joint completion."""
        idx = self.agents.index(agent)
        l, channel = state[0], state[1:]
        trailing = channel[-1] if channel else None
        out = []
        for act in self.actions[agent]:
            for joint in self._completions(idx, act):
                if all(op.defined_on_trailing(trailing)
                       for (_, op, _) in self.table[(l, joint)]):
                    out.append(act)
                    break
        return tuple(out)


def validate(arena: Arena) -> list[str]:
    """Report-only validation; empty list means valid."""
    issues: list[str] = []
    owned: dict[str, str] = {}
    for agent in arena.agents:
        for act in arena.actions[agent]:
            if act in owned:
                issues.append(f"disjointness: action {act!r} owned by "
                              f"{owned[act]!r} and {agent!r}")
            owned[act] = agent
    if arena.initial_location not in arena.alphabet.locations:
        issues.append(f"initial location {arena.initial_location!r} undeclared")
    joints = set(arena.joint_actions())
    for l in arena.alphabet.locations:
        for joint in joints:
            if (l, joint) not in arena.table:
                issues.append(f"missing row ({l}, {joint})")
    for (l, joint), row in arena.table.items():
        if l not in arena.alphabet.locations:
            issues.append(f"undeclared location {l!r} in row key")
        if joint not in joints:
            issues.append(f"unknown joint action {joint} at {l}")
        total = Fraction(0)
        for (l2, op, p) in row:
            if l2 not in arena.alphabet.locations:
                issues.append(f"undeclared target location {l2!r} in row ({l}, {joint})")
            if op.tag != "nop" and op.message not in arena.alphabet.messages:
                issues.append(f"undeclared message {op.message!r} in row ({l}, {joint})")
            if p <= 0:
                issues.append(f"non-positive probability {p} in row ({l}, {joint})")
            total += p
        if total != 1:
            issues.append(f"distribution sum {total} != 1 in row ({l}, {joint})")
    if issues:
        return issues
    # allowed-action emptiness and joint definedness per (location, trailing)
    for l in arena.alphabet.locations:
        for trailing in (None,) + arena.alphabet.messages:
            state = (l,) if trailing is None else (l, trailing)
            allowed = [arena.allowed_actions(state, a) for a in arena.agents]
            for agent, acts in zip(arena.agents, allowed):
                if not acts:
                    issues.append(f"agent {agent!r} has no allowed action at "
                                  f"{l}·(trailing {trailing or 'ε'})")
            for joint in itertools.product(*allowed):
                if not all(op.defined_on_trailing(trailing)
                           for (_, op, _) in arena.table[(l, joint)]):
                    issues.append(
                        f"allowed joint {joint} has an undefined op at "
                        f"{l}·(trailing {trailing or 'ε'})")
    return issues


# -- two-player views --------------------------------------------------------

JointName = tuple[str, ...]


class TwoPlayerGame:
    """Two-player arena; actions are joint tuples of underlying agent actions."""

    def __init__(self, alphabet: Alphabet, initial_location: str,
                 acts1: Sequence[JointName], acts2: Sequence[JointName],
                 table: dict[tuple[str, JointName, JointName], Row],
                 label: str = "game"):
        self.alphabet = alphabet
        self.initial_location = initial_location
        self.acts = {1: tuple(acts1), 2: tuple(acts2)}
        self.table = table
        self.label = label
        self._region_cache: dict = {}

    # -- protocol ------------------------------------------------------------
    def locations(self) -> tuple[str, ...]:
        return self.alphabet.locations

    def initial_state(self) -> Word:
        return (self.initial_location,)

    def players(self):
        return [(1, self.acts[1]), (2, self.acts[2])]

    def rows(self, location: str, a1: JointName, a2: JointName) -> Row:
        return self.table[(location, a1, a2)]

    def relocate(self, target_location: str, channel: Word) -> str:
        return target_location

    def relocation_patterns(self, target_location: str) -> list[tuple[str, RegularSet]]:
        return [(target_location, RegularSet.universe(self.alphabet, "channel"))]

    def project_entry(self, region: RegularSet) -> RegularSet:
        return region

    def base_game(self) -> "TwoPlayerGame":
        return self

    # -- allowed actions -----------------------------------------------------
    def _opposing(self, player: int):
        return self.acts[2 if player == 1 else 1]

    def _joint(self, player: int, mine: JointName, other: JointName):
        return (mine, other) if player == 1 else (other, mine)

    def allowed_actions(self, state: Word, player: int) -> tuple[JointName, ...]:
        l, channel = state[0], state[1:]
        trailing = channel[-1] if channel else None
        out = []
        for act in self.acts[player]:
            for other in self._opposing(player):
                a1, a2 = self._joint(player, act, other)
                if all(op.defined_on_trailing(trailing)
                       for (_, op, _) in self.table[(l, a1, a2)]):
                    out.append(act)
                    break
        return tuple(out)

    def allowed_region(self, player: int, action: JointName) -> RegularSet:
        """States where the action is allowed, as a finite union of
        l·M* / l·M*·m blocks."""
        key = ("allowed", player, action)
        if key in self._region_cache:
            return self._region_cache[key]
        al = self.alphabet
        msgs_star = regset.from_regex(al, "M*", "channel")
        parts = []
        for l in self.locations():
            per_beta = []
            for other in self._opposing(player):
                a1, a2 = self._joint(player, action, other)
                pops = {op.message for (_, op, _) in self.table[(l, a1, a2)]
                        if op.tag == "pop"}
                if len(pops) > 1:
                    continue
                if not pops:
                    per_beta.append(msgs_star)
                else:
                    (m,) = pops
                    per_beta.append(regset.from_regex(al, f"M* {m}", "channel"))
            if per_beta:
                chan = regset.union_all(al, "channel", per_beta)
                parts.append(RegularSet.state(al, l, chan))
        out = regset.union_all(al, "state", parts)
        self._region_cache[key] = out
        return out

    def universe(self) -> RegularSet:
        return RegularSet.universe(self.alphabet, "state")


def coalition_arena(arena: Arena, coalition: Sequence[str]) -> TwoPlayerGame:
    """Two-player view: player 1 = joint coalition actions, player 2 = the
    rest (a single empty tuple when the coalition is everyone)."""
    coalition = tuple(coalition)
    if not coalition:
        raise ArenaError("empty coalition")
    unknown = set(coalition) - set(arena.agents)
    if unknown:
        raise ArenaError(f"unknown agents {sorted(unknown)}")
    inside = [a for a in arena.agents if a in coalition]
    outside = [a for a in arena.agents if a not in coalition]
    acts1 = list(itertools.product(*(arena.actions[a] for a in inside)))
    acts2 = list(itertools.product(*(arena.actions[a] for a in outside))) or [()]
    pos = {a: i for i, a in enumerate(arena.agents)}
    table: dict = {}
    for l in arena.alphabet.locations:
        for a1 in acts1:
            for a2 in acts2:
                joint = [None] * len(arena.agents)
                for a, v in zip(inside, a1):
                    joint[pos[a]] = v
                for a, v in zip(outside, a2):
                    joint[pos[a]] = v
                table[(l, a1, a2)] = arena.table[(l, tuple(joint))]
    return TwoPlayerGame(arena.alphabet, arena.initial_location, acts1, acts2,
                         table, label=f"coalition({','.join(inside) or '∅'})")


def swap_players(game: TwoPlayerGame) -> TwoPlayerGame:
    table = {(l, a2, a1): row for (l, a1, a2), row in game.table.items()}
    return TwoPlayerGame(game.alphabet, game.initial_location,
                         game.acts[2], game.acts[1], table,
                         label=f"swap({game.label})")


# -- monitor lifting ---------------------------------------------------------

class Monitor:
    """Deterministic finite monitor over membership vectors in tracked sets."""

    def __init__(self, tracked: Sequence[RegularSet], states: Sequence, init, step):
        self.tracked = tuple(tracked)
        self.states = tuple(states)
        self._init = init
        self._step = step

    def vec(self, state: Word) -> tuple[bool, ...]:
        return tuple(t.contains(state) for t in self.tracked)

    def init(self, state: Word):
        return self._init(self.vec(state))

    def step(self, q, state: Word):
        return self._step(q, self.vec(state))

    @staticmethod
    def absorbing_bits(targets: Sequence[RegularSet]) -> "Monitor":
        k = len(targets)
        states = list(itertools.product((0, 1), repeat=k))

        def init(vec):
            return tuple(int(b) for b in vec)

        def step(q, vec):
            return tuple(max(a, int(b)) for a, b in zip(q, vec))

        return Monitor(targets, states, init, step)

    @staticmethod
    def cyclic_counter(targets: Sequence[RegularSet]) -> "Monitor":
        """Modular counter; state k is the wrap marker (behaves like 0)."""
        k = len(targets)
        states = list(range(k + 1))

        def step(q, vec):
            j = 0 if q == k else q
            if vec[j]:
                return j + 1      # j = k-1 yields the wrap marker k
            return j

        def init(vec):
            return step(0, vec)

        return Monitor(targets, states, init, step)


def _compose_loc(base_loc: str, q) -> str:
    tag = "".join(str(x) for x in q) if isinstance(q, tuple) else str(q)
    return f"{base_loc}@{tag}"


class LiftedGame(TwoPlayerGame):
    """Inner game extended with a monitor folded into the location component.

    Row targets keep the pre-step monitor state; `relocate` applies the
    monitor to the post-loss state (per the round factorization: operation,
    then losses, then the monitor observes the reached state)."""

    def __init__(self, inner: TwoPlayerGame, monitor: Monitor, label: str = "lift"):
        self.inner = inner
        self.monitor = monitor
        self._qname = {_compose_loc("", q)[1:]: q for q in monitor.states}
        locs = tuple(_compose_loc(l, q) for l in inner.locations()
                     for q in monitor.states)
        alphabet = Alphabet(locs, inner.alphabet.messages)
        table: dict = {}
        for (l, a1, a2), row in inner.table.items():
            for q in monitor.states:
                table[(_compose_loc(l, q), a1, a2)] = tuple(
                    (_compose_loc(l2, q), op, p) for (l2, op, p) in row)
        init_inner = inner.initial_state()
        q0 = monitor.init(init_inner)
        super().__init__(alphabet, _compose_loc(inner.initial_location, q0),
                         inner.acts[1], inner.acts[2], table,
                         label=f"{label}({inner.label})")
        self._pattern_cache: dict = {}

    def decompose(self, loc: str) -> tuple[str, object]:
        base, _, tag = loc.rpartition("@")
        return base, self._qname[tag]

    def base_game(self) -> TwoPlayerGame:
        return self.inner.base_game()

    def relocate(self, target_location: str, channel: Word) -> str:
        base, q = self.decompose(target_location)
        inner_final = self.inner.relocate(base, channel)
        q2 = self.monitor.step(q, (inner_final,) + channel)
        return _compose_loc(inner_final, q2)

    def _membership_patterns(self, inner_loc: str) -> list[tuple[tuple[bool, ...], RegularSet]]:
        """Channel sets by membership vector of inner_loc·μ in the tracked sets."""
        key = ("pat", inner_loc)
        if key in self._pattern_cache:
            return self._pattern_cache[key]
        al = self.inner.alphabet
        out = []
        for vec in itertools.product((False, True), repeat=len(self.monitor.tracked)):
            pat = RegularSet.universe(al, "channel")
            for t, b in zip(self.monitor.tracked, vec):
                r = regset.residual_location(t, inner_loc)
                pat = regset.intersection(pat, r if b else regset.complement(r))
            if not pat.is_empty():
                out.append((vec, pat))
        self._pattern_cache[key] = out
        return out

    def relocation_patterns(self, target_location: str) -> list[tuple[str, RegularSet]]:
        key = ("reloc", target_location)
        if key in self._pattern_cache:
            return self._pattern_cache[key]
        base, q = self.decompose(target_location)
        grouped: dict[str, RegularSet] = {}
        for inner_final, inner_pat in self.inner.relocation_patterns(base):
            # inner patterns are channel sets over the inner alphabet; message
            # alphabets agree, so rebuild them over ours
            for vec, pat in self._membership_patterns(inner_final):
                q2 = self.monitor._step(q, vec)
                final = _compose_loc(inner_final, q2)
                joint = regset.intersection(self._chan(inner_pat), self._chan(pat))
                if joint.is_empty():
                    continue
                grouped[final] = regset.union(grouped[final], joint) \
                    if final in grouped else joint
        out = list(grouped.items())
        self._pattern_cache[key] = out
        return out

    def _chan(self, channel_set: RegularSet) -> RegularSet:
        """Re-home a channel set (message alphabet shared) onto our alphabet."""
        if channel_set.alphabet == self.alphabet:
            return channel_set
        return RegularSet(self.alphabet, "channel", channel_set.nfa)

    def lift_set(self, region: RegularSet) -> RegularSet:
        """{(l,q)·μ : l·μ ∈ region}, all monitor states."""
        parts = []
        for l in self.inner.locations():
            resid = regset.residual_location(region, l)
            for q in self.monitor.states:
                parts.append(RegularSet.state(self.alphabet, _compose_loc(l, q),
                                              self._chan(resid)))
        return regset.union_all(self.alphabet, "state", parts)

    def monitor_region(self, predicate) -> RegularSet:
        """States whose monitor component satisfies the predicate."""
        al = self.alphabet
        msgs = regset.from_regex(al, "M*", "channel")
        parts = [RegularSet.state(al, _compose_loc(l, q), msgs)
                 for l in self.inner.locations()
                 for q in self.monitor.states if predicate(q)]
        return regset.union_all(al, "state", parts)

    def entry_location(self, inner_state: Word) -> str:
        return _compose_loc(inner_state[0], self.monitor.init(inner_state))

    def stable_region(self) -> RegularSet:
        """States on which the monitor would not move (for latching monitors
        this is exactly the dynamically consistent part of the state space)."""
        if "stable" not in self._pattern_cache:
            parts = []
            for l in self.inner.locations():
                for q in self.monitor.states:
                    for vec, pat in self._membership_patterns(l):
                        if self.monitor._step(q, vec) == q:
                            parts.append(RegularSet.state(
                                self.alphabet, _compose_loc(l, q), self._chan(pat)))
            self._pattern_cache["stable"] = regset.union_all(
                self.alphabet, "state", parts)
        return self._pattern_cache["stable"]

    def project_entry(self, region: RegularSet) -> RegularSet:
        """{inner s : entry-lift of s ∈ region}, then the inner projection."""
        al_in = self.inner.alphabet
        parts = []
        for l in self.inner.locations():
            for vec, pat in self._membership_patterns(l):
                q = self.monitor._init(tuple(bool(b) for b in vec))
                resid = regset.residual_location(region, _compose_loc(l, q))
                chan = regset.intersection(RegularSet(al_in, "channel", resid.nfa), pat)
                if not chan.is_empty():
                    parts.append(RegularSet.state(al_in, l, chan))
        out = regset.union_all(al_in, "state", parts)
        return self.inner.project_entry(out)


def make_absorbing(game: TwoPlayerGame, targets: Sequence[RegularSet]
                   ) -> tuple[LiftedGame, list[RegularSet]]:
    """Latch one bit per target (updated from the post-loss state); returns
    the lifted game and the lifted targets (bit j set)."""
    if not targets:
        raise ArenaError("make_absorbing needs at least one target")
    lifted = LiftedGame(game, Monitor.absorbing_bits(targets), label="absorb")
    lifted_targets = [lifted.monitor_region(lambda q, j=j: q[j] == 1)
                      for j in range(len(targets))]
    return lifted, lifted_targets


# -- DOT export ----------------------------------------------------------------

def arena_to_dot(arena: Arena, name: str = "arena") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for l in arena.alphabet.locations:
        shape = "doublecircle" if l == arena.initial_location else "circle"
        lines.append(f'  "{l}" [shape={shape}];')
    grouped: dict[tuple[str, str, str], list[str]] = {}
    for (l, joint), row in sorted(arena.table.items()):
        for (l2, op, p) in row:
            label = "".join(joint)
            tail = "" if op.tag == "nop" else f"|{op.message}{'!' if op.tag == 'push' else '?'}"
            grouped.setdefault((l, l2, tail), []).append(label)
    for (l, l2, tail), labels in grouped.items():
        lines.append(f'  "{l}" -> "{l2}" [label="{",".join(labels)}{tail}"];')
    lines.append("}")
    return "\n".join(lines)

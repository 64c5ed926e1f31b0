"""E-Core and A-Core.

Membership of the core is characterized by a winner set W: some profile makes
exactly W win while satisfying the checked property (a one-player conjunction
query over the grand coalition), and no coalition of the remaining players can
force all of its members' goals (two-player conjunction queries). W ranges
over agents with fragment goals; an adversarial negation goal is never
asserted positively in the W loop (its negation, the other agents' goal
conjunction, is asserted instead), and coalitions containing such an agent
test each disjunct of the expanded negation separately.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from . import regset
from .arena import Arena, coalition_arena
from .conjunction import Conjunction, FragmentError, Objective, solve_conjunction
from .regset import RegularSet


@dataclass(frozen=True)
class NegationGoal:
    """Goal of the form ¬(⋀ other agents' AS goals)."""

    over: tuple[str, ...]          # agent names whose goals are negated
    label: str = ""

    def describe(self) -> str:
        return self.label or f"not({' & '.join(self.over)})"


Goal = Union[Objective, NegationGoal]


@dataclass
class GameSpec:
    arena: Arena
    goals: dict[str, Goal]

    def __post_init__(self):
        for agent in self.arena.agents:
            if agent not in self.goals:
                raise FragmentError(f"agent {agent!r} has no goal")
        for agent, g in self.goals.items():
            if isinstance(g, Objective):
                if g.quant != "AS" or g.path not in ("F", "G"):
                    raise FragmentError(
                        f"goal of {agent!r} must be AS(eventually)/AS(always)")
            else:
                for other in g.over:
                    if other == agent or not isinstance(self.goals.get(other), Objective):
                        raise FragmentError(
                            f"negation goal of {agent!r} must negate other "
                            f"agents' fragment goals")

    def fragment_agents(self) -> tuple[str, ...]:
        return tuple(a for a in self.arena.agents
                     if isinstance(self.goals[a], Objective))

    def positive_branches(self, agent: str) -> list[list[Objective]]:
        """The agent's goal as a DNF (a negation goal expands disjunctively)."""
        g = self.goals[agent]
        if isinstance(g, Objective):
            return [[g]]
        return [[self.goals[o].negate()] for o in g.over]

    def negative_conjuncts(self, agent: str) -> list[Objective]:
        """¬goal as a conjunction (¬ of a negation goal is the inner conjunction)."""
        g = self.goals[agent]
        if isinstance(g, Objective):
            return [g.negate()]
        return [self.goals[o] for o in g.over]


@dataclass
class PropertySpec:
    """A property in disjunctive normal form over objective atoms."""

    branches: list[list[Objective]]
    label: str = ""

    def __post_init__(self):
        if not self.branches or any(not b for b in self.branches):
            raise FragmentError("property needs at least one non-empty branch")
        for branch in self.branches:
            buchi = [o for o in branch if o.path == "GF"]
            if buchi and len(buchi) != len(branch):
                raise FragmentError(
                    "repeated-reachability atoms cannot mix with other atoms "
                    "in one property branch")
            for o in buchi:
                if o.quant != "AS":
                    raise FragmentError("NZ(□◇) is outside the fragment")

    @staticmethod
    def trivially_true(alphabet) -> "PropertySpec":
        top = RegularSet.universe(alphabet, "state")
        return PropertySpec([[Objective("AS", "G", top, label="true")]], label="true")

    def describe(self) -> str:
        return self.label or " | ".join(
            "(" + " & ".join(o.describe() for o in b) + ")" for b in self.branches)


# -- propositional screening ---------------------------------------------------


def screen_branch(conjuncts: Sequence[Objective]) -> tuple[list[Objective], Optional[str]]:
    """Dedup and detect unsatisfiable pairs before any solving.

    Returns (kept conjuncts, reason) where a non-None reason marks the branch
    as propositionally dead."""
    kept: list[Objective] = []
    seen = set()
    for o in conjuncts:
        if o.key() in seen:
            continue
        seen.add(o.key())
        if o.path == "F" and o.region.is_empty():
            return [], f"{o.describe()}: eventually-empty is unsatisfiable"
        uni = RegularSet.universe(o.region.alphabet, "state")
        if o.path == "G" and o.region == uni:
            continue                      # trivially true
        if o.path == "F" and o.quant == "AS" and o.region == uni:
            continue
        kept.append(o)
    for a, b in itertools.combinations(kept, 2):
        for x, y in ((a, b), (b, a)):
            if x.quant == "AS" and y.quant == "NZ" and x.path != y.path \
                    and x.path != "GF" and y.path != "GF" \
                    and y.region == regset.complement(x.region):
                return [], (f"propositional inconsistency: {x.describe()} "
                            f"against {y.describe()}")
    return kept, None


# -- step reports ----------------------------------------------------------------


@dataclass
class BranchReport:
    conjuncts: list[Objective]
    dead_reason: Optional[str]
    winning: Optional[RegularSet]
    initial_wins: bool


@dataclass
class Step2Report:
    winners: tuple[str, ...]
    branches: list[BranchReport]
    passed: bool
    seconds: float


@dataclass
class CoalitionReport:
    coalition: tuple[str, ...]
    branches: list[BranchReport]
    deviates: bool
    seconds: float


@dataclass
class Step3Report:
    winners: tuple[str, ...]
    coalitions: list[CoalitionReport]
    no_deviation: bool


@dataclass
class CoreVerdict:
    answer: bool
    problem: str
    witness: Optional[tuple[str, ...]]
    step2: dict[tuple[str, ...], Step2Report]
    step3: dict[tuple[str, ...], Step3Report]
    seconds: float
    note: str = ""


def _dnf_product(parts: Sequence[list[list[Objective]]]) -> list[list[Objective]]:
    branches: list[list[Objective]] = [[]]
    for part in parts:
        branches = [b + p for b in branches for p in part]
    return branches


def _solve_branch(arena: Arena, coalition: Sequence[str],
                  conjuncts: Sequence[Objective]) -> BranchReport:
    kept, reason = screen_branch(conjuncts)
    if reason is not None:
        return BranchReport(list(conjuncts), reason, None, False)
    board = coalition_arena(arena, coalition)
    if not kept:
        top = RegularSet.universe(arena.alphabet, "state")
        return BranchReport(list(conjuncts), None, top, True)
    region = solve_conjunction(board, 1, Conjunction(kept))
    init = board.initial_state()
    return BranchReport(list(conjuncts), None, region.winning,
                        region.winning.contains(init))


def step2_check(game: GameSpec, gamma: PropertySpec,
                winners: Sequence[str]) -> Step2Report:
    """Is there a grand-coalition profile under which exactly `winners` win
    and gamma holds? A one-player conjunction query per DNF branch."""
    t0 = time.monotonic()
    winners = tuple(winners)
    parts: list[list[list[Objective]]] = []
    for agent in game.arena.agents:
        if agent in winners:
            parts.append(game.positive_branches(agent))
        else:
            parts.append([game.negative_conjuncts(agent)])
    parts.append(gamma.branches)
    reports = []
    passed = False
    for branch in _dnf_product(parts):
        rep = _solve_branch(game.arena, game.arena.agents, branch)
        reports.append(rep)
        if rep.initial_wins:
            passed = True
            break
    return Step2Report(winners, reports, passed, time.monotonic() - t0)


def step3_check(game: GameSpec, winners: Sequence[str]) -> Step3Report:
    """For every non-empty coalition of non-winners, can it force all of its
    members' goals? (The empty coalition is skipped: deviations are non-empty
    by definition.)"""
    winners = tuple(winners)
    rest = [a for a in game.arena.agents if a not in winners]
    coalitions = []
    for size in range(1, len(rest) + 1):
        for combo in itertools.combinations(rest, size):
            t0 = time.monotonic()
            parts = [game.positive_branches(a) for a in combo]
            branch_reports = []
            deviates = False
            for branch in _dnf_product(parts):
                rep = _solve_branch(game.arena, combo, branch)
                branch_reports.append(rep)
                if rep.initial_wins:
                    deviates = True
                    break
            coalitions.append(CoalitionReport(combo, branch_reports, deviates,
                                              time.monotonic() - t0))
    return Step3Report(winners, coalitions,
                       not any(c.deviates for c in coalitions))


def e_core(game: GameSpec, gamma: PropertySpec) -> CoreVerdict:
    """Does some core profile satisfy gamma? Deterministic search over winner
    sets in increasing size."""
    t0 = time.monotonic()
    agents = game.fragment_agents()
    step2: dict = {}
    step3: dict = {}
    note = ""
    if len(agents) != len(game.arena.agents):
        excl = set(game.arena.agents) - set(agents)
        note = (f"agents with negation goals are never asserted as winners: "
                f"{sorted(excl)}")
    for size in range(len(agents) + 1):
        for winners in itertools.combinations(agents, size):
            s2 = step2_check(game, gamma, winners)
            step2[winners] = s2
            if not s2.passed:
                continue
            s3 = step3_check(game, winners)
            step3[winners] = s3
            if s3.no_deviation:
                return CoreVerdict(True, "e-core", winners, step2, step3,
                                   time.monotonic() - t0, note)
    return CoreVerdict(False, "e-core", None, step2, step3,
                       time.monotonic() - t0, note)


def a_core(game: GameSpec, gamma: PropertySpec) -> CoreVerdict:
    """Do all core profiles satisfy gamma? Dual: no core profile satisfies
    any negated conjunct. gamma must be a single conjunction of AS atoms."""
    t0 = time.monotonic()
    if len(gamma.branches) != 1:
        raise FragmentError("a-core needs a single conjunction of AS atoms")
    (branch,) = gamma.branches
    for o in branch:
        if o.quant != "AS" or o.path == "GF":
            raise FragmentError(
                "a-core property must conjoin AS(eventually)/AS(always) atoms "
                "(negating repeated reachability is outside the fragment)")
    step2: dict = {}
    step3: dict = {}
    witness = None
    answer = True
    for o in branch:
        neg = PropertySpec([[o.negate()]], label=f"not({o.describe()})")
        sub = e_core(game, neg)
        step2.update(sub.step2)
        step3.update(sub.step3)
        if sub.answer:
            answer = False
            witness = sub.witness
            break
    return CoreVerdict(answer, "a-core", witness, step2, step3,
                       time.monotonic() - t0)

"""Core layer: step-2/step-3 behavior on the mitm game, the acceptance
verdicts, non-emptiness, step-3 monotonicity and evidence re-validation."""

import pytest

from lossygames import core, regset
from lossygames.arena import coalition_arena
from lossygames.conjunction import Conjunction, FragmentError, Objective, \
    solve_conjunction
from lossygames.core import (CoreVerdict, GameSpec, NegationGoal, PropertySpec,
                             a_core, e_core, screen_branch, step2_check,
                             step3_check)
from lossygames.regset import RegularSet, from_regex


def _top(al):
    return PropertySpec.trivially_true(al)


# -- propositional screening ------------------------------------------------------


def test_screen_complement_pairs(fig3):
    al = fig3.arena.alphabet
    safe = from_regex(al, "L.M{0,2}", "state")
    a = Objective("AS", "G", safe, label="AS G bounded")
    b = Objective("NZ", "F", regset.complement(safe), label="NZ F unbounded")
    kept, reason = screen_branch([a, b])
    assert reason is not None and "inconsistency" in reason
    kept, reason = screen_branch([a, a])
    assert reason is None and len(kept) == 1       # dedup


def test_screen_empty_reach(fig3):
    al = fig3.arena.alphabet
    dead = Objective("AS", "F", RegularSet.empty(al, "state"), label="AS F empty")
    kept, reason = screen_branch([dead])
    assert reason is not None


# -- step 2 -----------------------------------------------------------------------


def test_step2_all_winners_reduces_to_joint_satisfiability(fig3):
    rep = step2_check(fig3.spec, _top(fig3.arena.alphabet), ("S", "R"))
    assert rep.passed


def test_step2_with_attacker_in_w_dies_propositionally(fig3):
    rep = step2_check(fig3.spec, _top(fig3.arena.alphabet), ("S", "R", "A"))
    assert not rep.passed
    assert all(b.dead_reason for b in rep.branches)


def test_step2_stalling_winner_set_passes(fig3):
    """W = {S, A} is satisfiable in isolation (S stalls); e_core never
    asserts A as a winner, so this is only reachable by direct call."""
    rep = step2_check(fig3.spec, _top(fig3.arena.alphabet), ("S",))
    assert not rep.passed      # ¬Φ_A = Φ_S ∧ Φ_R forces Φ_R against ¬Φ_R


# -- step 3 -----------------------------------------------------------------------


def test_step3_vacuous_for_full_w(fig3):
    rep = step3_check(fig3.spec, ("S", "R", "A"))
    assert rep.no_deviation and rep.coalitions == []


def test_step3_empty_w_finds_deviations(fig3):
    rep = step3_check(fig3.spec, ())
    by = {r.coalition: r.deviates for r in rep.coalitions}
    assert by[("S",)] is True             # stalling secures the bound
    assert by[("R",)] is False            # R cannot force delivery alone
    assert by[("A",)] is False            # neither negation disjunct is securable
    assert by[("S", "R")] is True         # the protocol coalition
    assert not rep.no_deviation


def test_step3_monotone_in_w(fig3):
    small = step3_check(fig3.spec, ())
    large = step3_check(fig3.spec, ("S",))
    dev_small = {r.coalition for r in small.coalitions if r.deviates}
    dev_large = {r.coalition for r in large.coalitions if r.deviates}
    assert dev_large <= dev_small


def test_step3_evidence_revalidates(fig3):
    rep = step3_check(fig3.spec, ())
    for r in rep.coalitions:
        if not r.deviates:
            continue
        winning_branch = next(b for b in r.branches if b.initial_wins)
        board = coalition_arena(fig3.arena, r.coalition)
        again = solve_conjunction(board, 1, Conjunction(winning_branch.conjuncts))
        assert again.winning.contains(board.initial_state())


# -- e-core / a-core -------------------------------------------------------------------


def test_e_core_phiA_negative(fig3):
    v = e_core(fig3.spec, fig3.props["phiA"])
    assert v.answer is False
    assert all(not rep.passed for rep in v.step2.values())


def test_a_core_protocol_positive(fig3):
    v = a_core(fig3.spec, fig3.props["phiSR"])
    assert v.answer is True


def test_e_core_protocol_positive(fig3):
    v = e_core(fig3.spec, fig3.props["phiSR"])
    assert v.answer is True and set(v.witness) >= {"S", "R"}


def test_e_core_nonempty_core_fig3(fig3):
    v = e_core(fig3.spec, _top(fig3.arena.alphabet))
    assert v.answer is True and v.witness == ("S", "R")


def test_e_core_nonempty_core_fig2(fig2):
    v = e_core(fig2.spec, _top(fig2.arena.alphabet))
    assert v.answer is True


def test_e_core_single_player_achievable(fig2):
    """A one-player game whose goal is achievable: yes with W = {player}."""
    arena = fig2.arena
    from lossygames.arena import Arena
    solo = Arena(("sender",), arena.alphabet, arena.initial_location,
                 {"sender": arena.actions["sender"]},
                 {(l, (j[0],)): row for (l, j), row in arena.table.items()
                  if j[1] == "w"})
    goal = Objective("AS", "F", from_regex(arena.alphabet, "l1.M*", "state"),
                     label="AS F l1")
    spec = GameSpec(solo, {"sender": goal})
    v = e_core(spec, _top(arena.alphabet))
    assert v.answer is True and v.witness == ("sender",)


def test_a_core_unreachable_target_negative(fig3):
    """Some core profile violates an unreachable-target property, so a-core
    answers no (the e-core of the negation finds the stalling profile)."""
    al = fig3.arena.alphabet
    unreachable = PropertySpec(
        [[Objective("AS", "F", from_regex(al, "lF.c", "state"),
                    label="AS F lF·c")]], label="deliver-c")
    v = a_core(fig3.spec, unreachable)
    assert v.answer is False


def test_a_core_trivially_true(fig3):
    v = a_core(fig3.spec, _top(fig3.arena.alphabet))
    assert v.answer is True


def test_a_core_buchi_rejected(fig3):
    al = fig3.arena.alphabet
    gamma = PropertySpec([[Objective("AS", "GF",
                                     from_regex(al, "l0.M*", "state"),
                                     label="AS GF l0")]], label="buchi")
    with pytest.raises(FragmentError):
        a_core(fig3.spec, gamma)


def test_e_core_consistency_with_a_core(fig3):
    """a_core(Γ) = yes implies the witnessing core profile of e_core(⊤)
    satisfies Γ too: its step-2 winner set also passes with Γ conjoined."""
    gamma = fig3.props["phiSR"]
    assert a_core(fig3.spec, gamma).answer
    v = e_core(fig3.spec, _top(fig3.arena.alphabet))
    rep = step2_check(fig3.spec, gamma, v.witness)
    assert rep.passed


def test_game_spec_fragment_checks(fig3):
    al = fig3.arena.alphabet
    bad = dict(fig3.spec.goals)
    bad["S"] = Objective("NZ", "F", from_regex(al, "l0.M*", "state"))
    with pytest.raises(FragmentError):
        GameSpec(fig3.arena, bad)
    bad2 = dict(fig3.spec.goals)
    bad2["A"] = NegationGoal(("A",))
    with pytest.raises(FragmentError):
        GameSpec(fig3.arena, bad2)

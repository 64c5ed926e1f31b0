"""Strategy representations: the counting schedule, exact query arithmetic,
allowed-support discipline, the synthesized winners/spoilers of the
transmission game, and the PFM/counting representation distinction."""

import random
from fractions import Fraction

import pytest

from lossygames import regset, sim, strategy, zerosum
from lossygames.arena import LossModel, coalition_arena
from lossygames.regset import from_regex
from lossygames.strategy import (CountingStrategy, PFMStrategy, StrategyError,
                                 UniformStrategy, schedule_weight,
                                 synth_as_reach, synth_nz_reach, synth_spoiler)


@pytest.fixture(scope="module")
def att(fig2):
    return coalition_arena(fig2.arena, ["attacker"])


@pytest.fixture(scope="module")
def snd(fig2):
    return coalition_arena(fig2.arena, ["sender"])


@pytest.fixture(scope="module")
def nz_strategy(att):
    region = zerosum.nz_reach(att, 1, from_regex(att.alphabet, "l2.c", "state"))
    return region, synth_nz_reach(region)


@pytest.fixture(scope="module")
def spoiler(snd):
    region = zerosum.as_reach(snd, 1, from_regex(snd.alphabet, "L.M*aM*", "state"))
    return region, synth_spoiler(region)


# -- schedule ---------------------------------------------------------------------


def test_schedule_p0_exact():
    assert schedule_weight(0) == Fraction(1, 2)


def test_schedule_product_quarter():
    prod = Fraction(1)
    for k in range(31):
        prod *= schedule_weight(k)
    assert abs(float(prod) - 0.25) <= 1e-6


def test_schedule_values_in_unit_interval():
    for k in range(20):
        assert 0 < schedule_weight(k) < 1
        if k:
            assert schedule_weight(k) > schedule_weight(k - 1)


# -- query ------------------------------------------------------------------------


def test_query_uniform_over_allowed(att):
    s = UniformStrategy(att, 1)
    assert s.query([("l0",)]) == {("a",): Fraction(1, 3), ("b",): Fraction(1, 3),
                                  ("w",): Fraction(1, 3)}
    # the pop action drops out on the empty channel at l1
    assert s.query([("l0",), ("l1",)]) == {("a",): Fraction(1, 2),
                                           ("w",): Fraction(1, 2)}


def test_query_counting_k0_weight(att):
    urgent = PFMStrategy(att, 1, [strategy.Cell(
        "u", att.universe(), {("w",): Fraction(1)})])
    fallback = UniformStrategy(att, 1)
    c = CountingStrategy(att, 1, urgent, fallback)
    d = c.query([("l0",)])
    assert d[("w",)] == Fraction(1, 2) + Fraction(1, 2) * Fraction(1, 3)


def test_query_sums_to_one_exactly(att, spoiler):
    _, sp = spoiler
    rng = random.Random(0)
    states = [("l0",), ("l0", "b"), ("l1", "c"), ("l2", "b", "c"),
              ("l0", "c", "b"), ("l1", "b", "b", "c")]
    for n in range(1, 12):
        hist = [rng.choice(states) for _ in range(n)]
        d = sp.query(hist)
        assert sum(d.values()) == 1
        assert all(isinstance(p, Fraction) for p in d.values())


def test_query_support_within_allowed(fig2, att, spoiler, nz_strategy):
    _, sp = spoiler
    _, nz = nz_strategy
    from conftest import states_up_to
    for s in states_up_to(fig2.arena.alphabet, 3):
        for strat, player in ((sp, 2), (nz, 1)):
            d = strat.query([s])
            allowed = att.allowed_actions(s, 1) if player == 1 else None
            if player == 2:
                g = strat.game if isinstance(strat, CountingStrategy) else None
                allowed = (g or att).allowed_actions(s, strat.player)
            for a, p in d.items():
                if p > 0:
                    assert a in allowed, (s, a)


def test_query_rejects_disallowed_support(att):
    bad = PFMStrategy(att, 1, [strategy.Cell(
        "bad", att.universe(), {("b",): Fraction(1)})])
    with pytest.raises(StrategyError):
        bad.query([("l1",)])       # pop c with an empty channel


def test_positional_determinism(nz_strategy):
    _, s = nz_strategy
    a = s.query([("l0", "c")])
    b = s.query([("l2", "b"), ("l1",), ("l0", "c")])
    assert a == b


def test_counting_not_pfm(spoiler):
    _, sp = spoiler
    assert isinstance(sp, CountingStrategy)
    assert not isinstance(sp, PFMStrategy)
    short = sp.query([("l0", "b")])
    long = sp.query([("l0", "b")] * 5)
    assert short != long          # same last state, different round index


def test_spoiler_example_query(spoiler):
    """w with probability p_2 = 2^(-1/4) after a length-2 prior history in
    l0·b*, remainder uniform on {a, b}."""
    _, sp = spoiler
    hist = [("l0",), ("l0", "b"), ("l0", "b", "b")]
    d = sp.query(hist)
    p2 = schedule_weight(2)
    assert d[("w",)] == p2
    assert d[("a",)] == d[("b",)] == (1 - p2) / 2
    assert abs(float(p2) - 2 ** (-1 / 4)) < 1e-12


# -- synthesized shapes -----------------------------------------------------------------


def test_nz_cells_uniform_ab_on_l0(nz_strategy):
    _, s = nz_strategy
    for st in [("l0",), ("l0", "b"), ("l0", "c"), ("l0", "b", "c"),
               ("l0", "a", "a"), ("l0", "c", "c", "c")]:
        assert s.dist_at(st) == {("a",): Fraction(1, 2), ("b",): Fraction(1, 2)}


def test_nz_region_verdict(nz_strategy):
    region, _ = nz_strategy
    assert region.member(("l0",))


def test_as_reach_uniform_everywhere(snd):
    region = zerosum.as_reach(snd, 1,
                              from_regex(snd.alphabet, "l1.aaa | l2.M*", "state"))
    s = synth_as_reach(region)
    for st in [("l0",), ("l1", "b"), ("l2", "c"), ("l0", "a", "b", "c")]:
        assert s.dist_at(st) == {("sa",): Fraction(1, 2), ("sb",): Fraction(1, 2)}


def test_spoiler_urgent_w_on_l0_cells(spoiler):
    _, sp = spoiler
    for st in [("l0",), ("l0", "b"), ("l0", "b", "b"), ("l0", "b", "b", "b")]:
        assert sp.urgent.dist_at(st) == {("w",): Fraction(1)}
    assert sp.fallback.dist_at(("l0", "b"))[("a",)] == Fraction(1, 2)


def test_spoiler_pop_cell(spoiler):
    _, sp = spoiler
    assert sp.urgent.dist_at(("l1", "c")) == {("b",): Fraction(1)}
    assert sp.urgent.dist_at(("l1", "b", "c")) == {("b",): Fraction(1)}


def test_spoiler_requires_non_full_region(att):
    full = zerosum.as_reach(att, 1, att.universe())
    with pytest.raises(StrategyError):
        synth_spoiler(full)


def test_nz_strategy_statistical_witness(att, nz_strategy):
    """Against random opposing strategies some episode reaches the target."""
    _, s = nz_strategy
    target = from_regex(att.alphabet, "l2.c", "state")
    rng = random.Random(99)
    hits = 0
    for i in range(20):
        opp = strategy.random_pfm(att, 2, rng, name=f"opp{i}")
        cfg = sim.SimConfig(LossModel(Fraction(1, 10)), horizon=25,
                            episodes=50, seed=5000 + i)
        _, stats = sim.simulate(att, [s, opp], cfg,
                                {"hit": ("eventually", target)})
        hits += stats["hit"] * 50
    assert hits >= 1


def test_random_pfm_queryable(att):
    rng = random.Random(3)
    opp = strategy.random_pfm(att, 2, rng)
    for st in [("l0",), ("l1", "c"), ("l2", "a", "b")]:
        d = opp.query([st])
        assert sum(d.values()) == 1


def test_strategy_dot_and_summary(spoiler):
    _, sp = spoiler
    summary = strategy.strategy_summary(sp)
    assert summary["kind"] == "counting"
    dot = strategy.strategy_to_dot(sp)
    assert "p_k" in dot

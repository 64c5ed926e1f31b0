"""Regular-set engine: denotations, boolean laws, orders, closures,
residuals and operation preimages, each checked against direct enumeration
or a direct implementation of the order definitions."""

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lossygames import regset
from lossygames.arena import ChannelOp, NOP
from lossygames.regset import (Alphabet, NFA, RegularSet, RegsetError,
                               from_regex, state_le, subword_le)

AL = Alphabet(("l0", "l1", "l2"), ("a", "b"))
AL3 = Alphabet(("l0", "l1", "l2"), ("a", "b", "c"))


def words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet.messages, repeat=n)


def brute_states(alphabet, max_len):
    for l in alphabet.locations:
        for w in words(alphabet, max_len):
            yield (l,) + w


# -- from_regex denotations ------------------------------------------------


def test_regex_state_denotation():
    A = from_regex(AL, "l0.(a|b)*", "state")
    expected = [("l0",) + w for w in words(AL, 3)]
    assert A.enumerate(3) == sorted(expected, key=lambda w: (len(w), w))
    assert A.contains(("l0",))


def test_regex_channel_universal():
    A = from_regex(AL, "(a|b)*", "channel")
    assert A.enumerate(2) == [(), ("a",), ("b",), ("a", "a"), ("a", "b"),
                              ("b", "a"), ("b", "b")]


def test_regex_single_state():
    A = from_regex(AL3, "l2.c", "state")
    assert A.contains(("l2", "c"))
    assert not A.contains(("l2", "c", "c"))
    assert not A.contains(("l2",))
    assert A.enumerate(4) == [("l2", "c")]


def test_regex_errors():
    with pytest.raises(RegsetError):
        from_regex(AL, "l0.z*", "state")
    with pytest.raises(RegsetError):
        from_regex(AL, "a.l0", "state")       # word outside L·M*
    with pytest.raises(RegsetError):
        from_regex(AL, "l0.l1", "state")


def test_bounded_repeat():
    A = from_regex(AL, "L.M{0,2}", "state")
    assert len(A.enumerate(3)) == 3 * (1 + 2 + 4)


# -- combine -----------------------------------------------------------------


def test_union_identity():
    A = from_regex(AL, "l0.a*", "state")
    empty = RegularSet.empty(AL, "state")
    assert regset.combine("union", empty, A) == A


def test_complement_involution():
    A = from_regex(AL, "l1.(a|b)*a", "state")
    assert regset.combine("complement", regset.combine("complement", A)) == A


def test_intersection_enumeration():
    A = from_regex(AL, "l0.(a|b)*", "state")
    B = from_regex(AL, "L.b*", "state")
    got = regset.intersection(A, B)
    brute = [s for s in brute_states(AL, 4)
             if A.contains(s) and B.contains(s)]
    assert got.enumerate(4) == sorted(brute, key=lambda w: (len(w), w))
    assert got == from_regex(AL, "l0.b*", "state")


def test_kind_mismatch():
    A = from_regex(AL, "l0.a*", "state")
    B = from_regex(AL, "a*", "channel")
    with pytest.raises(RegsetError):
        regset.union(A, B)


# -- compare -------------------------------------------------------------------


def test_compare_empty():
    A = from_regex(AL, "l0.a*", "state")
    r = regset.compare(RegularSet.empty(AL, "state"), A)
    assert r.left_empty and r.subset and not r.equal


def test_compare_subset():
    A = from_regex(AL, "l0.b*", "state")
    B = from_regex(AL, "l0.(a|b)*", "state")
    r = regset.compare(A, B)
    assert r.subset and not r.equal and not r.disjoint
    # verify by enumeration to length 5
    for s in A.enumerate(5):
        assert B.contains(s)


def test_compare_involution_equal():
    A = from_regex(AL, "l0.(ab)*", "state")
    r = regset.compare(A, regset.complement(regset.complement(A)))
    assert r.equal


# -- contains -------------------------------------------------------------------


def test_contains_examples():
    A = from_regex(AL, "l0.(a|b)*", "state")
    assert A.contains(("l0",))
    T = from_regex(AL3, "l2.c", "state")
    assert T.contains(("l2", "c"))
    assert not T.contains(("l2", "c", "c"))
    with pytest.raises(RegsetError):
        A.contains(("z9",))


# -- orders and closures -----------------------------------------------------------


def test_direct_order_definitions():
    # ⪯ oracle: scattered subword
    assert subword_le((), ("a",))
    assert subword_le(("a", "b"), ("a", "a", "b"))
    assert not subword_le(("b", "a"), ("a", "a", "b"))
    # ⊑: subword + same location + equal-or-same-last-letter channels
    assert state_le(("l0", "a", "b"), ("l0", "a", "a", "b"))
    assert not state_le(("l0", "a", "b"), ("l0", "a", "b", "a"))
    assert state_le(("l0",), ("l0",))
    assert not state_le(("l0",), ("l0", "a"))      # last(ε) = ε


def test_up_closure_state_order_frozen():
    A = RegularSet.from_words(AL, "state", [("l0", "a", "b")])
    up = regset.up_closure(A, "state")
    assert up.enumerate(3) == [("l0", "a", "b"), ("l0", "a", "a", "b"),
                               ("l0", "a", "b", "b"), ("l0", "b", "a", "b")]


def test_up_closure_empty_channel():
    A = RegularSet.from_words(AL, "state", [("l0",)])
    up = regset.up_closure(A, "state")
    assert up.enumerate(2) == [("l0",)]


def test_up_closure_subword_higman():
    A = RegularSet.from_words(AL, "channel", [("a", "b")])
    up = regset.up_closure(A, "subword")
    want = from_regex(AL, "(a|b)*a(a|b)*b(a|b)*", "channel")
    assert up == want


@pytest.mark.parametrize("order,oracle", [
    ("subword", lambda s, t: s[0] == t[0] and subword_le(s[1:], t[1:])),
    ("state", state_le),
])
def test_up_closure_matches_direct_order(order, oracle):
    rng = random.Random(7)
    for _ in range(12):
        n = rng.randint(0, 3)
        base = ("l0",) + tuple(rng.choice(AL.messages) for _ in range(n))
        up = regset.up_closure(RegularSet.from_words(AL, "state", [base]), order)
        for t in brute_states(AL, 5):
            assert up.contains(t) == oracle(base, t), (base, t, order)


def test_up_closure_is_closure_operator():
    rng = random.Random(3)
    for _ in range(8):
        pats = rng.sample(["l0.a*", "l1.(a|b)*b", "l2.ab", "l0.b{1,2}",
                           "l1.a", "l2.M*"], 3)
        A = regset.union_all(AL, "state",
                             [from_regex(AL, p, "state") for p in pats])
        for order in ("subword", "state"):
            up = regset.up_closure(A, order)
            assert regset.is_subset(A, up)                    # extensive
            assert regset.up_closure(up, order) == up         # idempotent
            B = regset.union(A, from_regex(AL, "l0.ba", "state"))
            assert regset.is_subset(up, regset.up_closure(B, order))  # monotone


def test_minimal_elements_antichain():
    A = from_regex(AL, "l0.(a|b)*a(a|b)*", "state")
    up = regset.up_closure(A, "subword")
    mins = regset.minimal_elements(up, "subword", 4)
    assert mins == [("l0", "a")]
    for u, v in itertools.combinations(mins, 2):
        assert not subword_le(u[1:], v[1:]) and not subword_le(v[1:], u[1:])
    # the closure of the minimal elements gives the set back
    rebuilt = regset.up_closure(
        RegularSet.from_words(AL, "state", mins), "subword")
    assert rebuilt == up


# -- residuals and preimages ---------------------------------------------------------


def test_residual_location():
    A = from_regex(AL, "l0.a.M*", "state")
    r = regset.residual_location(A, "l0")
    assert r.contains(("a",)) and r.contains(("a", "b"))
    assert not r.contains(())
    assert regset.residual_location(A, "l1").is_empty()
    B = from_regex(AL, "L.M*aM*", "state")
    rb = regset.residual_location(B, "l1")
    brute = [w for w in words(AL, 3) if "a" in w]
    assert rb.enumerate(3) == sorted(brute, key=lambda w: (len(w), w))


def test_op_preimage_identities():
    A = from_regex(AL, "a.b*", "channel")
    assert regset.op_preimage(NOP, A) == A
    push = regset.op_preimage(ChannelOp("push", "a"), A)
    assert push == from_regex(AL, "b*", "channel")
    pop = regset.op_preimage(ChannelOp("pop", "b"), from_regex(AL, "a*", "channel"))
    assert pop == from_regex(AL, "a*b", "channel")


@pytest.mark.parametrize("op", [NOP, ChannelOp("push", "a"),
                                ChannelOp("push", "b"),
                                ChannelOp("pop", "a"), ChannelOp("pop", "b")])
def test_op_preimage_enumeration_oracle(op):
    A = from_regex(AL, "(a|b)*a | b", "channel")
    pre = regset.op_preimage(op, A)
    for mu in words(AL, 4):
        after = op.apply(mu)
        expected = after is not None and A.contains(after)
        assert pre.contains(mu) == expected, (op, mu)


# -- boolean-algebra laws on random automata -------------------------------------


def _random_regular(rng) -> RegularSet:
    pats = ["l0.a*", "l0.(a|b)*", "l1.b*a", "l1.M*", "l2.(ab)*", "l2.a{1,2}",
            "L.M*b", "l0.ba*", "L.M{0,1}"]
    parts = [from_regex(AL, rng.choice(pats), "state")
             for _ in range(rng.randint(1, 3))]
    return regset.union_all(AL, "state", parts)


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=40, deadline=None)
def test_boolean_algebra_laws(seed):
    rng = random.Random(seed)
    A, B = _random_regular(rng), _random_regular(rng)
    # De Morgan
    assert regset.complement(regset.union(A, B)) == \
        regset.intersection(regset.complement(A), regset.complement(B))
    # idempotence, absorption
    assert regset.union(A, A) == A
    assert regset.intersection(A, regset.union(A, B)) == A
    assert regset.union(A, regset.intersection(A, B)) == A


def test_dot_export_smoke():
    A = from_regex(AL, "l0.a*", "state")
    dot = regset.to_dot(A)
    assert dot.startswith("digraph") and "->" in dot


def test_enumerate_ordering_channel_count():
    A = from_regex(AL, "l0.b*", "state")
    assert A.enumerate(2) == [("l0",), ("l0", "b"), ("l0", "b", "b")]

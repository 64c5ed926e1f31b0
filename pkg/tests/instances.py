"""Ten handcrafted bounded-channel one-player instances for the
solver-vs-controller-oracle equivalence suite: push-free or one-slot channels,
so the reachable state space under any strategy is finite and small."""

from fractions import Fraction

from lossygames.arena import Arena, ChannelOp, NOP, coalition_arena, validate
from lossygames.conjunction import Conjunction, Objective
from lossygames.regset import Alphabet, from_regex

H = Fraction(1, 2)
ONE = Fraction(1)


def _single_agent(locations, rows, messages=("m",), init="q0"):
    """One agent 'p' with actions x, y; rows maps (loc, act) -> entries."""
    alphabet = Alphabet(tuple(locations), tuple(messages))
    table = {}
    for l in locations:
        for act in ("x", "y"):
            entries = rows[(l, act)]
            table[(l, (act,))] = tuple(entries)
    arena = Arena(("p",), alphabet, init, {"p": ("x", "y")}, table)
    issues = validate(arena)
    assert not issues, issues
    return coalition_arena(arena, ["p"])


def _obj(game, quant, path, pattern):
    return Objective(quant, path, from_regex(game.alphabet, pattern, "state"),
                     label=f"{quant} {path} {pattern}")


def build_instances():
    """Returns a list of (name, game, conjunction, memory, channel_bound,
    expected_verdict)."""
    out = []

    # 1. deterministic reach: yes
    g = _single_agent(["q0", "q1"], {
        ("q0", "x"): [("q1", NOP, ONE)], ("q0", "y"): [("q0", NOP, ONE)],
        ("q1", "x"): [("q1", NOP, ONE)], ("q1", "y"): [("q1", NOP, ONE)]})
    out.append(("reach-yes", g, Conjunction([_obj(g, "AS", "F", "q1.M*")]),
                1, 0, True))

    # 2. unreachable target: no (both AS and NZ variants share the arena)
    g = _single_agent(["q0", "q1", "q2"], {
        ("q0", "x"): [("q1", NOP, ONE)], ("q0", "y"): [("q0", NOP, ONE)],
        ("q1", "x"): [("q1", NOP, ONE)], ("q1", "y"): [("q0", NOP, ONE)],
        ("q2", "x"): [("q2", NOP, ONE)], ("q2", "y"): [("q2", NOP, ONE)]})
    out.append(("reach-unreachable-no", g,
                Conjunction([_obj(g, "AS", "F", "q2.M*")]), 1, 0, False))
    out.append(("nz-reach-unreachable-no", g,
                Conjunction([_obj(g, "NZ", "F", "q2.M*")]), 1, 0, False))

    # 3. coin-flip reach, retry forever: almost-sure yes
    g = _single_agent(["q0", "q1"], {
        ("q0", "x"): [("q1", NOP, H), ("q0", NOP, H)],
        ("q0", "y"): [("q0", NOP, ONE)],
        ("q1", "x"): [("q1", NOP, ONE)], ("q1", "y"): [("q1", NOP, ONE)]})
    out.append(("reach-coin-yes", g, Conjunction([_obj(g, "AS", "F", "q1.M*")]),
                1, 0, True))

    # 4. safety with a safe choice: yes
    g = _single_agent(["q0", "q1", "q2"], {
        ("q0", "x"): [("q1", NOP, ONE)], ("q0", "y"): [("q2", NOP, ONE)],
        ("q1", "x"): [("q0", NOP, ONE)], ("q1", "y"): [("q1", NOP, ONE)],
        ("q2", "x"): [("q2", NOP, ONE)], ("q2", "y"): [("q2", NOP, ONE)]})
    out.append(("safe-yes", g, Conjunction([_obj(g, "AS", "G", "(q0|q1).M*")]),
                1, 0, True))

    # 5. safety with every action risky: no
    g5 = _single_agent(["q0", "q1", "q2"], {
        ("q0", "x"): [("q1", NOP, H), ("q2", NOP, H)],
        ("q0", "y"): [("q0", NOP, H), ("q2", NOP, H)],
        ("q1", "x"): [("q1", NOP, ONE)], ("q1", "y"): [("q1", NOP, ONE)],
        ("q2", "x"): [("q2", NOP, ONE)], ("q2", "y"): [("q2", NOP, ONE)]})
    out.append(("safe-no", g5, Conjunction([_obj(g5, "AS", "G", "(q0|q1).M*")]),
                2, 0, False))

    # 6. positive reach through a risky branch: yes
    out.append(("nz-reach-coin-yes", g5,
                Conjunction([_obj(g5, "NZ", "F", "q2.M*")]), 1, 0, True))

    # 7. positive safety by stalling: yes; with a forced leak: no
    g = _single_agent(["q0", "q1"], {
        ("q0", "x"): [("q0", NOP, ONE)], ("q0", "y"): [("q1", NOP, ONE)],
        ("q1", "x"): [("q1", NOP, ONE)], ("q1", "y"): [("q1", NOP, ONE)]})
    out.append(("nz-safe-yes", g, Conjunction([_obj(g, "NZ", "G", "q0.M*")]),
                1, 0, True))
    g = _single_agent(["q0", "q1"], {
        ("q0", "x"): [("q0", NOP, H), ("q1", NOP, H)],
        ("q0", "y"): [("q1", NOP, ONE)],
        ("q1", "x"): [("q1", NOP, ONE)], ("q1", "y"): [("q1", NOP, ONE)]})
    out.append(("nz-safe-leak-no", g, Conjunction([_obj(g, "NZ", "G", "q0.M*")]),
                2, 0, False))

    # 8. two-conjunct mix: reach q1 while staying out of q2
    g = _single_agent(["q0", "q1", "q2"], {
        ("q0", "x"): [("q1", NOP, ONE)], ("q0", "y"): [("q2", NOP, ONE)],
        ("q1", "x"): [("q1", NOP, ONE)], ("q1", "y"): [("q2", NOP, ONE)],
        ("q2", "x"): [("q2", NOP, ONE)], ("q2", "y"): [("q2", NOP, ONE)]})
    out.append(("reach-and-safe-yes", g,
                Conjunction([_obj(g, "AS", "F", "q1.M*"),
                             _obj(g, "AS", "G", "(q0|q1).M*")]), 1, 0, True))

    # 9. reach almost surely while keeping a positive chance of never
    # touching it: contradictory on a single absorbing target
    out.append(("reach-vs-nzbox-no", g,
                Conjunction([_obj(g, "AS", "F", "q1.M*"),
                             _obj(g, "NZ", "G", "(q0|q2).M*")]), 2, 0, False))

    # 10. one-slot channel with losses: the pop may become undefined, so
    # delivery is positive but not almost sure
    push = ChannelOp("push", "m")
    pop = ChannelOp("pop", "m")
    g = _single_agent(["q0", "q1", "q2"], {
        ("q0", "x"): [("q1", push, ONE)], ("q0", "y"): [("q0", NOP, ONE)],
        ("q1", "x"): [("q2", pop, ONE)], ("q1", "y"): [("q1", NOP, ONE)],
        ("q2", "x"): [("q2", NOP, ONE)], ("q2", "y"): [("q2", NOP, ONE)]})
    out.append(("push-pop-nz-yes", g,
                Conjunction([_obj(g, "NZ", "F", "q2.M*")]), 1, 1, True))
    out.append(("push-pop-as-no", g,
                Conjunction([_obj(g, "AS", "F", "q2.M*")]), 2, 1, False))

    return out

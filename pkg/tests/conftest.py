import itertools
import random
from fractions import Fraction

import pytest

from lossygames import modelio
from lossygames.arena import Arena, ChannelOp, NOP, validate
from lossygames.regset import Alphabet


@pytest.fixture(scope="session")
def fig2():
    return modelio.load_model("fig2")


@pytest.fixture(scope="session")
def fig3():
    return modelio.load_model("fig3")


def states_up_to(alphabet, max_len):
    for l in alphabet.locations:
        for n in range(max_len + 1):
            for combo in itertools.product(alphabet.messages, repeat=n):
                yield (l,) + combo


def random_small_arena(rng: random.Random) -> Arena:
    """Validated random 2-player arena: 2 locations, 2 messages, 2 actions
    per agent, rows mixing pushes, pops and stochastic splits."""
    alphabet = Alphabet(("q0", "q1"), ("m", "n"))
    actions = {"one": ("xa", "xb"), "two": ("ya", "yb")}
    while True:
        table = {}
        for l in alphabet.locations:
            for joint in itertools.product(actions["one"], actions["two"]):
                entries = []
                k = rng.choice([1, 1, 2])
                probs = [Fraction(1)] if k == 1 else [Fraction(1, 2)] * 2
                for p in probs:
                    target = rng.choice(alphabet.locations)
                    op = rng.choice([NOP, NOP,
                                     ChannelOp("push", rng.choice(alphabet.messages)),
                                     ChannelOp("pop", rng.choice(alphabet.messages))])
                    entries.append((target, op, p))
                table[(l, joint)] = tuple(entries)
        arena = Arena(("one", "two"), alphabet, "q0", actions, table)
        if not validate(arena):
            return arena


def random_arenas(seed: int, count: int):
    rng = random.Random(seed)
    return [random_small_arena(rng) for _ in range(count)]

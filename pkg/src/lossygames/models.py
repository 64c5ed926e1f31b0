"""Bundled example models.

`transmission` (fig2-style): a sender emitting a/b messages against an
attacker who may scramble a matching message into c, pop a trailing c to end
the game, or wait. The attacker cannot interfere twice in a row: from the
post-push location its a action behaves like waiting.

`mitm` (fig3-style): sender S, receiver R and attacker A over one channel. A
message goes through as sent unless A picks the sender's letter, which turns
it into c. R's dequeue pops the requested letter and ends in the delivered
location; reset returns to the start. The transition sketch this follows is a
fragment; rows it leaves open are completed as: no send means nothing happens,
a send without a request is dropped (nop), and at request-pending locations
only R's action matters.
"""

from __future__ import annotations

TRANSMISSION = """\
# two-player transmission/scrambling game
agents sender attacker
messages a b c
locations l0 l1 l2
init l0
actions sender : sa sb
actions attacker : a b w

# l0: attacker may wait (w) or guess (a/b); a correct guess scrambles into c.
# An a-message sent past a waiting attacker transmits (moves to l1), so
# waiting cannot block the protocol forever; a b-send against a wait idles.
row l0 (sa,w) -> 1 : l1 push a
row l0 (sb,w) -> 1 : l0 push b
row l0 (sa,a) -> 1 : l1 push c
row l0 (sb,a) -> 1 : l1 push b
row l0 (sa,b) -> 1 : l1 push a
row l0 (sb,b) -> 1 : l1 push c

# l1: no second interference; attacker's b reads a trailing c
row l1 (sa,w) -> 1 : l0 push a
row l1 (sb,w) -> 1 : l0 push b
row l1 (sa,a) -> 1 : l0 push a
row l1 (sb,a) -> 1 : l0 push b
row l1 (sa,b) -> 1 : l2 pop c
row l1 (sb,b) -> 1 : l2 pop c

# l2: sink
row l2 (sa,w) -> 1 : l2 nop
row l2 (sb,w) -> 1 : l2 nop
row l2 (sa,a) -> 1 : l2 nop
row l2 (sb,a) -> 1 : l2 nop
row l2 (sa,b) -> 1 : l2 nop
row l2 (sb,b) -> 1 : l2 nop

goal sender : AS F "l1.aaa | l2.M*"
goal attacker : AS G "(l0|l1).M*"

prop always : AS G "L.M*"
prop nzcc : NZ F "l2.c"
"""


def _mitm_rows() -> str:
    lines = []
    s_acts = ["sa", "sb", "sw"]
    r_acts = ["ra", "rb", "deq", "rst"]
    a_acts = ["ta", "tb", "tw"]
    match = {("sa", "ta"), ("sb", "tb")}
    sent = {"sa": "a", "sb": "b"}

    def row(loc, s, r, a, effect):
        lines.append(f"row {loc} ({s},{r},{a}) -> 1 : {effect}")

    for s in s_acts:
        for r in r_acts:
            for a in a_acts:
                if s == "sw":
                    row("l0", s, r, a, "l0 nop")
                elif r in ("deq", "rst"):
                    row("l0", s, r, a, "l0 nop")
                else:
                    msg = "c" if (s, a) in match else sent[s]
                    loc = "la" if r == "ra" else "lb"
                    row("l0", s, r, a, f"{loc} push {msg}")
    for loc, msg in (("la", "a"), ("lb", "b")):
        for s in s_acts:
            for r in r_acts:
                for a in a_acts:
                    if r == "deq":
                        row(loc, s, r, a, f"lF pop {msg}")
                    elif r == "rst":
                        row(loc, s, r, a, "l0 nop")
                    else:
                        row(loc, s, r, a, f"{loc} nop")
    for s in s_acts:
        for r in r_acts:
            for a in a_acts:
                row("lF", s, r, a, "lF nop")
    return "\n".join(lines)


MITM = f"""\
# three-player man-in-the-middle game (k = 2 channel bound in the goals)
agents S R A
messages a b c
locations l0 la lb lF
init l0
actions S : sa sb sw
actions R : ra rb deq rst
actions A : ta tb tw

{_mitm_rows()}

goal S : AS G "L.M{{0,2}}"
goal R : AS F "lF.M*"
goal A : not (S & R)

prop phiA : not (S & R)
prop phiSR : AS G "L.M{{0,2}}" & AS F "lF.M*"
"""


BUNDLED = {"fig2": TRANSMISSION, "transmission": TRANSMISSION,
           "fig3": MITM, "mitm": MITM}


def bundled_text(name: str) -> str:
    try:
        return BUNDLED[name]
    except KeyError:
        raise KeyError(f"no bundled model {name!r}; have {sorted(set(BUNDLED))}")

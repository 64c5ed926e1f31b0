"""Textual model format and the objective grammar.

Model files are line based:

    agents sender attacker
    messages a b c
    locations l0 l1 l2
    init l0
    actions sender : sa sb
    row l0 (sa,w) -> 1 : l0 push a        # or  1/2 : l1 nop ; 1/2 : l2 pop c
    goal sender : AS F "l1.aaa | l2.M*"
    goal A : not (S & R)
    prop phiA : not (S & R)

Objective atoms are `AS`/`NZ` applied to `F`, `G` or `GF` with a quoted state
regex; `&` conjoins, `|` (properties only) disjoins, and `not (A & B)` expands
to the disjunction of the named agents' negated goals. Probabilities are exact
rationals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .arena import Arena, ArenaError, ChannelOp, NOP, Row
from .conjunction import Conjunction, FragmentError, Objective
from .core import GameSpec, NegationGoal, PropertySpec
from .regset import Alphabet, RegsetError, from_regex


class ParseError(ValueError):
    def __init__(self, msg: str, line: Optional[int] = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + msg)
        self.line = line


@dataclass
class ModelBundle:
    arena: Arena
    spec: GameSpec
    props: dict[str, PropertySpec]
    source: str


_ROW = re.compile(r"row\s+(\S+)\s+\(([^)]*)\)\s*->\s*(.*)$")
_EFFECT = re.compile(r"(\S+)\s*:\s*(\S+)\s+(nop|push\s+\S+|pop\s+\S+)\s*$")


def _parse_effects(text: str, line_no: int) -> Row:
    entries = []
    for chunk in text.split(";"):
        m = _EFFECT.match(chunk.strip())
        if not m:
            raise ParseError(f"bad transition entry {chunk.strip()!r}", line_no)
        prob = Fraction(m.group(1))
        loc = m.group(2)
        op_text = m.group(3).split()
        op = NOP if op_text[0] == "nop" else ChannelOp(op_text[0], op_text[1])
        entries.append((loc, op, prob))
    return tuple(entries)


def parse_model_text(text: str) -> ModelBundle:
    agents: list[str] = []
    messages: list[str] = []
    locations: list[str] = []
    init: Optional[str] = None
    actions: dict[str, tuple[str, ...]] = {}
    rows: dict = {}
    goal_lines: list[tuple[int, str, str]] = []
    prop_lines: list[tuple[int, str, str]] = []

    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "agents":
            agents = rest.split()
        elif head == "messages":
            messages = rest.split()
        elif head == "locations":
            locations = rest.split()
        elif head == "init":
            init = rest
        elif head == "actions":
            name, _, acts = rest.partition(":")
            actions[name.strip()] = tuple(acts.split())
        elif head == "row":
            m = _ROW.match(line)
            if not m:
                raise ParseError(f"bad row syntax {line!r}", no)
            loc = m.group(1)
            joint = tuple(a.strip() for a in m.group(2).split(","))
            rows[(loc, joint)] = _parse_effects(m.group(3), no)
        elif head == "goal":
            name, _, expr = rest.partition(":")
            goal_lines.append((no, name.strip(), expr.strip()))
        elif head == "prop":
            name, _, expr = rest.partition(":")
            prop_lines.append((no, name.strip(), expr.strip()))
        else:
            raise ParseError(f"unknown directive {head!r}", no)

    if not agents or not messages or not locations or init is None:
        raise ParseError("model needs agents, messages, locations and init")
    try:
        alphabet = Alphabet(tuple(locations), tuple(messages))
        arena = Arena(tuple(agents), alphabet, init, actions, rows)
    except (RegsetError, ArenaError) as e:
        raise ParseError(str(e))

    goals: dict = {}
    for no, name, expr in goal_lines:
        if name not in agents:
            raise ParseError(f"goal for unknown agent {name!r}", no)
        neg = _parse_negation(expr)
        if neg is not None:
            goals[name] = NegationGoal(neg, label=expr)
        else:
            conj = parse_conjunction(expr, alphabet)
            if len(conj.items) != 1:
                raise ParseError("one objective per goal", no)
            goals[name] = conj.items[0]
    try:
        spec = GameSpec(arena, goals) if goals else None
    except FragmentError as e:
        raise ParseError(str(e))

    props: dict[str, PropertySpec] = {}
    for no, name, expr in prop_lines:
        if spec is None:
            raise ParseError("properties need a goals block", no)
        props[name] = parse_property(expr, alphabet, spec)
    return ModelBundle(arena, spec, props, text)


def load_model(path_or_name: str) -> ModelBundle:
    from . import models
    if path_or_name in models.BUNDLED:
        return parse_model_text(models.bundled_text(path_or_name))
    with open(path_or_name, "r", encoding="utf-8") as fh:
        return parse_model_text(fh.read())


# -- objective expressions -----------------------------------------------------

_NOT = re.compile(r"^not\s*\(\s*([^)]+?)\s*\)$")
_ATOM = re.compile(r"^(AS|NZ)\s+(GF|F|G)\s+(\"[^\"]*\"|'[^']*')$")


def _parse_negation(expr: str) -> Optional[tuple[str, ...]]:
    m = _NOT.match(expr.strip())
    if not m:
        return None
    names = tuple(p.strip() for p in m.group(1).split("&"))
    if not all(names):
        raise ParseError(f"bad negation {expr!r}")
    return names


def parse_atom(text: str, alphabet: Alphabet) -> Objective:
    m = _ATOM.match(text.strip())
    if not m:
        raise ParseError(
            f"bad objective atom {text.strip()!r} (expected AS|NZ F|G|GF "
            f"\"regex\")")
    quant, path, quoted = m.groups()
    pattern = quoted[1:-1]
    try:
        region = from_regex(alphabet, pattern, "state")
    except RegsetError as e:
        raise ParseError(f"in {text.strip()!r}: {e}")
    return Objective(quant, path, region, label=f"{quant} {path} \"{pattern}\"")


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur, quote = [], 0, [], None
    for ch in text:
        if quote:
            cur.append(ch)
            if ch == quote:
                quote = None
            continue
        if ch in "\"'":
            quote = ch
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def parse_conjunction(text: str, alphabet: Alphabet) -> Conjunction:
    items = [parse_atom(p, alphabet) for p in _split_top(text, "&")]
    return Conjunction(items)


def parse_property(text: str, alphabet: Alphabet,
                   spec: Optional[GameSpec] = None) -> PropertySpec:
    """DNF property: `|` over `&` over atoms; `not (A & B)` expands through
    the named agents' goals."""
    branches: list[list[Objective]] = []
    for disjunct in _split_top(text, "|"):
        expanded: list[list[Objective]] = [[]]
        for part in _split_top(disjunct, "&"):
            neg = _parse_negation(part)
            if neg is not None:
                if spec is None:
                    raise ParseError("negation form needs a game context")
                for a in neg:
                    if not isinstance(spec.goals.get(a), Objective):
                        raise ParseError(f"negation over unknown or non-fragment "
                                         f"goal {a!r}")
                alts = [[spec.goals[a].negate()] for a in neg]
            else:
                alts = [[parse_atom(part, alphabet)]]
            expanded = [b + alt for b in expanded for alt in alts]
        branches.extend(expanded)
    return PropertySpec(branches, label=text)


# -- printing --------------------------------------------------------------------


def format_objective(o: Objective) -> str:
    return o.label or f"{o.quant} {o.path} <region>"


def format_model(bundle: ModelBundle) -> str:
    """Canonical re-print (normalizing whitespace and row order)."""
    a = bundle.arena
    out = [f"agents {' '.join(a.agents)}",
           f"messages {' '.join(a.alphabet.messages)}",
           f"locations {' '.join(a.alphabet.locations)}",
           f"init {a.initial_location}"]
    for ag in a.agents:
        out.append(f"actions {ag} : {' '.join(a.actions[ag])}")
    for (loc, joint) in sorted(a.table):
        row = a.table[(loc, joint)]
        eff = " ; ".join(f"{p} : {l2} {op}" for (l2, op, p) in row)
        out.append(f"row {loc} ({','.join(joint)}) -> {eff}")
    if bundle.spec is not None:
        for ag in a.agents:
            g = bundle.spec.goals[ag]
            text = g.describe() if isinstance(g, NegationGoal) else g.label
            out.append(f"goal {ag} : {text}")
    for name, prop in bundle.props.items():
        out.append(f"prop {name} : {prop.label}")
    return "\n".join(out) + "\n"

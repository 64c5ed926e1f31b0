"""Regular-language engine over location/message alphabets.

State sets live in L·M* (one leading location symbol, then messages), channel
sets in M*. Everything is an NFA under the hood; comparisons go through a
canonical minimal DFA that is cached per set, so language equality doubles as
hashing and the fixpoint engines get their equality checks for free.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

Word = tuple[str, ...]


class RegsetError(ValueError):
    pass


@dataclass(frozen=True)
class Alphabet:
    """Disjoint location and message symbol sets."""

    locations: tuple[str, ...]
    messages: tuple[str, ...]

    def __post_init__(self):
        locs, msgs = set(self.locations), set(self.messages)
        if not locs or not msgs:
            raise RegsetError("alphabet needs at least one location and one message")
        if locs & msgs:
            raise RegsetError(f"location/message overlap: {sorted(locs & msgs)}")
        for sym in locs | msgs:
            if not sym or sym in ("L", "M"):
                raise RegsetError(f"reserved or empty symbol name: {sym!r}")

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.locations + self.messages

    def is_location(self, sym: str) -> bool:
        return sym in self.locations

    def check_word(self, word: Sequence[str], kind: str) -> Word:
        word = tuple(word)
        if kind == "state":
            if not word or not self.is_location(word[0]):
                raise RegsetError(f"state word must start with a location: {word}")
            rest = word[1:]
        else:
            rest = word
        for sym in rest:
            if sym not in self.messages:
                raise RegsetError(f"not a message symbol: {sym!r} in {word}")
        return word


class NFA:
    """Plain NFA with multiple initial states and epsilon moves (label None)."""

    __slots__ = ("n", "initial", "accepting", "edges", "_cooked")

    def __init__(self, n: int, initial: Iterable[int], accepting: Iterable[int],
                 edges: Iterable[tuple[int, Optional[str], int]]):
        self.n = n
        self.initial = frozenset(initial)
        self.accepting = frozenset(accepting)
        self.edges = frozenset(edges)
        self._cooked: Optional["NFA"] = None

    def cooked(self) -> "NFA":
        """Epsilon-free trimmed form, cached (NFAs are immutable)."""
        if self._cooked is None:
            out = self.without_eps().trim()
            out._cooked = out
            self._cooked = out
        return self._cooked

    @staticmethod
    def empty() -> "NFA":
        return NFA(1, [0], [], [])

    @staticmethod
    def epsilon_word() -> "NFA":
        return NFA(1, [0], [0], [])

    @staticmethod
    def letter(sym: str) -> "NFA":
        return NFA(2, [0], [1], [(0, sym, 1)])

    @staticmethod
    def letters(syms: Iterable[str]) -> "NFA":
        return NFA(2, [0], [1], [(0, s, 1) for s in syms])

    @staticmethod
    def word(word: Sequence[str]) -> "NFA":
        edges = [(i, s, i + 1) for i, s in enumerate(word)]
        return NFA(len(word) + 1, [0], [len(word)], edges)

    def shift(self, off: int) -> list[tuple[int, Optional[str], int]]:
        return [(p + off, a, q + off) for (p, a, q) in self.edges]

    def union(self, other: "NFA") -> "NFA":
        off = self.n
        return NFA(self.n + other.n,
                   set(self.initial) | {q + off for q in other.initial},
                   set(self.accepting) | {q + off for q in other.accepting},
                   list(self.edges) + other.shift(off))

    def concat(self, other: "NFA") -> "NFA":
        off = self.n
        edges = list(self.edges) + other.shift(off)
        edges += [(f, None, i + off) for f in self.accepting for i in other.initial]
        return NFA(self.n + other.n, self.initial,
                   {q + off for q in other.accepting}, edges)

    def star(self) -> "NFA":
        # fresh initial-accepting state, loop back from accepting states
        s = self.n
        edges = list(self.edges) + [(s, None, i) for i in self.initial]
        edges += [(f, None, s) for f in self.accepting]
        return NFA(self.n + 1, [s], [s], edges)

    def repeat(self, lo: int, hi: Optional[int]) -> "NFA":
        if hi is None:
            base = NFA.epsilon_word() if lo == 0 else self._power(lo)
            return base.concat(self.star())
        if hi < lo:
            raise RegsetError(f"bad repetition bounds {{{lo},{hi}}}")
        out = self._power(lo)
        opt = self.union(NFA.epsilon_word())
        for _ in range(hi - lo):
            out = out.concat(opt)
        return out

    def _power(self, k: int) -> "NFA":
        out = NFA.epsilon_word()
        for _ in range(k):
            out = out.concat(self)
        return out

    # -- epsilon-free view -------------------------------------------------
    def eps_closure(self, states: frozenset[int], eps: dict[int, list[int]]) -> frozenset[int]:
        seen = set(states)
        stack = list(states)
        while stack:
            p = stack.pop()
            for q in eps.get(p, ()):
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return frozenset(seen)

    def _tables(self):
        eps: dict[int, list[int]] = {}
        delta: dict[tuple[int, str], set[int]] = {}
        for (p, a, q) in self.edges:
            if a is None:
                eps.setdefault(p, []).append(q)
            else:
                delta.setdefault((p, a), set()).add(q)
        return eps, delta

    def without_eps(self) -> "NFA":
        eps, delta = self._tables()
        if not eps:
            return self
        closures = {p: self.eps_closure(frozenset([p]), eps) for p in range(self.n)}
        edges = set()
        for (p, a), qs in delta.items():
            for src in range(self.n):
                if p in closures[src]:
                    for q in qs:
                        edges.add((src, a, q))
        accepting = {p for p in range(self.n) if closures[p] & self.accepting}
        initial = set(self.initial)
        return NFA(self.n, initial, accepting, edges)

    def trim(self) -> "NFA":
        eps, delta = self._tables()
        fwd: dict[int, set[int]] = {}
        bwd: dict[int, set[int]] = {}
        for (p, a, q) in self.edges:
            fwd.setdefault(p, set()).add(q)
            bwd.setdefault(q, set()).add(p)
        reach = set()
        stack = list(self.initial)
        while stack:
            p = stack.pop()
            if p in reach:
                continue
            reach.add(p)
            stack.extend(fwd.get(p, ()))
        live = set()
        stack = [q for q in self.accepting if q in reach]
        while stack:
            p = stack.pop()
            if p in live:
                continue
            live.add(p)
            stack.extend(q for q in bwd.get(p, ()) if q in reach)
        keep = sorted(live)
        remap = {p: i for i, p in enumerate(keep)}
        return NFA(len(keep),
                   [remap[p] for p in self.initial if p in live],
                   [remap[p] for p in self.accepting if p in live],
                   [(remap[p], a, remap[q]) for (p, a, q) in self.edges
                    if p in live and q in live])

    def rename(self, table: dict[str, str]) -> "NFA":
        return NFA(self.n, self.initial, self.accepting,
                   [(p, table.get(a, a) if a is not None else None, q)
                    for (p, a, q) in self.edges])


@dataclass(frozen=True)
class DFA:
    """Complete canonical DFA: state 0 initial, transitions dense over symbols."""

    symbols: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]   # table[state][symbol_index]
    accepting: frozenset[int]

    def accepts(self, word: Sequence[str]) -> bool:
        idx = {s: i for i, s in enumerate(self.symbols)}
        q = 0
        for sym in word:
            if sym not in idx:
                return False
            q = self.table[q][idx[sym]]
        return q in self.accepting

    @property
    def n(self) -> int:
        return len(self.table)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(repr((self.symbols, self.table, sorted(self.accepting))).encode())
        return h.hexdigest()

    def is_empty(self) -> bool:
        return not self.accepting


def _dfa_to_nfa(dfa: DFA) -> NFA:
    edges = [(p, sym, dfa.table[p][i])
             for p in range(dfa.n) for i, sym in enumerate(dfa.symbols)]
    return NFA(max(dfa.n, 1), [0] if dfa.n else [], dfa.accepting, edges).trim()


def _determinize(nfa: NFA, symbols: tuple[str, ...]) -> DFA:
    nfa = nfa.cooked()
    delta: dict[tuple[int, str], set[int]] = {}
    for (p, a, q) in nfa.edges:
        delta.setdefault((p, a), set()).add(q)
    start = frozenset(nfa.initial)
    states = {start: 0}
    order = [start]
    table: list[list[int]] = []
    i = 0
    while i < len(order):
        cur = order[i]
        row = []
        for sym in symbols:
            nxt = frozenset().union(*(delta.get((p, sym), set()) for p in cur)) if cur else frozenset()
            if nxt not in states:
                states[nxt] = len(order)
                order.append(nxt)
            row.append(states[nxt])
        table.append(row)
        i += 1
    accepting = frozenset(states[s] for s in order if s & nfa.accepting)
    return _minimize(DFA(symbols, tuple(tuple(r) for r in table), accepting))


def _minimize(dfa: DFA) -> DFA:
    n = dfa.n
    if n == 0:
        return dfa
    # Moore partition refinement
    part = [0 if q in dfa.accepting else 1 for q in range(n)]
    nsyms = len(dfa.symbols)
    while True:
        sig = {}
        newpart = []
        for q in range(n):
            key = (part[q],) + tuple(part[dfa.table[q][a]] for a in range(nsyms))
            if key not in sig:
                sig[key] = len(sig)
            newpart.append(sig[key])
        if newpart == part:
            break
        part = newpart
    # canonical renumbering by BFS from the initial block
    block_table: dict[int, tuple[int, ...]] = {}
    block_acc = set()
    for q in range(n):
        b = part[q]
        if b not in block_table:
            block_table[b] = tuple(part[dfa.table[q][a]] for a in range(nsyms))
            if q in dfa.accepting:
                block_acc.add(b)
    order = {part[0]: 0}
    queue = [part[0]]
    while queue:
        b = queue.pop(0)
        for nb in block_table[b]:
            if nb not in order:
                order[nb] = len(order)
                queue.append(nb)
    # drop unreachable blocks
    table = [None] * len(order)
    accepting = set()
    for b, i in order.items():
        table[i] = tuple(order[nb] for nb in block_table[b])
        if b in block_acc:
            accepting.add(i)
    return DFA(dfa.symbols, tuple(table), frozenset(accepting))


_UNIVERSES: dict = {}
_COMPLEMENTS: dict = {}
_UPCLOSURES: dict = {}


class RegularSet:
    """A regular set of states (kind='state', language ⊆ L·M*) or channel
    words (kind='channel', language ⊆ M*). Equality is language equality."""

    __slots__ = ("alphabet", "kind", "nfa", "_dfa")

    def __init__(self, alphabet: Alphabet, kind: str, nfa: NFA):
        if kind not in ("state", "channel"):
            raise RegsetError(f"bad kind {kind!r}")
        self.alphabet = alphabet
        self.kind = kind
        self.nfa = nfa
        self._dfa: Optional[DFA] = None

    # -- constructors ------------------------------------------------------
    @staticmethod
    def empty(alphabet: Alphabet, kind: str) -> "RegularSet":
        return RegularSet(alphabet, kind, NFA.empty())

    @staticmethod
    def universe(alphabet: Alphabet, kind: str) -> "RegularSet":
        key = (alphabet, kind)
        if key not in _UNIVERSES:
            msgs = NFA.letters(alphabet.messages).star()
            if kind == "state":
                nfa = NFA.letters(alphabet.locations).concat(msgs)
            else:
                nfa = msgs
            _UNIVERSES[key] = RegularSet(alphabet, kind, nfa)
        return _UNIVERSES[key]

    @staticmethod
    def from_words(alphabet: Alphabet, kind: str, words: Iterable[Sequence[str]]) -> "RegularSet":
        out = NFA.empty()
        for w in words:
            out = out.union(NFA.word(alphabet.check_word(w, kind)))
        return RegularSet(alphabet, kind, out)

    @staticmethod
    def state(alphabet: Alphabet, location: str, channel: "RegularSet") -> "RegularSet":
        """l · C for a channel set C."""
        if channel.kind != "channel":
            raise RegsetError("need a channel set")
        if location not in alphabet.locations:
            raise RegsetError(f"undeclared location {location!r}")
        return RegularSet(alphabet, "state", NFA.letter(location).concat(channel.nfa))

    # -- canonical form ----------------------------------------------------
    @property
    def dfa(self) -> DFA:
        if self._dfa is None:
            self._dfa = _determinize(self._shaped_nfa(), self.alphabet.symbols)
            # adopt the trimmed canonical automaton as the working form so
            # later products build on minimal machines
            self.nfa = _dfa_to_nfa(self._dfa)
        return self._dfa

    def _shaped_nfa(self) -> NFA:
        # intersect with the kind universe so junk words never leak into the
        # canonical form (constructions like self-loop closures may produce
        # ill-shaped words before shaping)
        uni = RegularSet.universe(self.alphabet, self.kind)
        return _product_nfa(self.nfa, uni.nfa)

    def digest(self) -> str:
        return self.dfa.digest()

    def __eq__(self, other):
        if not isinstance(other, RegularSet):
            return NotImplemented
        return (self.alphabet, self.kind) == (other.alphabet, other.kind) and \
            self.digest() == other.digest()

    def __hash__(self):
        return hash((self.alphabet, self.kind, self.digest()))

    def __repr__(self):
        sample = [" ".join(w) or "ε" for w in self.enumerate(2)]
        more = "..." if len(sample) == 6 else ""
        return f"<RegularSet {self.kind} {{{', '.join(sample[:6])}{more}}}>"

    # -- queries -------------------------------------------------------------
    def is_empty(self) -> bool:
        return self.dfa.is_empty()

    def contains(self, word: Sequence[str]) -> bool:
        word = self.alphabet.check_word(word, self.kind)
        return self.dfa.accepts(word)

    def enumerate(self, max_len: int) -> list[Word]:
        """Members whose message length is ≤ max_len, in length-lex order.

        For state sets the leading location does not count toward the length;
        symbols are ordered as declared (locations first, then messages)."""
        if max_len < 0:
            raise RegsetError("max_len must be ≥ 0")
        dfa = self.dfa
        idx = {s: i for i, s in enumerate(dfa.symbols)}
        out: list[Word] = []
        if self.kind == "state":
            starts = [(dfa.table[0][idx[l]], (l,)) for l in self.alphabet.locations]
        else:
            starts = [(0, ())]
        frontier = starts
        budget = max_len
        while budget >= 0:
            for q, w in frontier:
                if q in dfa.accepting:
                    out.append(w)
            budget -= 1
            if budget < 0:
                break
            frontier = [(dfa.table[q][idx[m]], w + (m,))
                        for q, w in frontier for m in self.alphabet.messages]
        return out


def _product_nfa(a: NFA, b: NFA) -> NFA:
    a = a.cooked()
    b = b.cooked()
    ad: dict[int, list[tuple[str, int]]] = {}
    for (p, s, q) in a.edges:
        ad.setdefault(p, []).append((s, q))
    bd: dict[tuple[int, str], list[int]] = {}
    for (p, s, q) in b.edges:
        bd.setdefault((p, s), []).append(q)
    states: dict[tuple[int, int], int] = {}
    edges = []
    order: list[tuple[int, int]] = []

    def sid(pq):
        if pq not in states:
            states[pq] = len(states)
            order.append(pq)
        return states[pq]

    for i in a.initial:
        for j in b.initial:
            sid((i, j))
    k = 0
    while k < len(order):
        (p1, p2) = order[k]
        src = states[(p1, p2)]
        for (s, q) in ad.get(p1, ()):
            for q2 in bd.get((p2, s), ()):
                edges.append((src, s, sid((q, q2))))
        k += 1
    accepting = [states[(p, q)] for (p, q) in order
                 if p in a.accepting and q in b.accepting]
    initial = [states[(i, j)] for i in a.initial for j in b.initial]
    return NFA(len(states), initial, accepting, edges)


def _check_same(a: RegularSet, b: RegularSet):
    if a.alphabet != b.alphabet or a.kind != b.kind:
        raise RegsetError("alphabet or kind mismatch")


# -- boolean algebra -------------------------------------------------------

_REDUCE_EDGES = 160


def _reduced(rs: RegularSet) -> RegularSet:
    """Swap in the canonical minimal automaton when the working NFA has grown
    (keeps every machine near-minimal throughout the fixpoints)."""
    if len(rs.nfa.edges) > _REDUCE_EDGES:
        rs.dfa
    return rs


def union(a: RegularSet, b: RegularSet) -> RegularSet:
    _check_same(a, b)
    return _reduced(RegularSet(a.alphabet, a.kind, a.nfa.union(b.nfa)))


def union_all(alphabet: Alphabet, kind: str, sets: Iterable[RegularSet]) -> RegularSet:
    out = RegularSet.empty(alphabet, kind)
    for s in sets:
        out = union(out, s)
    return out


def intersection(a: RegularSet, b: RegularSet) -> RegularSet:
    _check_same(a, b)
    return _reduced(RegularSet(a.alphabet, a.kind, _product_nfa(a.nfa, b.nfa)))


def complement(a: RegularSet) -> RegularSet:
    """Complement within the kind universe (L·M* or M*)."""
    key = (a.alphabet, a.kind, a.digest())
    if key in _COMPLEMENTS:
        return _COMPLEMENTS[key]
    dfa = a.dfa
    n = max(dfa.n, 1)
    edges = []
    for p in range(dfa.n):
        for i, sym in enumerate(dfa.symbols):
            edges.append((p, sym, dfa.table[p][i]))
    flipped = NFA(n, [0], [q for q in range(dfa.n) if q not in dfa.accepting], edges)
    out = RegularSet(a.alphabet, a.kind, flipped)
    out = intersection(out, RegularSet.universe(a.alphabet, a.kind))
    _COMPLEMENTS[key] = out
    return out


def difference(a: RegularSet, b: RegularSet) -> RegularSet:
    _check_same(a, b)
    return intersection(a, complement(b))


def combine(op: str, a: RegularSet, b: Optional[RegularSet] = None) -> RegularSet:
    """Dispatch form used by the CLI and tests."""
    if op == "complement":
        if b is not None:
            raise RegsetError("complement takes one argument")
        return complement(a)
    if b is None:
        raise RegsetError(f"{op} needs two arguments")
    return {"union": union, "intersection": intersection, "difference": difference}[op](a, b)


@dataclass(frozen=True)
class CompareResult:
    disjoint: bool
    subset: bool       # A ⊆ B
    equal: bool
    left_empty: bool


_SUBSETS: dict = {}


def is_subset(a: RegularSet, b: RegularSet) -> bool:
    _check_same(a, b)
    key = (a.digest(), b.digest())
    if key not in _SUBSETS:
        _SUBSETS[key] = difference(a, b).is_empty()
    return _SUBSETS[key]


def compare(a: RegularSet, b: RegularSet) -> CompareResult:
    _check_same(a, b)
    sub = is_subset(a, b)
    eq = sub and is_subset(b, a)
    return CompareResult(disjoint=intersection(a, b).is_empty(),
                         subset=sub, equal=eq, left_empty=a.is_empty())


# -- orders and closures ---------------------------------------------------

def subword_le(u: Sequence[str], v: Sequence[str]) -> bool:
    """u ⪯ v (scattered subword)."""
    it = iter(v)
    return all(any(c == d for d in it) for c in u)


def state_le(s: Sequence[str], t: Sequence[str]) -> bool:
    """s ⊑ t: subword, same location, channels equal or sharing a last letter
    (last(ε) = ε, so l·ε relates only to l·ε)."""
    if not s or not t or s[0] != t[0]:
        return False
    mu, nu = tuple(s[1:]), tuple(t[1:])
    if not subword_le(mu, nu):
        return False
    if mu == nu:
        return True
    if not mu or not nu:
        return False
    return mu[-1] == nu[-1]


def _selfloops_messages(a: RegularSet) -> NFA:
    nfa = a.nfa.cooked()
    edges = set(nfa.edges)
    for p in range(nfa.n):
        for m in a.alphabet.messages:
            edges.add((p, m, p))
    return NFA(nfa.n, nfa.initial, nfa.accepting, edges)


def up_closure_subword(a: RegularSet) -> RegularSet:
    """↑_⪯ A: message letters may be inserted anywhere (shape preserved)."""
    key = (a.alphabet, a.kind, a.digest())
    if key in _UPCLOSURES:
        return _UPCLOSURES[key]
    out = RegularSet(a.alphabet, a.kind, _selfloops_messages(a))
    out = intersection(out, RegularSet.universe(a.alphabet, a.kind))
    _UPCLOSURES[key] = out
    return out


def _right_quotient_letter(a: RegularSet, m: str) -> RegularSet:
    """{w : w·m ∈ A}."""
    nfa = a.nfa.cooked()
    accepting = {p for (p, s, q) in nfa.edges if s == m and q in nfa.accepting}
    return RegularSet(a.alphabet, a.kind, NFA(nfa.n, nfa.initial, accepting, nfa.edges))


def _concat_letter(a: RegularSet, m: str) -> RegularSet:
    return RegularSet(a.alphabet, a.kind, a.nfa.concat(NFA.letter(m)))


def up_closure_state_order(a: RegularSet) -> RegularSet:
    """↑_⊑ A for a state set: per trailing letter m, ↑_⪯(A·m⁻¹)·m; the empty
    channel relates only to itself."""
    if a.kind != "state":
        raise RegsetError("⊑ applies to state sets only")
    ends_eps = intersection(a, RegularSet(a.alphabet, "state",
                                          NFA.letters(a.alphabet.locations)))
    parts = [ends_eps]
    for m in a.alphabet.messages:
        parts.append(_concat_letter(up_closure_subword(_right_quotient_letter(a, m)), m))
    return union_all(a.alphabet, "state", parts)


def up_closure(a: RegularSet, order: str) -> RegularSet:
    if order == "subword":
        return up_closure_subword(a)
    if order == "state":
        return up_closure_state_order(a)
    raise RegsetError(f"unknown order {order!r}")


def minimal_elements(a: RegularSet, order: str, probe_len: int) -> list[Word]:
    """Order-minimal members among those with message length ≤ probe_len."""
    words = a.enumerate(probe_len)
    if a.kind == "channel":
        le = subword_le
    elif order == "state":
        le = state_le
    else:
        le = lambda s, t: s[0] == t[0] and subword_le(s[1:], t[1:])
    return [w for w in words
            if not any(v != w and le(v, w) for v in words)]


# -- residuals and channel-operation preimages -------------------------------

def residual_location(a: RegularSet, location: str) -> RegularSet:
    """{μ : l·μ ∈ A} as a channel set."""
    if a.kind != "state":
        raise RegsetError("residual_location needs a state set")
    if location not in a.alphabet.locations:
        raise RegsetError(f"undeclared location {location!r}")
    nfa = a.nfa.cooked()
    initial = {q for (p, s, q) in nfa.edges if s == location and p in nfa.initial}
    return RegularSet(a.alphabet, "channel", NFA(nfa.n, initial, nfa.accepting, nfa.edges))


def op_preimage(op, a: RegularSet) -> RegularSet:
    """f⁻¹(A) for a channel operation f.

    nop: A; push m (prepend): {μ : m·μ ∈ A}; pop m (drop trailing m): A·m,
    which also encodes where the pop is defined."""
    from .arena import ChannelOp  # local import to avoid a cycle
    if a.kind != "channel":
        raise RegsetError("op_preimage needs a channel set")
    assert isinstance(op, ChannelOp)
    if op.tag == "nop":
        return a
    if op.tag == "push":
        nfa = a.nfa.cooked()
        initial = set()
        for (p, s, q) in nfa.edges:
            if s == op.message and p in nfa.initial:
                initial.add(q)
        return RegularSet(a.alphabet, "channel", NFA(nfa.n, initial, nfa.accepting, nfa.edges))
    return _concat_letter(a, op.message)


# -- regex parsing -----------------------------------------------------------

class _RegexParser:
    """alternation `|`, concatenation `.`/whitespace, `*`, `{m,n}`, `()`,
    classes `L` and `M`. Undeclared identifiers whose characters are all
    declared symbols are read as concatenations of those symbols."""

    def __init__(self, alphabet: Alphabet, text: str):
        self.alphabet = alphabet
        self.tokens = self._tokenize(text)
        self.pos = 0

    def _tokenize(self, text: str) -> list[tuple[str, str]]:
        toks = []
        i = 0
        while i < len(text):
            c = text[i]
            if c.isspace() or c == ".":
                if c == ".":
                    toks.append(("concat", "."))
                i += 1
                continue
            if c in "|*()":
                toks.append((c, c))
                i += 1
                continue
            if c == "{":
                j = text.index("}", i)
                toks.append(("repeat", text[i + 1:j]))
                i = j + 1
                continue
            if c.isalnum() or c in "_-'":
                j = i
                while j < len(text) and (text[j].isalnum() or text[j] in "_-'"):
                    j += 1
                run = text[i:j]
                if run in self.alphabet.symbols or run in ("L", "M"):
                    toks.append(("ident", run))
                elif all(ch in self.alphabet.symbols or ch in ("L", "M")
                         for ch in run):
                    toks.extend(("ident", ch) for ch in run)
                else:
                    raise RegsetError(f"undeclared symbol {run!r}")
                i = j
                continue
            raise RegsetError(f"bad regex character {c!r} at {i}")
        return toks

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def parse(self) -> NFA:
        out = self._alternation()
        if self.pos != len(self.tokens):
            raise RegsetError(f"trailing regex tokens at {self.pos}")
        return out

    def _alternation(self) -> NFA:
        out = self._concat()
        while self._peek()[0] == "|":
            self.pos += 1
            out = out.union(self._concat())
        return out

    def _concat(self) -> NFA:
        parts = []
        while True:
            kind, _ = self._peek()
            if kind in ("ident", "("):
                parts.append(self._postfix())
            elif kind == "concat":
                self.pos += 1
            else:
                break
        if not parts:
            return NFA.epsilon_word()
        out = parts[0]
        for p in parts[1:]:
            out = out.concat(p)
        return out

    def _postfix(self) -> NFA:
        out = self._atom()
        while True:
            kind, val = self._peek()
            if kind == "*":
                self.pos += 1
                out = out.star()
            elif kind == "repeat":
                self.pos += 1
                lo, _, hi = val.partition(",")
                lo = int(lo) if lo.strip() else 0
                if _ == "":
                    hi_v: Optional[int] = lo
                else:
                    hi_v = int(hi) if hi.strip() else None
                out = out.repeat(lo, hi_v)
            else:
                return out

    def _atom(self) -> NFA:
        kind, val = self._peek()
        if kind == "(":
            self.pos += 1
            out = self._alternation()
            if self._peek()[0] != ")":
                raise RegsetError("unbalanced parenthesis")
            self.pos += 1
            return out
        if kind != "ident":
            raise RegsetError(f"regex atom expected, got {val!r}")
        self.pos += 1
        if val == "L":
            return NFA.letters(self.alphabet.locations)
        if val == "M":
            return NFA.letters(self.alphabet.messages)
        if val in self.alphabet.symbols:
            return NFA.letter(val)
        raise RegsetError(f"undeclared symbol {val!r}")


def from_regex(alphabet: Alphabet, pattern: str, kind: str) -> RegularSet:
    nfa = _RegexParser(alphabet, pattern).parse()
    raw = _determinize(nfa, alphabet.symbols)
    uni = _determinize(RegularSet.universe(alphabet, kind).nfa, alphabet.symbols)
    # raw ⊆ universe checked on the unshaped language (the canonical form
    # would silently clip ill-shaped words)
    seen = {(0, 0)}
    stack = [(0, 0)]
    while stack:
        p, q = stack.pop()
        if p in raw.accepting and q not in uni.accepting:
            raise RegsetError(
                f"pattern {pattern!r} admits a word outside the {kind} shape")
        for i in range(len(alphabet.symbols)):
            nxt = (raw.table[p][i], uni.table[q][i])
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return RegularSet(alphabet, kind, nfa)


# -- DOT export --------------------------------------------------------------

def to_dot(a: RegularSet, name: str = "regset") -> str:
    nfa = a.nfa.cooked()
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  start [shape=point];']
    for q in range(nfa.n):
        shape = "doublecircle" if q in nfa.accepting else "circle"
        lines.append(f'  q{q} [shape={shape}];')
    for q in nfa.initial:
        lines.append(f"  start -> q{q};")
    grouped: dict[tuple[int, int], list[str]] = {}
    for (p, s, q) in sorted(nfa.edges):
        grouped.setdefault((p, q), []).append(s)
    for (p, q), syms in grouped.items():
        lines.append(f'  q{p} -> q{q} [label="{",".join(syms)}"];')
    lines.append("}")
    return "\n".join(lines)

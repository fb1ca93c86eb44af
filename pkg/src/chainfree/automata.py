"""Nondeterministic finite automata over a small configurable alphabet.

Symbols are small integers.  The letters of the alphabet are ``0 .. len(alphabet) - 1``;
the empty word and the delimiters use reserved negative ids so that they can
never clash with a letter.  Delimiters behave like ordinary symbols everywhere
except in :func:`delim_product` and in the noodle splitter.
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

EPS = -1
LEFT = -2    # input-side delimiter, rendered as a left-pointing triangle
RIGHT = -3   # output-side delimiter
SHARP = -4   # generic delimiter
DELIMITERS = frozenset({LEFT, RIGHT, SHARP})

_RESERVED_LABELS = {EPS: "ε", LEFT: "◁", RIGHT: "▷", SHARP: "♯"}
_LABEL_TO_RESERVED = {v: k for k, v in _RESERVED_LABELS.items()}


class AlphabetError(ValueError):
    """A character outside the configured alphabet was used."""


class Alphabet:
    """An ordered finite set of single characters."""

    def __init__(self, chars: Iterable[str]):
        chars = list(dict.fromkeys(chars))
        if not chars:
            raise AlphabetError("an alphabet needs at least one symbol")
        for c in chars:
            if not isinstance(c, str) or len(c) != 1:
                raise AlphabetError(f"alphabet symbols must be single characters, got {c!r}")
            if c in _LABEL_TO_RESERVED:
                raise AlphabetError(f"{c!r} is reserved for epsilon or a delimiter")
        self.chars = tuple(chars)
        self._index = {c: i for i, c in enumerate(self.chars)}

    @classmethod
    def with_fresh(cls, chars: Iterable[str]) -> "Alphabet":
        """The given characters plus one extra symbol standing for everything else."""
        chars = list(dict.fromkeys(chars))
        taken = set(chars)
        for cand in "?abcdefghijklmnopqrstuvwxyz0123456789":
            if cand not in taken:
                return cls(chars + [cand])
        code = 0x100
        while chr(code) in taken:
            code += 1
        return cls(chars + [chr(code)])

    def __len__(self):
        return len(self.chars)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.chars == other.chars

    def __hash__(self):
        return hash(self.chars)

    def __repr__(self):
        return f"Alphabet({''.join(self.chars)!r})"

    @property
    def symbols(self) -> range:
        return range(len(self.chars))

    def __contains__(self, ch):
        return ch in self._index

    def symbol(self, ch: str) -> int:
        try:
            return self._index[ch]
        except KeyError:
            raise AlphabetError(f"symbol {ch!r} is not in the alphabet {''.join(self.chars)!r}") from None

    def encode(self, text: str) -> tuple[int, ...]:
        return tuple(self.symbol(c) for c in text)

    def decode(self, word: Sequence[int]) -> str:
        return "".join(self.chars[a] for a in word)

    def label(self, sym: int) -> str:
        """Text form of a symbol; awkward characters are written as ``\\u{hex}``."""
        if sym in _RESERVED_LABELS:
            return _RESERVED_LABELS[sym]
        c = self.chars[sym]
        if c.isspace() or c in "/\\" or not c.isprintable():
            return f"\\u{{{ord(c):x}}}"
        return c

    def parse_label(self, text: str) -> int:
        if text in _LABEL_TO_RESERVED:
            return _LABEL_TO_RESERVED[text]
        if text.startswith("\\u{") and text.endswith("}"):
            return self.symbol(chr(int(text[3:-1], 16)))
        return self.symbol(text)


class Nfa:
    """An automaton ``(states, transitions, initial, final)`` with states ``0 .. n_states-1``.

    Transitions are triples ``(p, a, q)`` where ``a`` is a letter, ``EPS`` or a
    delimiter.  Instances are treated as immutable.
    """

    def __init__(self, alphabet: Alphabet, n_states: int, transitions: Iterable[tuple[int, int, int]],
                 initial: Iterable[int], final: Iterable[int]):
        self.alphabet = alphabet
        self.n_states = n_states
        self.transitions = tuple(sorted(set(transitions)))
        self.initial = frozenset(initial)
        self.final = frozenset(final)
        k = len(alphabet)
        for p, a, q in self.transitions:
            if not (0 <= p < n_states and 0 <= q < n_states):
                raise ValueError(f"transition {(p, a, q)} references a missing state")
            if not (a == EPS or a in DELIMITERS or 0 <= a < k):
                raise AlphabetError(f"transition label {a} is outside the alphabet")
        for q in self.initial | self.final:
            if not 0 <= q < n_states:
                raise ValueError(f"state {q} does not exist")
        self._succ = None
        self._reduced = None

    # -- basic constructors -------------------------------------------------

    @classmethod
    def empty(cls, alphabet: Alphabet) -> "Nfa":
        return cls(alphabet, 1, (), (0,), ())

    @classmethod
    def epsilon(cls, alphabet: Alphabet) -> "Nfa":
        return cls(alphabet, 1, (), (0,), (0,))

    @classmethod
    def universal(cls, alphabet: Alphabet) -> "Nfa":
        return cls(alphabet, 1, [(0, a, 0) for a in alphabet.symbols], (0,), (0,))

    @classmethod
    def word(cls, alphabet: Alphabet, word: Sequence[int] | str) -> "Nfa":
        if isinstance(word, str):
            word = alphabet.encode(word)
        return cls(alphabet, len(word) + 1, [(i, a, i + 1) for i, a in enumerate(word)], (0,), (len(word),))

    @classmethod
    def symbol_set(cls, alphabet: Alphabet, symbols: Iterable[int]) -> "Nfa":
        return cls(alphabet, 2, [(0, a, 1) for a in symbols], (0,), (1,))

    @classmethod
    def from_words(cls, alphabet: Alphabet, words: Iterable[Sequence[int] | str]) -> "Nfa":
        result = cls.empty(alphabet)
        for w in words:
            result = union(result, cls.word(alphabet, w))
        return result.trim()

    # -- queries ----------------------------------------------------------------

    def succ(self) -> list[list[tuple[int, int]]]:
        if self._succ is None:
            succ = [[] for _ in range(self.n_states)]
            for p, a, q in self.transitions:
                succ[p].append((a, q))
            self._succ = succ
        return self._succ

    def symbols_used(self) -> set[int]:
        return {a for _, a, _ in self.transitions if a != EPS}

    def eps_closure(self, states: Iterable[int]) -> frozenset[int]:
        succ = self.succ()
        seen = set(states)
        stack = list(seen)
        while stack:
            p = stack.pop()
            for a, q in succ[p]:
                if a == EPS and q not in seen:
                    seen.add(q)
                    stack.append(q)
        return frozenset(seen)

    def step(self, states: Iterable[int], sym: int) -> frozenset[int]:
        succ = self.succ()
        return self.eps_closure(q for p in states for a, q in succ[p] if a == sym)

    def member(self, word: Sequence[int] | str) -> bool:
        if isinstance(word, str):
            word = self.alphabet.encode(word)
        current = self.eps_closure(self.initial)
        for a in word:
            current = self.step(current, a)
            if not current:
                return False
        return bool(current & self.final)

    def reachable(self) -> set[int]:
        succ = self.succ()
        seen = set(self.initial)
        stack = list(seen)
        while stack:
            p = stack.pop()
            for _, q in succ[p]:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return seen

    def is_empty(self) -> bool:
        return not (self.reachable() & self.final)

    def shortest_word(self) -> tuple[int, ...] | None:
        """A shortest accepted word (without delimiters removed), or None."""
        succ = self.succ()
        dist = {q: 0 for q in self.initial}
        back: dict[int, tuple[int, int] | None] = {q: None for q in self.initial}
        queue = deque(self.initial)
        while queue:
            p = queue.popleft()
            for a, q in succ[p]:
                d = dist[p] + (0 if a == EPS else 1)
                if q not in dist or d < dist[q]:
                    dist[q] = d
                    back[q] = (p, a)
                    if a == EPS:
                        queue.appendleft(q)
                    else:
                        queue.append(q)
        finals = [q for q in self.final if q in dist]
        if not finals:
            return None
        q = min(finals, key=lambda s: (dist[s], s))
        word = []
        while back[q] is not None:
            p, a = back[q]
            if a != EPS:
                word.append(a)
            q = p
        return tuple(reversed(word))

    def word_of_length(self, length: int) -> tuple[int, ...] | None:
        """Some accepted word of exactly ``length`` letters, or None."""
        succ = self.succ()
        start = [(q, 0) for q in self.initial]
        back: dict[tuple[int, int], tuple[tuple[int, int], int] | None] = {c: None for c in start}
        queue = deque(start)
        while queue:
            p, n = queue.popleft()
            if n == length and p in self.final:
                word = []
                node = (p, n)
                while back[node] is not None:
                    node, a = back[node]
                    if a != EPS:
                        word.append(a)
                return tuple(reversed(word))
            for a, q in succ[p]:
                m = n if a == EPS else n + 1
                if m <= length and (q, m) not in back:
                    back[(q, m)] = ((p, n), a)
                    queue.append((q, m))
        return None

    def words(self, max_len: int) -> Iterator[tuple[int, ...]]:
        """All accepted words of length at most ``max_len`` in length-lexicographic order."""
        dfa = self.remove_epsilon()
        level = {(): dfa.eps_closure(dfa.initial)}
        for n in range(max_len + 1):
            for w in sorted(level):
                if level[w] & dfa.final:
                    yield w
            if n == max_len:
                break
            nxt = {}
            for w, states in level.items():
                for a in sorted({a for p in states for a, _ in dfa.succ()[p]}):
                    s = dfa.step(states, a)
                    if s:
                        nxt[w + (a,)] = s
            level = nxt

    def is_singleton(self) -> tuple[int, ...] | None:
        """The unique accepted word if the language has exactly one word."""
        trimmed = self.remove_epsilon().trim()
        if trimmed.is_empty():
            return None
        dfa = trimmed.determinize().trim()
        (state,) = dfa.initial
        succ = dfa.succ()
        word, seen = [], {state}
        while True:
            out = succ[state]
            if state in dfa.final:
                return tuple(word) if not out else None
            if len(out) != 1:
                return None
            a, state = out[0]
            if state in seen:
                return None
            seen.add(state)
            word.append(a)

    # -- transformations ------------------------------------------------------------

    def trim(self) -> "Nfa":
        """Keep only states lying on some initial-to-final path."""
        fwd = self.reachable()
        pred = defaultdict(list)
        for p, _, q in self.transitions:
            pred[q].append(p)
        bwd = set(self.final)
        stack = list(bwd)
        while stack:
            q = stack.pop()
            for p in pred[q]:
                if p not in bwd:
                    bwd.add(p)
                    stack.append(p)
        keep = sorted(fwd & bwd)
        if not keep:
            return Nfa.empty(self.alphabet)
        if len(keep) == self.n_states:
            return self
        index = {q: i for i, q in enumerate(keep)}
        return Nfa(self.alphabet, len(keep),
                   [(index[p], a, index[q]) for p, a, q in self.transitions if p in index and q in index],
                   [index[q] for q in self.initial if q in index],
                   [index[q] for q in self.final if q in index])

    def remove_epsilon(self) -> "Nfa":
        if all(a != EPS for _, a, _ in self.transitions):
            return self
        succ = self.succ()
        trans, final = set(), set()
        for p in range(self.n_states):
            closure = self.eps_closure((p,))
            if closure & self.final:
                final.add(p)
            for r in closure:
                for a, q in succ[r]:
                    if a != EPS:
                        trans.add((p, a, q))
        return Nfa(self.alphabet, self.n_states, trans, self.initial, final)

    def determinize(self, symbols: Iterable[int] | None = None, complete: bool = False) -> "Nfa":
        """Subset construction.  ``symbols`` defaults to the letters of the alphabet
        plus any delimiter occurring in the automaton."""
        if symbols is None:
            symbols = sorted(set(self.alphabet.symbols) | (self.symbols_used() & DELIMITERS))
        symbols = list(symbols)
        start = self.eps_closure(self.initial)
        index = {start: 0}
        order = [start]
        trans = []
        i = 0
        while i < len(order):
            current = order[i]
            for a in symbols:
                nxt = self.step(current, a)
                if not nxt and not complete:
                    continue
                if nxt not in index:
                    index[nxt] = len(order)
                    order.append(nxt)
                trans.append((i, a, index[nxt]))
            i += 1
        final = [j for j, s in enumerate(order) if s & self.final]
        return Nfa(self.alphabet, len(order), trans, (0,), final)

    def reduce(self) -> "Nfa":
        """Merge states that simulate each other; the language is unchanged."""
        if self._reduced is None:
            n, trans, init, fin = simulation_quotient(self.n_states, self.transitions, self.initial, self.final)
            self._reduced = Nfa(self.alphabet, n, trans, init, fin).trim()
            self._reduced._reduced = self._reduced
        return self._reduced

    def relabel(self, mapping) -> "Nfa":
        return Nfa(self.alphabet, self.n_states, [(p, mapping(a), q) for p, a, q in self.transitions],
                   self.initial, self.final)

    # -- serialization ------------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"states {self.n_states}",
                 "initial " + " ".join(map(str, sorted(self.initial))),
                 "final " + " ".join(map(str, sorted(self.final)))]
        lines += [f"{p} {self.alphabet.label(a)} {q}" for p, a, q in self.transitions]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, alphabet: Alphabet, text: str) -> "Nfa":
        n, init, fin, trans = _parse_text(text)
        return cls(alphabet, n, [(p, alphabet.parse_label(lab), q) for p, lab, q in trans], init, fin)

    def __repr__(self):
        return f"Nfa(states={self.n_states}, transitions={len(self.transitions)})"


def _parse_text(text: str):
    n, init, fin, trans = 0, [], [], []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "states":
            n = int(parts[1])
        elif parts[0] == "initial":
            init = [int(x) for x in parts[1:]]
        elif parts[0] == "final":
            fin = [int(x) for x in parts[1:]]
        else:
            trans.append((int(parts[0]), parts[1], int(parts[2])))
    return n, init, fin, trans


def simulation_quotient(n_states: int, transitions, initial, final):
    """Quotient an automaton by mutual forward simulation.

    Labels are compared for equality only, so this works for letters as well
    as for tuple labels of multi-tape machines.
    """
    succ = defaultdict(lambda: defaultdict(set))
    for p, a, q in transitions:
        succ[p][a].add(q)
    final = set(final)
    # sim[p] holds every state that simulates p
    sim = {p: {r for r in range(n_states) if (p not in final or r in final)} for p in range(n_states)}
    changed = True
    while changed:
        changed = False
        for p in range(n_states):
            for r in list(sim[p]):
                if r == p:
                    continue
                if not _simulates(succ, sim, p, r):
                    sim[p].discard(r)
                    changed = True
    rep = {}
    for p in range(n_states):
        rep[p] = min(r for r in sim[p] if p in sim[r])
    classes = sorted(set(rep.values()))
    index = {c: i for i, c in enumerate(classes)}
    trans = {(index[rep[p]], a, index[rep[q]]) for p, a, q in transitions}
    return (len(classes), trans, {index[rep[q]] for q in initial}, {index[rep[q]] for q in final})


def _simulates(succ, sim, p, r) -> bool:
    for a, qs in succ[p].items():
        targets = succ[r].get(a)
        if not targets:
            return False
        for q in qs:
            if not (sim[q] & targets):
                return False
    return True


# -- binary operations ------------------------------------------------------------


def _check_same_alphabet(a: Nfa, b: Nfa):
    if a.alphabet != b.alphabet:
        raise AlphabetError("automata are over different alphabets")


def _disjoint(a: Nfa, b: Nfa):
    off = a.n_states
    trans = list(a.transitions) + [(p + off, x, q + off) for p, x, q in b.transitions]
    return off, trans


def union(a: Nfa, b: Nfa) -> Nfa:
    _check_same_alphabet(a, b)
    off, trans = _disjoint(a, b)
    return Nfa(a.alphabet, a.n_states + b.n_states, trans,
               set(a.initial) | {q + off for q in b.initial}, set(a.final) | {q + off for q in b.final})


def concat(a: Nfa, b: Nfa) -> Nfa:
    return _join(a, EPS, b)


def delim_concat(a: Nfa, sharp: int, b: Nfa) -> Nfa:
    """``L(a) · sharp · L(b)`` with fresh delimiter transitions from final(a) to initial(b)."""
    if sharp not in DELIMITERS:
        raise ValueError("the joining symbol must be a delimiter")
    return _join(a, sharp, b)


def _join(a: Nfa, sym: int, b: Nfa) -> Nfa:
    _check_same_alphabet(a, b)
    off, trans = _disjoint(a, b)
    trans += [(p, sym, q + off) for p in a.final for q in b.initial]
    return Nfa(a.alphabet, a.n_states + b.n_states, trans, a.initial, {q + off for q in b.final})


def concat_all(alphabet: Alphabet, parts: Sequence[Nfa], delimiter: int | None = None) -> Nfa:
    """Concatenate several automata, optionally separating them with a delimiter."""
    if not parts:
        return Nfa.epsilon(alphabet)
    result = parts[0]
    for part in parts[1:]:
        result = concat(result, part) if delimiter is None else delim_concat(result, delimiter, part)
    return result


def star(a: Nfa) -> Nfa:
    s = a.n_states
    trans = list(a.transitions) + [(s, EPS, q) for q in a.initial] + [(q, EPS, s) for q in a.final]
    return Nfa(a.alphabet, s + 1, trans, (s,), (s,))


def plus(a: Nfa) -> Nfa:
    return concat(a, star(a))


def optional(a: Nfa) -> Nfa:
    return union(a, Nfa.epsilon(a.alphabet))


def _product(a: Nfa, b: Nfa, alone) -> Nfa:
    """Synchronous product where ``alone(label)`` marks labels that move one side only."""
    _check_same_alphabet(a, b)
    sa, sb = a.succ(), b.succ()
    start = [(p, q) for p in sorted(a.initial) for q in sorted(b.initial)]
    index = {s: i for i, s in enumerate(start)}
    queue = deque(start)
    trans = []

    def add(src, lab, dst):
        if dst not in index:
            index[dst] = len(index)
            queue.append(dst)
        trans.append((index[src], lab, index[dst]))

    while queue:
        p, q = node = queue.popleft()
        for x, p2 in sa[p]:
            if alone(x):
                add(node, x, (p2, q))
        for y, q2 in sb[q]:
            if alone(y):
                add(node, y, (p, q2))
        for x, p2 in sa[p]:
            if alone(x):
                continue
            for y, q2 in sb[q]:
                if x == y:
                    add(node, x, (p2, q2))
    final = [i for (p, q), i in index.items() if p in a.final and q in b.final]
    return Nfa(a.alphabet, len(index), trans, range(len(start)), final).trim()


def intersect(a: Nfa, b: Nfa) -> Nfa:
    """Product automaton for ``L(a) ∩ L(b)``; delimiters must match like letters."""
    return _product(a, b, lambda x: x == EPS)


def delim_product(a: Nfa, b: Nfa, delims: Iterable[int]) -> Nfa:
    """Epsilon-preserving product where delimiters move their own operand only.

    Letters are synchronized, while every delimiter of either operand is copied
    into the product without moving the other operand.  Erasing the delimiters
    of the result gives the intersection of the erased operands.
    """
    delims = frozenset(delims)
    return _product(a, b, lambda x: x == EPS or x in delims)


def complement(a: Nfa) -> Nfa:
    if a.symbols_used() & DELIMITERS:
        raise ValueError("cannot complement an automaton with delimiters")
    dfa = a.determinize(symbols=a.alphabet.symbols, complete=True)
    return Nfa(a.alphabet, dfa.n_states, dfa.transitions, dfa.initial,
               set(range(dfa.n_states)) - dfa.final)


def includes(a: Nfa, b: Nfa) -> bool:
    """True iff ``L(b) ⊆ L(a)``."""
    _check_same_alphabet(a, b)
    ea = a.remove_epsilon()
    eb = b.remove_epsilon().trim()
    if eb.is_empty():
        return True
    delta = defaultdict(set)
    for p, x, q in ea.transitions:
        delta[(p, x)].add(q)
    sb = eb.succ()
    start_a = frozenset(ea.initial)
    seen = {(q, start_a) for q in eb.initial}
    stack = list(seen)
    while stack:
        q, s = stack.pop()
        if q in eb.final and not (s & ea.final):
            return False
        for x, q2 in sb[q]:
            s2 = frozenset(r2 for r in s for r2 in delta.get((r, x), ()))
            node = (q2, s2)
            if node not in seen:
                seen.add(node)
                stack.append(node)
    return True


def equivalent(a: Nfa, b: Nfa) -> bool:
    return includes(a, b) and includes(b, a)


def erase(a: Nfa, symbols: Iterable[int]) -> Nfa:
    """Replace the given symbols (typically delimiters) by epsilon."""
    symbols = set(symbols)
    return a.relabel(lambda x: EPS if x in symbols else x)


# -- regular expressions ------------------------------------------------------------


@dataclass(frozen=True)
class Regex:
    """Regular expression syntax tree.

    ``kind`` is one of ``empty``, ``eps``, ``chars``, ``any``, ``concat``,
    ``union``, ``star``, ``plus``, ``opt``, ``inter``, ``comp``.  ``chars`` holds
    a set of characters (negated when ``negate`` is set); composite nodes keep
    their operands in ``args``.
    """
    kind: str
    args: tuple = ()
    chars: frozenset = frozenset()
    negate: bool = False

    def characters(self) -> set[str]:
        out = set(self.chars)
        for a in self.args:
            out |= a.characters()
        return out


def re_word(text: str) -> Regex:
    if not text:
        return Regex("eps")
    if len(text) == 1:
        return Regex("chars", chars=frozenset(text))
    return Regex("concat", tuple(Regex("chars", chars=frozenset(c)) for c in text))


_SPECIAL = set("()[]|*+?.\\∅ε")


def parse_regex(text: str) -> Regex:
    """Parse the compact syntax used by the native input format.

    Supported: literals, ``[abc]``/``[a-z]``/``[^ab]`` classes, ``.`` for any
    letter, ``|`` for union, postfix ``*``, ``+`` and ``?``, parentheses,
    ``∅`` for the empty language and ``ε`` for the empty word.  A backslash
    escapes the next character.
    """
    pos = 0

    def error(msg):
        raise ValueError(f"regex {text!r}: {msg} at offset {pos}")

    def peek():
        return text[pos] if pos < len(text) else None

    def alternation():
        nonlocal pos
        branches = [sequence()]
        while peek() == "|":
            pos += 1
            branches.append(sequence())
        return branches[0] if len(branches) == 1 else Regex("union", tuple(branches))

    def sequence():
        items = []
        while peek() is not None and peek() not in "|)":
            items.append(repeat())
        if not items:
            return Regex("eps")
        return items[0] if len(items) == 1 else Regex("concat", tuple(items))

    def repeat():
        nonlocal pos
        node = atom()
        while peek() is not None and peek() in "*+?":
            node = Regex({"*": "star", "+": "plus", "?": "opt"}[peek()], (node,))
            pos += 1
        return node

    def char_class():
        nonlocal pos
        negate = peek() == "^"
        if negate:
            pos += 1
        chars = set()
        while peek() != "]":
            if peek() is None:
                error("unterminated character class")
            c = text[pos]
            if c == "\\":
                pos += 1
                if peek() is None:
                    error("dangling escape")
                c = text[pos]
            pos += 1
            if peek() == "-" and pos + 1 < len(text) and text[pos + 1] != "]":
                hi = text[pos + 1]
                pos += 2
                chars.update(chr(x) for x in range(ord(c), ord(hi) + 1))
            else:
                chars.add(c)
        pos += 1
        return Regex("chars", chars=frozenset(chars), negate=negate)

    def atom():
        nonlocal pos
        c = peek()
        if c == "(":
            pos += 1
            node = alternation()
            if peek() != ")":
                error("missing ')'")
            pos += 1
            return node
        if c == "[":
            pos += 1
            return char_class()
        pos += 1
        if c == ".":
            return Regex("any")
        if c == "∅":
            return Regex("empty")
        if c == "ε":
            return Regex("eps")
        if c == "\\":
            if peek() is None:
                error("dangling escape")
            c = text[pos]
            pos += 1
        elif c in "*+?)]":
            error(f"unexpected {c!r}")
        return Regex("chars", chars=frozenset(c))

    node = alternation()
    if pos != len(text):
        error("trailing input")
    return node


def from_regex(regex: Regex | str, alphabet: Alphabet) -> Nfa:
    """Thompson-style construction of an automaton for ``regex``."""
    if isinstance(regex, str):
        regex = parse_regex(regex)
    k = regex.kind
    if k == "empty":
        return Nfa.empty(alphabet)
    if k == "eps":
        return Nfa.epsilon(alphabet)
    if k == "any":
        return Nfa.symbol_set(alphabet, alphabet.symbols)
    if k == "chars":
        if regex.negate:
            syms = set(alphabet.symbols) - {alphabet.symbol(c) for c in regex.chars if c in alphabet}
        else:
            syms = {alphabet.symbol(c) for c in regex.chars}
        return Nfa.symbol_set(alphabet, sorted(syms))
    parts = [from_regex(r, alphabet) for r in regex.args]
    if k == "concat":
        return concat_all(alphabet, parts)
    if k == "union":
        result = parts[0]
        for p in parts[1:]:
            result = union(result, p)
        return result
    if k == "star":
        return star(parts[0])
    if k == "plus":
        return plus(parts[0])
    if k == "opt":
        return optional(parts[0])
    if k == "inter":
        result = parts[0]
        for p in parts[1:]:
            result = intersect(result, p)
        return result
    if k == "comp":
        return complement(parts[0])
    raise ValueError(f"unknown regex node {k!r}")

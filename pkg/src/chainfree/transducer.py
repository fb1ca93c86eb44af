"""Multi-tape finite transducers over the symbols of :mod:`chainfree.automata`.

A transition label is a tuple with one entry per tape.  Each entry is a letter
or ``EPS``; alternatively the whole tuple repeats one delimiter on every tape.
Tapes are numbered from 0.
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .automata import DELIMITERS, EPS, Alphabet, Nfa, simulation_quotient


class Transducer:
    """An n-tape transducer with states ``0 .. n_states-1``."""

    def __init__(self, alphabet: Alphabet, arity: int, n_states: int,
                 transitions: Iterable[tuple[int, tuple, int]], initial: Iterable[int], final: Iterable[int]):
        if arity < 1:
            raise ValueError("a transducer needs at least one tape")
        self.alphabet = alphabet
        self.arity = arity
        self.n_states = n_states
        self.transitions = tuple(sorted(set(transitions)))
        self.initial = frozenset(initial)
        self.final = frozenset(final)
        k = len(alphabet)
        for p, lab, q in self.transitions:
            if len(lab) != arity:
                raise ValueError(f"label {lab} does not have {arity} tapes")
            if not (0 <= p < n_states and 0 <= q < n_states):
                raise ValueError(f"transition {(p, lab, q)} references a missing state")
            delims = [x for x in lab if x in DELIMITERS]
            if delims and (len(delims) != arity or len(set(lab)) != 1):
                raise ValueError(f"label {lab} must carry its delimiter on all tapes")
            for x in lab:
                if not (x == EPS or x in DELIMITERS or 0 <= x < k):
                    raise ValueError(f"label entry {x} is outside the alphabet")
        for q in self.initial | self.final:
            if not 0 <= q < n_states:
                raise ValueError(f"state {q} does not exist")
        self._succ = None
        self._reduced = None

    # -- constructors -------------------------------------------------------------

    @classmethod
    def lift(cls, nfa: Nfa) -> "Transducer":
        """View an automaton as a one-tape transducer."""
        return cls(nfa.alphabet, 1, nfa.n_states, [(p, (a,), q) for p, a, q in nfa.transitions],
                   nfa.initial, nfa.final)

    @classmethod
    def identity(cls, alphabet: Alphabet, arity: int = 2) -> "Transducer":
        return cls(alphabet, arity, 1, [(0, (a,) * arity, 0) for a in alphabet.symbols], (0,), (0,))

    @classmethod
    def from_pairs(cls, alphabet: Alphabet, pairs: Iterable[tuple[Sequence[int] | str, Sequence[int] | str]]) -> "Transducer":
        """The finite relation given by a list of word pairs."""
        trans, final, n = [], [], 1
        for u, v in pairs:
            if isinstance(u, str):
                u = alphabet.encode(u)
            if isinstance(v, str):
                v = alphabet.encode(v)
            length = max(len(u), len(v))
            prev = 0
            for i in range(length):
                lab = (u[i] if i < len(u) else EPS, v[i] if i < len(v) else EPS)
                trans.append((prev, lab, n))
                prev = n
                n += 1
            final.append(prev)
        return cls(alphabet, 2, n, trans, (0,), final)

    # -- queries ----------------------------------------------------------------

    def succ(self) -> list[list[tuple[tuple, int]]]:
        if self._succ is None:
            succ = [[] for _ in range(self.n_states)]
            for p, lab, q in self.transitions:
                succ[p].append((lab, q))
            self._succ = succ
        return self._succ

    def accepts(self, words: Sequence[Sequence[int] | str]) -> bool:
        """Membership of a tuple of words (one per tape) in the relation."""
        words = [self.alphabet.encode(w) if isinstance(w, str) else tuple(w) for w in words]
        if len(words) != self.arity:
            raise ValueError(f"expected {self.arity} words")
        succ = self.succ()
        start = [(q, (0,) * self.arity) for q in self.initial]
        seen = set(start)
        stack = list(start)
        while stack:
            p, pos = stack.pop()
            if p in self.final and all(pos[i] == len(words[i]) for i in range(self.arity)):
                return True
            for lab, q in succ[p]:
                if lab[0] in DELIMITERS:
                    nxt = (q, pos)
                else:
                    new = list(pos)
                    ok = True
                    for i, x in enumerate(lab):
                        if x == EPS:
                            continue
                        if new[i] < len(words[i]) and words[i][new[i]] == x:
                            new[i] += 1
                        else:
                            ok = False
                            break
                    if not ok:
                        continue
                    nxt = (q, tuple(new))
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return False

    def is_empty(self) -> bool:
        return self.trim().is_empty_trimmed()

    def is_empty_trimmed(self) -> bool:
        return not self.final or not self.initial

    # -- normalization ----------------------------------------------------------------

    def trim(self) -> "Transducer":
        """Keep useful states and drop all-epsilon self-loops."""
        eps = (EPS,) * self.arity
        trans = [(p, lab, q) for p, lab, q in self.transitions if not (p == q and lab == eps)]
        fwd = set(self.initial)
        succ = defaultdict(list)
        pred = defaultdict(list)
        for p, _, q in trans:
            succ[p].append(q)
            pred[q].append(p)
        stack = list(fwd)
        while stack:
            p = stack.pop()
            for q in succ[p]:
                if q not in fwd:
                    fwd.add(q)
                    stack.append(q)
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
            return Transducer(self.alphabet, self.arity, 1, (), (0,), ())
        if len(keep) == self.n_states and len(trans) == len(self.transitions):
            return self
        index = {q: i for i, q in enumerate(keep)}
        return Transducer(self.alphabet, self.arity, len(keep),
                          [(index[p], lab, index[q]) for p, lab, q in trans if p in index and q in index],
                          [index[q] for q in self.initial if q in index],
                          [index[q] for q in self.final if q in index])

    def reduce(self) -> "Transducer":
        """Merge simulation-equivalent states, treating tuple labels as letters."""
        if self._reduced is None:
            n, trans, init, fin = simulation_quotient(self.n_states, self.transitions, self.initial, self.final)
            self._reduced = Transducer(self.alphabet, self.arity, n, trans, init, fin).trim()
            self._reduced._reduced = self._reduced
        return self._reduced

    def relabel(self, mapping, arity: int | None = None) -> "Transducer":
        return Transducer(self.alphabet, self.arity if arity is None else arity, self.n_states,
                          [(p, mapping(lab), q) for p, lab, q in self.transitions], self.initial, self.final)

    # -- serialization ------------------------------------------------------------

    def label_text(self, lab: tuple) -> str:
        return "/".join(self.alphabet.label(x) for x in lab)

    def to_text(self) -> str:
        lines = [f"tapes {self.arity}", f"states {self.n_states}",
                 "initial " + " ".join(map(str, sorted(self.initial))),
                 "final " + " ".join(map(str, sorted(self.final)))]
        lines += [f"{p} {self.label_text(lab)} {q}" for p, lab, q in self.transitions]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, alphabet: Alphabet, text: str) -> "Transducer":
        arity, n, init, fin, trans = 0, 0, [], [], []
        for line in text.splitlines():
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "tapes":
                arity = int(parts[1])
            elif parts[0] == "states":
                n = int(parts[1])
            elif parts[0] == "initial":
                init = [int(x) for x in parts[1:]]
            elif parts[0] == "final":
                fin = [int(x) for x in parts[1:]]
            else:
                lab = tuple(alphabet.parse_label(x) for x in parts[1].split("/"))
                trans.append((int(parts[0]), lab, int(parts[2])))
        return cls(alphabet, arity, n, trans, init, fin)

    def __repr__(self):
        return f"Transducer(tapes={self.arity}, states={self.n_states}, transitions={len(self.transitions)})"


def _is_delim(lab: tuple) -> bool:
    return lab[0] in DELIMITERS


def sync(t: Transducer, u: Transducer, i: int, j: int, delimiters: Iterable[int] = ()) -> Transducer:
    """Synchronize tape ``i`` of ``t`` with tape ``j`` of ``u``.

    The result has the tapes of ``t`` followed by the tapes of ``u`` without
    ``j``.  Delimiter transitions whose delimiter is in ``delimiters`` move
    their own operand only and are copied onto every tape of the result; other
    delimiters must be matched by both operands.
    """
    if t.alphabet != u.alphabet:
        raise ValueError("transducers are over different alphabets")
    if not (0 <= i < t.arity and 0 <= j < u.arity):
        raise ValueError("tape index out of range")
    delimiters = frozenset(delimiters)
    n, m = t.arity, u.arity
    arity = n + m - 1
    eps_t = (EPS,) * n
    eps_u = (EPS,) * (m - 1)
    st, su = t.succ(), u.succ()

    def rest(y):
        return y[:j] + y[j + 1:]

    start = [(p, q) for p in sorted(t.initial) for q in sorted(u.initial)]
    index = {s: k for k, s in enumerate(start)}
    queue = deque(start)
    trans = []

    def add(src, lab, dst):
        if dst not in index:
            index[dst] = len(index)
            queue.append(dst)
        trans.append((index[src], lab, index[dst]))

    while queue:
        p, q = node = queue.popleft()
        for x, p2 in st[p]:
            if _is_delim(x):
                if x[0] in delimiters:
                    add(node, (x[0],) * arity, (p2, q))
            elif x[i] == EPS:
                add(node, x + eps_u, (p2, q))
        for y, q2 in su[q]:
            if _is_delim(y):
                if y[0] in delimiters:
                    add(node, (y[0],) * arity, (p, q2))
            elif y[j] == EPS:
                add(node, eps_t + rest(y), (p, q2))
        for x, p2 in st[p]:
            if _is_delim(x):
                if x[0] in delimiters:
                    continue
            elif x[i] == EPS:
                continue
            for y, q2 in su[q]:
                if _is_delim(y):
                    if y[0] in delimiters or y[0] != x[i]:
                        continue
                elif y[j] != x[i]:
                    continue
                add(node, x + rest(y), (p2, q2))
    final = [k for (p, q), k in index.items() if p in t.final and q in u.final]
    return Transducer(t.alphabet, arity, len(index), trans, range(len(start)), final).trim()


def project_out(t: Transducer, tapes: Iterable[int]) -> Transducer:
    """Erase the given tapes from every label."""
    drop = set(tapes)
    keep = [k for k in range(t.arity) if k not in drop]
    if not keep:
        raise ValueError("cannot project out every tape")

    def f(lab):
        if _is_delim(lab):
            return (lab[0],) * len(keep)
        return tuple(lab[k] for k in keep)

    return t.relabel(f, len(keep)).trim()


def permute(t: Transducer, order: Sequence[int]) -> Transducer:
    """Reorder (and possibly drop) tapes: tape ``k`` of the result is tape ``order[k]`` of ``t``."""
    dropped = set(range(t.arity)) - set(order)
    if dropped:
        t = project_out(t, dropped)
        remaining = [k for k in range(t.arity + len(dropped)) if k not in dropped]
        order = [remaining.index(k) for k in order]
    return t.relabel(lambda lab: tuple(lab[k] for k in order), len(order))


def project(t: Transducer, tape: int) -> Nfa:
    """The language of one tape as an automaton."""
    return Nfa(t.alphabet, t.n_states, [(p, lab[tape], q) for p, lab, q in t.transitions],
               t.initial, t.final).trim()


def to_nfa(t: Transducer) -> Nfa:
    """The one-tape transducer ``t`` as an automaton."""
    if t.arity != 1:
        raise ValueError("only one-tape transducers convert to automata")
    return project(t, 0)


def compose(t: Transducer, u: Transducer, i: int = 1, j: int = 0) -> Transducer:
    """Relational composition on tape ``i`` of ``t`` and tape ``j`` of ``u``; the shared tape is erased."""
    return project_out(sync(t, u, i, j), {i})


def image(t: Transducer, lang: Nfa) -> Nfa:
    """Outputs of the binary ``t`` on inputs from ``lang``."""
    return project(sync(Transducer.lift(lang), t, 0, 0), 1)


def preimage(t: Transducer, lang: Nfa) -> Nfa:
    """Inputs of the binary ``t`` having some output in ``lang``."""
    return project(sync(t, Transducer.lift(lang), 1, 0), 0)


def inverse(t: Transducer) -> Transducer:
    if t.arity != 2:
        raise ValueError("only binary transducers can be inverted")
    return permute(t, (1, 0))


def restrict(t: Transducer, tape: int, lang: Nfa) -> Transducer:
    """Keep the tuples whose ``tape`` component lies in ``lang``; tape order is unchanged."""
    synced = sync(t, Transducer.lift(lang), tape, 0)
    return synced


def abstract_to_dummy(t: Transducer, keep_tapes: Iterable[int] = ()) -> Transducer:
    """Replace every letter by the alphabet's first letter, except on ``keep_tapes``.

    Only the position of epsilons matters for lengths, so this preserves the
    vector of tape lengths of every accepted tuple.
    """
    keep = set(keep_tapes)

    def f(lab):
        if _is_delim(lab):
            return lab
        return tuple(x if (x == EPS or k in keep) else 0 for k, x in enumerate(lab))

    return t.relabel(f)


# -- functionality ------------------------------------------------------------------


@dataclass(frozen=True)
class Functional:
    pass


@dataclass(frozen=True)
class NonFunctional:
    witness: tuple


@dataclass(frozen=True)
class Unknown:
    reason: str


def check_functional(t: Transducer, bound: int = 8):
    """Decide single-valuedness of a binary transducer by exploring two runs on one input.

    Configurations pair the states of both runs with the output delay between
    them.  A clash of output letters or a final configuration with a non-empty
    delay yields an input with two outputs.  If every delay stays within
    ``bound`` the exploration closes and the relation is functional.
    """
    if t.arity != 2:
        raise ValueError("functionality is defined for binary transducers")
    if bound < 1:
        raise ValueError("bound must be positive")
    t = t.trim()
    st = t.succ()

    # moves of the squared machine: (input symbol or EPS, out1, out2, p2, q2)
    def moves(p, q):
        for (a, o), p2 in st[p]:
            if a == EPS:
                yield EPS, o, EPS, p2, q
        for (b, o), q2 in st[q]:
            if b == EPS:
                yield EPS, EPS, o, p, q2
        for (a, o1), p2 in st[p]:
            if a == EPS:
                continue
            for (b, o2), q2 in st[q]:
                if a == b:
                    yield a, o1, o2, p2, q2

    # trim the squared machine on state pairs so every configuration can still accept
    pairs = set((p, q) for p in t.initial for q in t.initial)
    stack = list(pairs)
    edges = defaultdict(list)
    while stack:
        p, q = stack.pop()
        for a, _, _, p2, q2 in moves(p, q):
            edges[(p, q)].append((a, (p2, q2)))
            if (p2, q2) not in pairs:
                pairs.add((p2, q2))
                stack.append((p2, q2))
    back = defaultdict(list)
    for src, outs in edges.items():
        for a, dst in outs:
            back[dst].append((a, src))
    # distance-to-accept with an input word to get there
    finish = {}
    queue = deque()
    for pq in pairs:
        if pq[0] in t.final and pq[1] in t.final:
            finish[pq] = ()
            queue.append(pq)
    while queue:
        dst = queue.popleft()
        for a, src in back[dst]:
            if src not in finish:
                finish[src] = ((a,) if a != EPS else ()) + finish[dst]
                queue.append(src)

    start = [((p, q), 0, ()) for p in t.initial for q in t.initial if (p, q) in finish]
    parent = {s: None for s in start}
    queue = deque(start)

    def input_of(cfg):
        word = []
        while parent[cfg] is not None:
            cfg, a = parent[cfg]
            if a != EPS:
                word.append(a)
        return tuple(reversed(word))

    while queue:
        cfg = queue.popleft()
        (p, q), side, delay = cfg
        if p in t.final and q in t.final and delay:
            return NonFunctional(input_of(cfg))
        for a, o1, o2, p2, q2 in moves(p, q):
            if (p2, q2) not in finish:
                continue
            ahead1 = (delay if side == 1 else ()) + ((o1,) if o1 != EPS else ())
            ahead2 = (delay if side == 2 else ()) + ((o2,) if o2 != EPS else ())
            k = min(len(ahead1), len(ahead2))
            if ahead1[:k] != ahead2[:k]:
                return NonFunctional(input_of(cfg) + ((a,) if a != EPS else ()) + finish[(p2, q2)])
            if len(ahead1) > k:
                nxt = ((p2, q2), 1, ahead1[k:])
            elif len(ahead2) > k:
                nxt = ((p2, q2), 2, ahead2[k:])
            else:
                nxt = ((p2, q2), 0, ())
            if len(nxt[2]) > bound:
                return Unknown(f"output delay exceeds {bound}")
            if nxt not in parent:
                parent[nxt] = (cfg, a)
                queue.append(nxt)
    return Functional()


def is_homomorphism_syntactic(t: Transducer) -> bool:
    """A sufficient syntactic test that ``t`` maps words letter by letter.

    Accepted shape: one state that is both the only initial and the only final
    state; every transition leaving it reads a letter; every other state lies
    on an unbranching chain of epsilon-input transitions leading back to it.
    Such a machine recognizes ``R*`` for a relation ``R`` between letters and
    words, so the image of a concatenation is the concatenation of images.
    """
    if t.arity != 2:
        return False
    t = t.trim()
    if len(t.initial) != 1 or t.initial != t.final:
        return False
    (hub,) = t.initial
    succ = t.succ()
    indeg = defaultdict(int)
    for p, lab, q in t.transitions:
        if _is_delim(lab):
            return False
        indeg[q] += 1
    for lab, _ in succ[hub]:
        if lab[0] == EPS:
            return False
    for p in range(t.n_states):
        if p == hub:
            continue
        if len(succ[p]) != 1 or indeg[p] != 1 or succ[p][0][0][0] != EPS:
            return False
    # every chain must return to the hub without cycling among chain states
    for lab, q in succ[hub]:
        seen = set()
        while q != hub:
            if q in seen:
                return False
            seen.add(q)
            q = succ[q][0][1]
    return True

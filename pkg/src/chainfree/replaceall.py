"""Compilation of string replacement functions into binary transducers.

Matches follow the leftmost, shortest, non-empty convention: the input is
scanned left to right, and at each position the shortest non-empty match of
the pattern starting there is replaced.  Scanning resumes after the match.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .automata import EPS, Alphabet, Nfa
from .transducer import Transducer


@dataclass(frozen=True)
class ReplaceSpec:
    """A replacement of ``pattern`` matches by the word ``replacement``.

    ``mode`` is ``"all"`` to replace every match or ``"first"`` for the
    leftmost match only.
    """
    pattern: Nfa
    replacement: tuple
    mode: str = "all"

    def __post_init__(self):
        if self.mode not in ("all", "first"):
            raise ValueError(f"unknown replacement mode {self.mode!r}")


def literal_spec(alphabet: Alphabet, pattern: str, replacement: str, mode: str = "all") -> ReplaceSpec:
    return ReplaceSpec(Nfa.word(alphabet, pattern), alphabet.encode(replacement), mode)


def reference_replace(word: Sequence[int], spec: ReplaceSpec) -> tuple:
    """Direct string-scanning implementation used as the semantic reference."""
    word = tuple(word)
    pattern = spec.pattern
    if spec.mode == "first" and pattern.member(()):
        return tuple(spec.replacement) + word
    out = []
    i = 0
    replaced = False
    while i < len(word):
        end = None
        if not (replaced and spec.mode == "first"):
            states = pattern.eps_closure(pattern.initial)
            for j in range(i, len(word)):
                states = pattern.step(states, word[j])
                if not states:
                    break
                if states & pattern.final:
                    end = j + 1
                    break
        if end is None:
            out.append(word[i])
            i += 1
        else:
            out.extend(spec.replacement)
            i = end
            replaced = True
    return tuple(out)


def compile_replace(spec: ReplaceSpec) -> Transducer:
    """A functional transducer for ``u -> replace(u)``.

    Each state of the scanning phase records the progress of the match being
    consumed (if any) and a set of obligations.  An obligation is the pattern
    automaton state reached from a position where the transducer decided that
    no match starts; reaching a final pattern state from an obligation is
    forbidden, so the nondeterministic guess is only kept when it is right.
    """
    alphabet = spec.pattern.alphabet
    dfa = spec.pattern.remove_epsilon().determinize(symbols=alphabet.symbols)
    (d0,) = dfa.initial
    delta = {(p, a): q for p, a, q in dfa.transitions}
    # states from which no final state is reachable can never produce a match
    useful = _coreachable(dfa)
    replacement = tuple(spec.replacement)
    first = spec.mode == "first"

    if first and spec.pattern.member(()):
        # the leftmost shortest match is the empty word at position 0
        return _prepend(alphabet, replacement)

    index: dict = {}
    queue = deque()
    trans = []
    n_states = 0

    def state(key):
        nonlocal n_states
        if key not in index:
            index[key] = n_states
            n_states += 1
            queue.append(key)
        return index[key]

    def emit(src, a, dst):
        """Read ``a`` and write the replacement, chaining extra output letters."""
        nonlocal n_states
        if not replacement:
            trans.append((src, (a, EPS), dst))
            return
        prev = src
        for k, r in enumerate(replacement):
            nxt = dst if k == len(replacement) - 1 else n_states
            if nxt != dst:
                n_states += 1
            trans.append((prev, (a if k == 0 else EPS, r), nxt))
            prev = nxt

    def advance(obligations, a):
        """Advance obligations on ``a``; None when one of them reaches a match."""
        out = set()
        for o in obligations:
            q = delta.get((o, a))
            if q is None or q not in useful:
                continue
            if q in dfa.final:
                return None
            out.add(q)
        return frozenset(out)

    start = state(("scan", None, frozenset()))
    final = set()
    while queue:
        key = queue.popleft()
        src = index[key]
        phase, m, obligations = key
        if m is None:
            final.add(src)
        for a in alphabet.symbols:
            obl = advance(obligations, a)
            if obl is None:
                continue
            if phase == "copy":
                trans.append((src, (a, a), state(("copy", None, obl))))
                continue
            if m is None:
                # no match starts here: add an obligation for this position
                q = delta.get((d0, a))
                if q is None or q not in useful:
                    trans.append((src, (a, a), state(("scan", None, obl))))
                elif q not in dfa.final:
                    trans.append((src, (a, a), state(("scan", None, obl | {q}))))
                # a match starts here
                if q is not None and q in useful:
                    if q in dfa.final:
                        after = "copy" if first else "scan"
                        emit(src, a, state((after, None, obl)))
                    else:
                        trans.append((src, (a, EPS), state(("scan", q, obl))))
            else:
                q = delta.get((m, a))
                if q is None or q not in useful:
                    continue
                if q in dfa.final:
                    after = "copy" if first else "scan"
                    emit(src, a, state((after, None, obl)))
                else:
                    trans.append((src, (a, EPS), state(("scan", q, obl))))
    return Transducer(alphabet, 2, n_states, trans, (start,), final).trim()


def _coreachable(dfa: Nfa) -> set:
    pred = {}
    for p, _, q in dfa.transitions:
        pred.setdefault(q, []).append(p)
    seen = set(dfa.final)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for p in pred.get(q, ()):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def _prepend(alphabet: Alphabet, replacement: tuple) -> Transducer:
    n = len(replacement)
    trans = [(k, (EPS, r), k + 1) for k, r in enumerate(replacement)]
    trans += [(n, (a, a), n) for a in alphabet.symbols]
    return Transducer(alphabet, 2, n + 1, trans, (0,), (n,))


def compile_casing(direction: str, alphabet: Alphabet) -> Transducer:
    """Single-state letter-to-letter transducer for ``to_lower`` or ``to_upper``."""
    if direction not in ("lower", "upper"):
        raise ValueError("direction must be 'lower' or 'upper'")
    trans = []
    for a in alphabet.symbols:
        c = alphabet.chars[a]
        mapped = c.lower() if direction == "lower" else c.upper()
        b = alphabet.symbol(mapped) if len(mapped) == 1 and mapped in alphabet else a
        trans.append((0, (a, b), 0))
    return Transducer(alphabet, 2, 1, trans, (0,), (0,))


def reference_casing(word: Sequence[int], direction: str, alphabet: Alphabet) -> tuple:
    out = []
    for a in word:
        c = alphabet.chars[a]
        mapped = c.lower() if direction == "lower" else c.upper()
        out.append(alphabet.symbol(mapped) if len(mapped) == 1 and mapped in alphabet else a)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class Apply:
    """One application of a compiled string function to a subject.

    ``subject`` is either a tuple of variable names (a concatenation) or a
    nested :class:`Apply`.
    """
    name: str
    transducer: Transducer
    subject: object


def flatten(app: Apply, target: tuple, fresh) -> list:
    """Turn nested applications into a chain of transducer constraints.

    The innermost application reads the subject term, every intermediate
    result gets a fresh variable from ``fresh()``, and the outermost output is
    ``target``.
    """
    from .constraints import TransducerConstraint

    chain = []
    node = app
    while isinstance(node, Apply):
        chain.append(node)
        node = node.subject
    chain.reverse()
    term = tuple(node)
    out = []
    for k, step in enumerate(chain):
        result = target if k == len(chain) - 1 else (fresh(),)
        out.append(TransducerConstraint(step.transducer, term, tuple(result), True, step.name))
        term = result
    return out

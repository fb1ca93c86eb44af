"""Model construction for satisfiable vertices.

The concatenation-free part is realized first: every composed machine is
searched for a run whose tape lengths (and tracked code point sums) match
the integer model.  The remaining constraints are stable, so their inputs
can be chosen after their outputs, walking the inclusion graph backwards.
Solved equations finally define their left sides.
"""
from __future__ import annotations

from collections import deque
from graphlib import CycleError

from . import lia
from .automata import EPS, Nfa
from .constraints import Equation, TransducerConstraint, evaluate_cube
from .graph import toposort
from .transducer import Transducer


class ModelSearchExceeded(Exception):
    """No model was found within the search budget."""


def find_run(t: Transducer, lengths, codes: dict, budget: int) -> tuple:
    """Words, one per tape, of an accepted tuple with the given lengths and code point sums."""
    alphabet = t.alphabet
    succ = t.succ()
    code_tapes = sorted(codes)
    start_codes = (0,) * len(code_tapes)
    start = [(q, (0,) * t.arity, start_codes) for q in sorted(t.initial)]
    parent = {s: None for s in start}
    queue = deque(start)
    while queue:
        cfg = queue.popleft()
        q, pos, sums = cfg
        if q in t.final and list(pos) == list(lengths) and all(s == codes[k] for s, k in zip(sums, code_tapes)):
            return _tapes(cfg, parent, t.arity)
        for lab, r in succ[q]:
            new = list(pos)
            new_sums = list(sums)
            ok = True
            for k, x in enumerate(lab):
                if x == EPS:
                    continue
                new[k] += 1
                if new[k] > lengths[k]:
                    ok = False
                    break
            if not ok:
                continue
            for i, k in enumerate(code_tapes):
                if lab[k] != EPS:
                    new_sums[i] += ord(alphabet.chars[lab[k]])
                    if new_sums[i] > codes[k]:
                        ok = False
            if not ok:
                continue
            nxt = (r, tuple(new), tuple(new_sums))
            if nxt not in parent:
                parent[nxt] = (cfg, lab)
                if len(parent) > budget:
                    raise ModelSearchExceeded("run search budget exhausted")
                queue.append(nxt)
    raise ModelSearchExceeded("no run matches the length model")


def _tapes(cfg, parent, arity) -> tuple:
    labels = []
    while parent[cfg] is not None:
        cfg, lab = parent[cfg]
        labels.append(lab)
    labels.reverse()
    return tuple(tuple(lab[k] for lab in labels if lab[k] != EPS) for k in range(arity))


def split_word(word: tuple, term, langs: dict, fixed: dict):
    """Values for the variables of ``term`` whose concatenation is ``word``."""
    n = len(word)
    reach = [{0}]
    for x in term:
        nxt = set()
        for p in reach[-1]:
            nxt |= _ends(word, p, x, langs, fixed)
        reach.append(nxt)
    if n not in reach[-1]:
        return None
    out = {}
    end = n
    for i in range(len(term) - 1, -1, -1):
        x = term[i]
        for p in sorted(reach[i]):
            if end in _ends(word, p, x, langs, fixed):
                out[x] = word[p:end]
                end = p
                break
    return out


def _ends(word, p, x, langs, fixed) -> set:
    if x in fixed:
        w = fixed[x]
        return {p + len(w)} if tuple(word[p:p + len(w)]) == tuple(w) else set()
    nfa = langs[x]
    states = nfa.eps_closure(nfa.initial)
    out = set()
    k = p
    while states:
        if states & nfa.final:
            out.add(k)
        if k == len(word):
            break
        states = nfa.step(states, word[k])
        k += 1
    return out


def transducer_input(t: Transducer, word: tuple, term, langs: dict, fixed: dict, budget: int):
    """Values for the variables of ``term`` whose concatenation ``t`` maps to ``word``."""
    autos = [Nfa.word(t.alphabet, fixed[x]) if x in fixed else langs[x] for x in term]
    n = len(term)
    succ = t.succ()

    def enter(i):
        return autos[i].eps_closure(autos[i].initial) if i < n else frozenset()

    start = [(q, 0, 0, enter(0)) for q in sorted(t.initial)]
    parent = {s: None for s in start}
    queue = deque(start)
    while queue:
        cfg = queue.popleft()
        q, pos, i, states = cfg
        if q in t.final and pos == len(word) and i == n:
            return _input_values(cfg, parent, term)
        moves = []
        if i < n and states & autos[i].final:
            moves.append(((q, pos, i + 1, enter(i + 1)), None))
        for lab, r in succ[q]:
            a, b = lab
            new_pos = pos
            if b != EPS:
                if pos >= len(word) or word[pos] != b:
                    continue
                new_pos += 1
            new_states = states
            if a != EPS:
                if i >= n:
                    continue
                new_states = autos[i].step(states, a)
                if not new_states:
                    continue
            moves.append(((r, new_pos, i, new_states), (i, a)))
        for nxt, step in moves:
            if nxt not in parent:
                parent[nxt] = (cfg, step)
                if len(parent) > budget:
                    raise ModelSearchExceeded("input search budget exhausted")
                queue.append(nxt)
    return None


def _input_values(cfg, parent, term) -> dict:
    letters = [[] for _ in term]
    while parent[cfg] is not None:
        cfg, step = parent[cfg]
        if step is not None and step[1] != EPS:
            letters[step[0]].append(step[1])
    return {x: tuple(reversed(ls)) for x, ls in zip(term, letters)}


def build_model(vertex, query, lia_model: dict, cube, budget: int = 200_000):
    """An assignment of words and integers satisfying ``cube``, validated by direct evaluation."""
    lang = dict(vertex.lang)
    words = {}
    for m in query.machines:
        lengths = [lia_model.get(lia.length_var(v), 0) for v in m.tapes]
        codes = {k: lia_model[lia.code_var(v)] for k, v in enumerate(m.tapes) if v in query.tracked}
        for v, w in zip(m.tapes, find_run(m.transducer, lengths, codes, budget)):
            words[v] = w
    for v in query.standalone:
        codes = {0: lia_model[lia.code_var(v)]} if v in query.tracked else {}
        (words[v],) = find_run(Transducer.lift(lang[v]), [lia_model.get(lia.length_var(v), 0)], codes, budget)
    cf = {id(a) for a in vertex.nodes if isinstance(a, TransducerConstraint) and set(a.lhs) & vertex.lvar}
    stable = [a for a in vertex.nodes if id(a) not in cf]
    try:
        order = list(reversed(toposort(stable)))
    except CycleError as exc:
        raise ModelSearchExceeded("the stable part is cyclic") from exc
    for c in order:
        for x in c.rhs:
            if x not in words:
                words[x] = lang[x].shortest_word()
        target = tuple(s for x in c.rhs for s in words[x])
        if isinstance(c, Equation):
            values = split_word(target, c.lhs, lang, words)
        else:
            values = transducer_input(c.transducer, target, c.lhs, lang, words, budget)
        if values is None:
            raise ModelSearchExceeded(f"cannot realize {c}")
        words.update(values)
    solved = {e.lhs[0] for e in vertex.seq}
    for x in sorted(lang):
        if x not in words and x not in solved:
            w = lang[x].shortest_word()
            if w is None:
                raise ModelSearchExceeded(f"{x} has an empty language")
            words[x] = w
    pending = list(vertex.seq)
    while pending:
        rest = []
        for e in pending:
            if all(x in words for x in e.rhs):
                words[e.lhs[0]] = tuple(s for x in e.rhs for s in words[x])
            else:
                rest.append(e)
        if len(rest) == len(pending):
            raise ModelSearchExceeded("solved equations refer to unassigned variables")
        pending = rest
    ints = {k: v for k, v in lia_model.items()
            if not (lia.is_counter(k) or k.startswith("|") or k.startswith("code("))}
    for a in cube.atoms:
        for x in _int_vars(a):
            ints.setdefault(x, 0)
    if not evaluate_cube(cube, words, ints):
        raise ModelSearchExceeded("the constructed assignment does not satisfy the cube")
    return words, ints


def _int_vars(atom) -> set:
    from .constraints import LengthAtom
    if isinstance(atom, LengthAtom):
        return {v for v in atom.formula.variables() if not v.startswith("|")}
    return set()

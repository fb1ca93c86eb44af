"""Noodlification: case splits of delimited products into thin sub-machines.

A noodle keeps exactly one delimiter transition per delimiter level of a
product.  Cutting it at those transitions yields one segment per level gap,
and the segments determine refined variable languages (stabilizing
procedures) or fresh split variables with binding equations
(concatenation-eliminating procedures).
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .automata import DELIMITERS, LEFT, RIGHT, Nfa, concat_all, delim_product, includes, intersect
from .constraints import Equation, TransducerConstraint
from .transducer import Transducer, image, project, sync


@dataclass
class Noodle:
    """Segments of one noodle, with the delimiter crossed before each segment but the first."""
    segments: list
    delimiters: list

    def index(self, k: int, left=LEFT, right=RIGHT) -> tuple[int, int]:
        """Numbers of ``left`` and ``right`` delimiters preceding segment ``k``."""
        before = self.delimiters[:k]
        return before.count(left), before.count(right)


@dataclass
class NoodleResult:
    """One disjunct: new or refined languages, binding equations and segment constraints."""
    lang: dict = field(default_factory=dict)
    ins: list = field(default_factory=list)
    outs: list = field(default_factory=list)
    transducers: list = field(default_factory=list)


def _delimiter(label):
    if isinstance(label, tuple):
        return label[0] if label[0] in DELIMITERS else None
    return label if label in DELIMITERS else None


def _sub_machine(machine, starts, ends):
    """The part of ``machine`` between ``starts`` and ``ends`` using no delimiter."""
    plain = [(p, lab, q) for p, lab, q in machine.transitions if _delimiter(lab) is None]
    if isinstance(machine, Transducer):
        return Transducer(machine.alphabet, machine.arity, machine.n_states, plain, starts, ends).trim()
    return Nfa(machine.alphabet, machine.n_states, plain, starts, ends).trim()


def split_into_noodles(machine) -> list[Noodle]:
    """All noodles of a trimmed delimited automaton or transducer.

    Noodles are enumerated depth first, choosing delimiter transitions in
    their sorted order, which makes the output reproducible.
    """
    machine = machine.trim()
    if not machine.initial or not machine.final:
        return []
    plain_succ = defaultdict(list)
    delim_out = defaultdict(list)
    for p, lab, q in machine.transitions:
        d = _delimiter(lab)
        if d is None:
            plain_succ[p].append(q)
        else:
            delim_out[p].append((d, q))

    def closure(starts):
        seen = set(starts)
        stack = list(starts)
        while stack:
            p = stack.pop()
            for q in plain_succ[p]:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return seen

    out = []

    def walk(starts, cuts, delims):
        reach = closure(starts)
        ends = reach & machine.final
        if ends:
            bounds = cuts + [(starts, frozenset(ends))]
            out.append(Noodle([_sub_machine(machine, s, e) for s, e in bounds], list(delims)))
        for p in sorted(reach):
            for d, q in sorted(delim_out[p]):
                walk(frozenset({q}), cuts + [(starts, frozenset({p}))], delims + [d])

    walk(frozenset(machine.initial), [], [])
    return out


def _is_epsilon_only(nfa: Nfa) -> bool:
    return nfa.is_singleton() == ()


def compact(nfa: Nfa) -> Nfa:
    """Epsilon-free, trimmed and simulation-reduced copy of ``nfa``."""
    return nfa.remove_epsilon().trim().reduce()


def _term_lang(lang: dict, term, alphabet, delimiter=None) -> Nfa:
    return concat_all(alphabet, [compact(lang[x]) for x in term], delimiter)


# -- equations --------------------------------------------------------------------------


def eq_to_st(lang: dict, eq: Equation, alphabet) -> list[dict]:
    """Refinements of the output variables making ``eq`` stable.

    Each returned dictionary maps the variables of ``eq.rhs`` to refined
    languages.  A variable occurring several times gets the intersection of
    its segments.  Refinements making a variable empty are dropped.
    """
    lhs = _term_lang(lang, eq.lhs, alphabet)
    rhs = _term_lang(lang, eq.rhs, alphabet, RIGHT)
    product = delim_product(rhs, lhs, {RIGHT}).reduce()
    results = []
    for noodle in split_into_noodles(product):
        refined = {}
        ok = True
        for var, seg in zip(eq.rhs, noodle.segments):
            nfa = seg if var not in refined else intersect(refined[var], seg).trim()
            if nfa.is_empty():
                ok = False
                break
            refined[var] = nfa
        if ok:
            results.append({v: nfa.reduce() for v, nfa in refined.items()})
    return results


def eq_to_cf(lang: dict, eq: Equation, fresh, alphabet) -> list[NoodleResult]:
    """Split both sides of ``eq`` into fresh variables aligned on common borders."""
    lhs = _term_lang(lang, eq.lhs, alphabet, LEFT)
    rhs = _term_lang(lang, eq.rhs, alphabet, RIGHT)
    product = delim_product(lhs, rhs, {LEFT, RIGHT}).reduce()
    results = []
    for noodle in split_into_noodles(product):
        res = NoodleResult()
        by_in = defaultdict(list)
        by_out = defaultdict(list)
        for k, seg in enumerate(noodle.segments):
            if _is_epsilon_only(seg):
                continue
            i, j = noodle.index(k)
            v = fresh("v")
            res.lang[v] = seg.reduce()
            by_in[i].append(v)
            by_out[j].append(v)
        res.ins = [Equation((x,), tuple(by_in[i])) for i, x in enumerate(eq.lhs)]
        res.outs = [Equation(tuple(by_out[j]), (y,)) for j, y in enumerate(eq.rhs)]
        results.append(res)
    return results


# -- transducer constraints --------------------------------------------------------------


def delimited_product(lang: dict, tc: TransducerConstraint, alphabet) -> Transducer:
    """The transducer restricted by both sides' languages, with variable borders marked."""
    lhs = Transducer.lift(_term_lang(lang, tc.lhs, alphabet, LEFT))
    rhs = Transducer.lift(_term_lang(lang, tc.rhs, alphabet, RIGHT))
    delims = {LEFT, RIGHT}
    return sync(sync(lhs, tc.transducer, 0, 0, delims), rhs, 1, 0, delims).reduce()


def tr_to_cf(lang: dict, tc: TransducerConstraint, fresh, alphabet) -> list[NoodleResult]:
    """One disjunct per noodle of the delimited product, with a segment constraint per segment."""
    results = []
    for noodle in split_into_noodles(delimited_product(lang, tc, alphabet)):
        res = NoodleResult()
        by_in = defaultdict(list)
        by_out = defaultdict(list)
        for k, seg in enumerate(noodle.segments):
            seg = seg.reduce()
            src, dst = project(seg, 0).reduce(), project(seg, 1).reduce()
            src_eps, dst_eps = _is_epsilon_only(src), _is_epsilon_only(dst)
            if src_eps and dst_eps:
                continue
            i, j = noodle.index(k)
            z, zb = fresh("z"), fresh("zb")
            res.lang[z] = src
            res.lang[zb] = dst
            res.transducers.append(TransducerConstraint(seg, (z,), (zb,), False, f"{tc.name}[{i},{j}]"))
            if not src_eps:
                by_in[i].append(z)
            if not dst_eps:
                by_out[j].append(zb)
        res.ins = [Equation((x,), tuple(by_in[i])) for i, x in enumerate(tc.lhs)]
        res.outs = [Equation(tuple(by_out[j]), (y,)) for j, y in enumerate(tc.rhs)]
        results.append(res)
    return results


def tr_to_st(lang: dict, tc: TransducerConstraint, fresh, alphabet) -> NoodleResult:
    """``T(s, t)`` becomes ``T(s, z)`` and ``z ≈ t`` with ``z`` ranging over the image of ``s``."""
    z = fresh("w")
    img = image(tc.transducer, _term_lang(lang, tc.lhs, alphabet)).reduce()
    return NoodleResult(lang={z: img}, ins=[Equation((z,), tuple(tc.rhs))],
                        transducers=[TransducerConstraint(tc.transducer, tc.lhs, (z,), tc.functional, tc.name)])


def con_to_st(lang, atom, fresh, alphabet) -> list[NoodleResult]:
    if isinstance(atom, Equation):
        return [NoodleResult(lang=r) for r in eq_to_st(lang, atom, alphabet)]
    res = tr_to_st(lang, atom, fresh, alphabet)
    return [] if res.lang[atom_output_var(res)].is_empty() else [res]


def atom_output_var(res: NoodleResult) -> str:
    (z,) = res.transducers[0].rhs
    return z


def con_to_cf(lang, atom, fresh, alphabet) -> list[NoodleResult]:
    if isinstance(atom, Equation):
        return eq_to_cf(lang, atom, fresh, alphabet)
    return tr_to_cf(lang, atom, fresh, alphabet)


def is_stable(lang: dict, atom, alphabet) -> bool:
    """Inclusion of the output language in the input language (or its image)."""
    src = _term_lang(lang, atom.lhs, alphabet)
    if isinstance(atom, TransducerConstraint):
        src = image(atom.transducer, src)
    return includes(src, _term_lang(lang, atom.rhs, alphabet))

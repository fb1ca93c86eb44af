"""Length images: multi-tape composition, Parikh images and binding equations."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from graphlib import CycleError

from . import lia
from .automata import EPS
from .constraints import TransducerConstraint
from .transducer import Transducer, abstract_to_dummy, restrict, sync


@dataclass
class Machine:
    """A composed multi-tape transducer with one tape per variable."""
    transducer: Transducer
    tapes: list


def compose_chain(constraints, lang: dict) -> list[Machine]:
    """Compose concatenation-free transducer constraints into one machine per connected component.

    Each variable occurs at most once as an input, so every component is a
    tree whose edges lead from inputs to outputs.  A component is built from
    its root (the variable that is no input) by repeatedly synchronizing the
    output tape of a constraint with the tape of its output variable.  Every
    tape is finally restricted to its variable's language.
    """
    constraints = list(constraints)
    for c in constraints:
        if not isinstance(c, TransducerConstraint) or len(c.lhs) != 1 or len(c.rhs) != 1:
            raise ValueError(f"{c} is not a concatenation-free transducer constraint")
    by_output = {}
    inputs = set()
    for c in constraints:
        (x,), (y,) = c.lhs, c.rhs
        if x in inputs:
            raise ValueError(f"variable {x} occurs twice as an input")
        if x == y:
            raise CycleError("self loop", [x, x])
        inputs.add(x)
        by_output.setdefault(y, []).append(c)
    outputs = set(by_output)
    roots = sorted(outputs - inputs)
    placed = set()
    machines = []
    for root in roots:
        t = Transducer.lift(lang[root])
        tapes = [root]
        queue = deque([root])
        while queue:
            y = queue.popleft()
            for c in by_output.get(y, ()):
                (x,) = c.lhs
                t = sync(t, c.transducer, tapes.index(y), 1)
                tapes.append(x)
                t = restrict(t, len(tapes) - 1, lang[x])
                placed.add(id(c))
                queue.append(x)
        machines.append(Machine(t.trim(), tapes))
    if len(placed) != len(constraints):
        raise CycleError("the transducer constraints contain a cycle", [])
    return machines


def parikh_image(t: Transducer, tape_vars, prefix: str, tracked=()):
    """Length image of a transducer as an existential LIA formula.

    The encoding uses one counter per transition, a unit source at one initial
    state, a unit sink at one final state, flow conservation at every state
    and a connectivity condition on the used transitions.  The length of tape
    ``k`` is the number of used transitions writing a letter on it.  For a
    tape listed in ``tracked`` the sum of the code points of its letters is
    bound to ``code(var)``.
    """
    t = t.trim()
    if not t.final or not t.initial:
        return lia.FALSE
    counter = [f"#{prefix}t{k}" for k in range(len(t.transitions))]
    start = {q: f"#{prefix}i{q}" for q in sorted(t.initial)}
    stop = {q: f"#{prefix}f{q}" for q in sorted(t.final)}
    parts = [lia.cmp(lia.LinExpr.total(start.values()), "==", 1),
             lia.cmp(lia.LinExpr.total(stop.values()), "==", 1)]
    inflow = {q: [] for q in range(t.n_states)}
    outflow = {q: [] for q in range(t.n_states)}
    for k, (p, _, q) in enumerate(t.transitions):
        outflow[p].append(counter[k])
        inflow[q].append(counter[k])
    for q in range(t.n_states):
        lhs = lia.LinExpr.total(inflow[q]) + (lia.LinExpr.var(start[q]) if q in start else 0)
        rhs = lia.LinExpr.total(outflow[q]) + (lia.LinExpr.var(stop[q]) if q in stop else 0)
        parts.append(lia.cmp(lhs, "==", rhs))
    tracked = set(tracked)
    for tape, var in enumerate(tape_vars):
        writes = [counter[k] for k, (_, lab, _) in enumerate(t.transitions) if lab[tape] != EPS]
        parts.append(lia.cmp(lia.length_var(var), "==", lia.LinExpr.total(writes)))
        if var in tracked:
            code = lia.LinExpr.total(lia.LinExpr.var(counter[k], ord(t.alphabet.chars[lab[tape]]))
                                     for k, (_, lab, _) in enumerate(t.transitions) if lab[tape] != EPS)
            parts.append(lia.cmp(lia.code_var(var), "==", code))
    parts.append(lia.Connected(tuple((p, q, counter[k]) for k, (p, _, q) in enumerate(t.transitions)),
                               tuple(start.items())))
    return lia.conj(parts)


def binding_length_image(seq) -> object:
    """``|x| = |x1| + ... + |xm|`` for every solved equation ``x ≈ x1...xm``."""
    return lia.conj(lia.cmp(lia.length_var(e.lhs[0]), "==", lia.LinExpr.total(lia.length_var(x) for x in e.rhs))
                    for e in seq)


def binding_code_image(seq, tracked) -> object:
    """Code point sums of solved left sides, for variables whose code point is tracked."""
    return lia.conj(lia.cmp(lia.code_var(e.lhs[0]), "==", lia.LinExpr.total(lia.code_var(x) for x in e.rhs))
                    for e in seq if e.lhs[0] in tracked)


def tracked_closure(code_vars, seq) -> set:
    """Variables whose code point sums are needed: the code variables and what they are bound to."""
    bound = {e.lhs[0]: e.rhs for e in seq}
    out = set()
    stack = list(code_vars)
    while stack:
        v = stack.pop()
        if v in out:
            continue
        out.add(v)
        stack.extend(bound.get(v, ()))
    return out


@dataclass
class LengthQuery:
    formula: object
    machines: list = field(default_factory=list)      # composed machines before abstraction
    standalone: list = field(default_factory=list)    # variables with their own one-tape image
    tracked: set = field(default_factory=set)


def length_image(transducers, lang: dict, seq, lvar, code_vars=()) -> LengthQuery:
    """Length image of the concatenation-free part of a vertex.

    ``transducers`` are the constraints whose input is length-aware.  Each
    composed machine is abstracted to a single dummy letter (except on tapes
    whose code points matter) and reduced before its Parikh image is taken.
    Length-aware variables outside these machines that are not solved left
    sides get the Parikh image of their own language.
    """
    seq = list(seq)
    tracked = tracked_closure(code_vars, seq)
    machines = compose_chain(transducers, lang)
    parts = [binding_length_image(seq), binding_code_image(seq, tracked)]
    covered = set()
    for k, m in enumerate(machines):
        keep = [i for i, v in enumerate(m.tapes) if v in tracked]
        small = abstract_to_dummy(m.transducer, keep).reduce()
        parts.append(parikh_image(small, m.tapes, f"m{k}", tracked))
        covered.update(m.tapes)
    solved = {e.lhs[0] for e in seq}
    relevant = set(lvar) | {x for e in seq for x in e.rhs} | tracked
    standalone = sorted(v for v in relevant if v not in covered and v not in solved and v in lang)
    for k, v in enumerate(standalone):
        nfa = lang[v]
        one = Transducer.lift(nfa)
        keep = [0] if v in tracked else []
        small = abstract_to_dummy(one, keep).reduce()
        parts.append(parikh_image(small, [v], f"s{k}", tracked))
    return LengthQuery(lia.conj(parts), machines, standalone, tracked)


def length_vectors(t: Transducer, bound: int) -> set:
    """Tape length vectors of accepted tuples with every component at most ``bound``.

    A direct path exploration, used as an independent check of Parikh images.
    """
    succ = t.succ()
    start = [(q, (0,) * t.arity) for q in t.initial]
    seen = set(start)
    stack = list(start)
    out = set()
    while stack:
        q, vec = stack.pop()
        if q in t.final:
            out.add(vec)
        for lab, r in succ[q]:
            nxt = tuple(n + (x != EPS) for n, x in zip(vec, lab))
            if max(nxt, default=0) > bound:
                continue
            if (r, nxt) not in seen:
                seen.add((r, nxt))
                stack.append((r, nxt))
    return out


def example_machine(alphabet) -> Transducer:
    """Three-tape dummy machine: a loop through two states with three labelled edges."""
    d = 0
    return Transducer(alphabet, 3, 2, [(0, (d, d, d), 1), (1, (EPS, EPS, d), 0), (1, (EPS, d, EPS), 0)],
                      (0,), (0,))

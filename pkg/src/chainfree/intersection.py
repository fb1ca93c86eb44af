"""Bounded intersection-emptiness check for cubes over a single pair of variables.

Cubes such as ``T1(x, y) & T2(x, y)`` or ``T(x, x)`` fall outside the
chain-free fragment.  They are decided here by exploring one synchronized
machine whose first tape carries ``x`` and whose other tapes carry the values
that the individual constraints produce from it.  Tapes forced to hold the
same word are grouped, and the exploration only tracks by how much the tapes
of a group run ahead of each other.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .automata import EPS
from .constraints import Equation, RegularConstraint, TransducerConstraint
from .transducer import Transducer, inverse, restrict, sync


@dataclass
class IntersectionResult:
    status: str                      # "sat", "unsat" or "unknown"
    assignment: dict = field(default_factory=dict)
    reason: str = ""
    configurations: int = 0


@dataclass(frozen=True)
class PairShape:
    """A cube's string constraints as relations from a base variable to a group."""
    base: str
    other: str | None
    relations: tuple                 # (transducer, group) pairs; group is "base" or "other"


def pair_shape(atoms) -> PairShape | None:
    """Recognize cubes whose equations and transducer constraints relate at most two variables."""
    rel = [a for a in atoms if isinstance(a, (Equation, TransducerConstraint))]
    if not rel or any(len(a.lhs) != 1 or len(a.rhs) != 1 for a in rel):
        return None
    names = sorted({a.lhs[0] for a in rel} | {a.rhs[0] for a in rel})
    if len(names) > 2:
        return None
    self_vars = {a.lhs[0] for a in rel if a.lhs == a.rhs}
    if len(names) == 2 and len(self_vars) == 2:
        return None
    base = next(iter(self_vars)) if self_vars else names[0]
    other = next((n for n in names if n != base), None)
    relations = []
    for a in rel:
        if isinstance(a, Equation):
            if a.lhs != a.rhs:
                relations.append(("identity", "other"))
            continue
        t = a.transducer if a.lhs[0] == base else inverse(a.transducer)
        relations.append((t, "base" if a.lhs == a.rhs else "other"))
    return PairShape(base, other, tuple(relations))


def check_pair(shape: PairShape, lang: dict, alphabet, bound: int, budget: int = 200_000) -> IntersectionResult:
    """Explore the synchronized machine up to an overhang of ``bound`` letters between grouped tapes."""
    machine = Transducer.lift(lang[shape.base])
    groups = {"base": [0], "other": []}
    for t, group in shape.relations:
        if t == "identity":
            t = Transducer.identity(alphabet)
        machine = sync(machine, t, 0, 0)
        tape = machine.arity - 1
        groups[group].append(tape)
        target = shape.base if group == "base" else shape.other
        machine = restrict(machine, tape, lang[target])
    machine = machine.trim()
    compared = [tuple(g) for g in (groups["base"], groups["other"]) if len(g) > 1]
    if machine.is_empty_trimmed():
        return IntersectionResult("unsat", reason="the synchronized machine is empty")
    succ = machine.succ()

    def advance(residuals, lab):
        out = []
        for tapes, (lead, lengths) in zip(compared, residuals):
            lead = list(lead)
            lengths = list(lengths)
            for k, tape in enumerate(tapes):
                a = lab[tape]
                if a == EPS:
                    continue
                if lengths[k] < len(lead):
                    if lead[lengths[k]] != a:
                        return None
                else:
                    lead.append(a)
                lengths[k] += 1
            low = min(lengths)
            out.append((tuple(lead[low:]), tuple(n - low for n in lengths)))
        return tuple(out)

    empty = tuple(((), (0,) * len(tapes)) for tapes in compared)
    start = [(q, empty) for q in sorted(machine.initial)]
    parent = {cfg: None for cfg in start}
    queue = deque(start)
    hit = False
    while queue:
        cfg = queue.popleft()
        q, residuals = cfg
        if q in machine.final and all(not lead for lead, _ in residuals):
            return IntersectionResult("sat", _witness(cfg, parent, shape, groups, lang), configurations=len(parent))
        for lab, r in succ[q]:
            nxt_res = advance(residuals, lab)
            if nxt_res is None:
                continue
            if any(len(lead) > bound for lead, _ in nxt_res):
                hit = True
                continue
            nxt = (r, nxt_res)
            if nxt not in parent:
                parent[nxt] = (cfg, lab)
                if len(parent) > budget:
                    return IntersectionResult("unknown", reason="configuration budget exhausted",
                                              configurations=len(parent))
                queue.append(nxt)
    if hit:
        return IntersectionResult("unknown", reason=f"tapes drift apart by more than {bound} letters",
                                  configurations=len(parent))
    return IntersectionResult("unsat", configurations=len(parent))


def _witness(cfg, parent, shape, groups, lang) -> dict:
    labels = []
    while parent[cfg] is not None:
        cfg, lab = parent[cfg]
        labels.append(lab)
    labels.reverse()
    base = tuple(lab[0] for lab in labels if lab[0] != EPS)
    out = {shape.base: base}
    if shape.other is not None:
        if groups["other"]:
            tape = groups["other"][0]
            out[shape.other] = tuple(lab[tape] for lab in labels if lab[tape] != EPS)
        else:
            out[shape.other] = lang[shape.other].shortest_word()
    return out


def regular_languages(atoms) -> dict:
    return {a.var: a.nfa for a in atoms if isinstance(a, RegularConstraint)}

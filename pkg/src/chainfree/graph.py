"""Inclusion graphs over equations and transducer constraints."""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter

from .constraints import Equation, TransducerConstraint
from .transducer import inverse

__all__ = ["CycleError", "InclusionGraph", "build", "dual", "dualize_search", "is_directly_chain_free",
           "toposort", "to_dot"]


@dataclass(frozen=True)
class InclusionGraph:
    nodes: tuple
    edges: frozenset  # pairs of node indices

    def successors(self, i: int) -> list[int]:
        return sorted(j for a, j in self.edges if a == i)

    def is_acyclic(self) -> bool:
        try:
            _order(self)
        except CycleError:
            return False
        return True


def _vars(term) -> set:
    return {x for x in term if isinstance(x, str)}


def build(constraints) -> InclusionGraph:
    """Edge ``(c, d)`` whenever an output variable of ``c`` occurs in the input of ``d``."""
    nodes = tuple(a for a in constraints if isinstance(a, (Equation, TransducerConstraint)))
    outs = [_vars(c.rhs) for c in nodes]
    ins = [_vars(c.lhs) for c in nodes]
    edges = frozenset((i, j) for i in range(len(nodes)) for j in range(len(nodes)) if outs[i] & ins[j])
    return InclusionGraph(nodes, edges)


def has_repeated_input(constraints) -> bool:
    counts = Counter()
    for c in constraints:
        if isinstance(c, (Equation, TransducerConstraint)):
            counts.update(x for x in c.lhs if isinstance(x, str))
    return any(k > 1 for k in counts.values())


def is_directly_chain_free(constraints) -> bool:
    """Acyclic inclusion graph and no variable occurring twice among all input terms."""
    return not has_repeated_input(constraints) and build(constraints).is_acyclic()


def dual(c):
    """Swap the sides of an equation; invert and swap a transducer constraint."""
    if isinstance(c, Equation):
        return Equation(c.rhs, c.lhs)
    if isinstance(c, TransducerConstraint):
        name = c.name[:-3] if c.name.endswith("^-1") else c.name + "^-1"
        return TransducerConstraint(inverse(c.transducer), c.rhs, c.lhs, False, name)
    return c


def _violations(constraints) -> int:
    counts = Counter()
    for c in constraints:
        if isinstance(c, (Equation, TransducerConstraint)):
            counts.update(x for x in c.lhs if isinstance(x, str))
    g = build(constraints)
    back = sum(1 for i, j in g.edges if i >= j)
    return sum(k - 1 for k in counts.values() if k > 1) + back


def dualize_search(constraints, exhaustive_limit: int = 12, greedy_rounds: int = 64):
    """A directly chain-free dual variant of ``constraints`` or ``None``.

    Variants are tried by increasing number of dualized constraints, so an
    already directly chain-free input comes back unchanged.  Above
    ``exhaustive_limit`` relevant constraints a greedy flip search is used.
    """
    constraints = list(constraints)
    idx = [k for k, c in enumerate(constraints) if isinstance(c, (Equation, TransducerConstraint))]
    if is_directly_chain_free(constraints):
        return constraints
    if len(idx) <= exhaustive_limit:
        for size in range(1, len(idx) + 1):
            for subset in itertools.combinations(idx, size):
                cand = [dual(c) if k in subset else c for k, c in enumerate(constraints)]
                if is_directly_chain_free(cand):
                    return cand
        return None
    current = constraints
    score = _violations(current)
    for _ in range(greedy_rounds):
        best = None
        for k in idx:
            cand = list(current)
            cand[k] = dual(cand[k])
            s = _violations(cand)
            if best is None or s < best[0]:
                best = (s, cand)
        if best is None or best[0] >= score:
            break
        score, current = best
        if is_directly_chain_free(current):
            return current
    return None


def _order(g: InclusionGraph) -> list[int]:
    ts = TopologicalSorter()
    for i in range(len(g.nodes)):
        ts.add(i)
    for i, j in g.edges:
        if i == j:
            raise CycleError("self loop", [i, i])
        ts.add(j, i)
    ts.prepare()
    order = []
    while ts.is_active():
        ready = sorted(ts.get_ready())
        order.extend(ready)
        ts.done(*ready)
    return order


def toposort(constraints) -> list:
    """Constraints ordered so that every edge of the inclusion graph points forward.

    Ties are broken by input position.  Raises :class:`graphlib.CycleError` on cycles.
    """
    g = build(constraints)
    return [g.nodes[i] for i in _order(g)]


def to_dot(constraints) -> str:
    g = build(constraints)
    lines = ["digraph inclusion {"]
    for i, c in enumerate(g.nodes):
        label = str(c).replace('"', '\\"')
        lines.append(f'  n{i} [label="{label}"];')
    for i, j in sorted(g.edges):
        lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines)

"""Quantifier-free linear integer arithmetic: formulas, a builtin solver and an SMT-LIB bridge.

Variable naming conventions:

* ``|x|`` is the length of string variable ``x`` (non-negative);
* names starting with ``#`` are auxiliary counters (non-negative, existentially
  quantified, never reported in models);
* any other name is an unrestricted integer variable.
"""
from __future__ import annotations

import shlex
import subprocess
from dataclasses import dataclass, field
from itertools import count
from typing import Iterable

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from . import sexpr


def length_var(x: str) -> str:
    return f"|{x}|"


def code_var(x: str) -> str:
    return f"code({x})"


def is_counter(name: str) -> bool:
    return name.startswith("#")


def is_nonnegative(name: str) -> bool:
    return name.startswith("#") or name.startswith("|")


class LinExpr:
    """``sum(coef * var) + const`` with integer coefficients."""

    __slots__ = ("terms", "const")

    def __init__(self, terms: dict | None = None, const: int = 0):
        self.terms = {v: c for v, c in (terms or {}).items() if c != 0}
        self.const = const

    @classmethod
    def var(cls, name: str, coef: int = 1) -> "LinExpr":
        return cls({name: coef})

    @classmethod
    def lift(cls, value) -> "LinExpr":
        if isinstance(value, LinExpr):
            return value
        if isinstance(value, str):
            return cls.var(value)
        return cls({}, int(value))

    @classmethod
    def total(cls, items: Iterable) -> "LinExpr":
        out = cls()
        for it in items:
            out = out + it
        return out

    def __add__(self, other):
        other = LinExpr.lift(other)
        terms = dict(self.terms)
        for v, c in other.terms.items():
            terms[v] = terms.get(v, 0) + c
        return LinExpr(terms, self.const + other.const)

    __radd__ = __add__

    def __neg__(self):
        return LinExpr({v: -c for v, c in self.terms.items()}, -self.const)

    def __sub__(self, other):
        return self + (-LinExpr.lift(other))

    def __rsub__(self, other):
        return LinExpr.lift(other) - self

    def __mul__(self, k: int):
        return LinExpr({v: c * k for v, c in self.terms.items()}, self.const * k)

    __rmul__ = __mul__

    def variables(self) -> set:
        return set(self.terms)

    def evaluate(self, model: dict) -> int:
        return self.const + sum(c * model.get(v, 0) for v, c in self.terms.items())

    def rename(self, mapping) -> "LinExpr":
        out = {}
        for v, c in self.terms.items():
            w = mapping(v)
            out[w] = out.get(w, 0) + c
        return LinExpr(out, self.const)

    def key(self):
        return (tuple(sorted(self.terms.items())), self.const)

    def __eq__(self, other):
        return isinstance(other, LinExpr) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        parts = [f"{c}*{v}" if c != 1 else v for v, c in sorted(self.terms.items())]
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts)


_OPS = ("<=", "==", "!=", ">=", "<", ">")


@dataclass(frozen=True)
class Cmp:
    """``expr op 0``."""
    expr: LinExpr
    op: str

    def __post_init__(self):
        if self.op not in _OPS:
            raise ValueError(f"unknown comparison {self.op!r}")

    def holds(self, model: dict) -> bool:
        v = self.expr.evaluate(model)
        return {"<=": v <= 0, "==": v == 0, "!=": v != 0, ">=": v >= 0, "<": v < 0, ">": v > 0}[self.op]

    def variables(self) -> set:
        return self.expr.variables()


@dataclass(frozen=True)
class And:
    parts: tuple

    def variables(self) -> set:
        return set().union(*(p.variables() for p in self.parts)) if self.parts else set()


@dataclass(frozen=True)
class Or:
    parts: tuple

    def variables(self) -> set:
        return set().union(*(p.variables() for p in self.parts)) if self.parts else set()


TRUE = And(())
FALSE = Or(())


@dataclass(frozen=True, eq=False)
class Connected:
    """Connectivity side condition of a flow encoding.

    ``transitions`` lists ``(source state, target state, counter)``;
    ``sources`` maps states to their start indicator variable.  The condition
    says that every used transition is reachable from the start state along
    used transitions.
    """
    transitions: tuple
    sources: tuple

    def variables(self) -> set:
        return {c for _, _, c in self.transitions} | {s for _, s in self.sources}


def cmp(lhs, op: str, rhs=0) -> Cmp:
    return Cmp(LinExpr.lift(lhs) - LinExpr.lift(rhs), op)


def conj(parts: Iterable) -> object:
    flat = []
    for p in parts:
        if isinstance(p, And):
            flat.extend(p.parts)
        elif p is FALSE or (isinstance(p, Or) and not p.parts):
            return FALSE
        else:
            flat.append(p)
    return And(tuple(flat))


def disj(parts: Iterable) -> object:
    flat = []
    for p in parts:
        if isinstance(p, Or):
            flat.extend(p.parts)
        elif isinstance(p, And) and not p.parts:
            return TRUE
        else:
            flat.append(p)
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def evaluate(f, model: dict) -> bool:
    if isinstance(f, Cmp):
        return f.holds(model)
    if isinstance(f, And):
        return all(evaluate(p, model) for p in f.parts)
    if isinstance(f, Or):
        return any(evaluate(p, model) for p in f.parts)
    if isinstance(f, Connected):
        return _disconnected(f, model) is None
    raise TypeError(f"not a formula: {f!r}")


def free_variables(f) -> set:
    return {v for v in f.variables() if not is_counter(v)}


# -- builtin solver -------------------------------------------------------------------


@dataclass
class LiaResult:
    status: str  # "sat", "unsat" or "unknown"
    model: dict = field(default_factory=dict)
    reason: str = ""


def _disconnected(c: Connected, model: dict):
    """States unreachable from the chosen start along used transitions, if any are used."""
    start = [q for q, s in c.sources if model.get(s, 0) >= 1]
    used = [(p, q) for p, q, x in c.transitions if model.get(x, 0) >= 1]
    reach = set(start)
    changed = True
    while changed:
        changed = False
        for p, q in used:
            if p in reach and q not in reach:
                reach.add(q)
                changed = True
    if all(p in reach for p, _ in used):
        return None
    return {p for p, _ in used if p not in reach} | {q for _, q in used if q not in reach}


def _cut(c: Connected, unreached: set):
    inside = [x for p, _, x in c.transitions if p in unreached]
    entering = [x for p, q, x in c.transitions if p not in unreached and q in unreached]
    starts = [s for q, s in c.sources if q in unreached]
    return Or((cmp(LinExpr.total(inside), "<="), cmp(LinExpr.total(entering + starts), ">=", 1)))


def _solve_conjunction(cmps: list, variables: list):
    """Integer feasibility of a conjunction of linear comparisons (no ``!=``)."""
    if not variables:
        ok = all(c.holds({}) for c in cmps)
        return ("sat", {}) if ok else ("unsat", None)
    index = {v: i for i, v in enumerate(variables)}
    rows, lo, hi = [], [], []
    for c in cmps:
        row = np.zeros(len(variables))
        for v, k in c.expr.terms.items():
            row[index[v]] = k
        b = -c.expr.const
        if c.op == "<=":
            rows.append(row); lo.append(-np.inf); hi.append(b)
        elif c.op == "<":
            rows.append(row); lo.append(-np.inf); hi.append(b - 1)
        elif c.op == ">=":
            rows.append(row); lo.append(b); hi.append(np.inf)
        elif c.op == ">":
            rows.append(row); lo.append(b + 1); hi.append(np.inf)
        elif c.op == "==":
            rows.append(row); lo.append(b); hi.append(b)
        else:
            raise ValueError("disequalities must be split before solving")
    lb = np.array([0.0 if is_nonnegative(v) else -np.inf for v in variables])
    ub = np.full(len(variables), np.inf)
    obj = np.array([1.0 if is_nonnegative(v) else 0.0 for v in variables])
    constraints = [LinearConstraint(np.array(rows), np.array(lo), np.array(hi))] if rows else []
    res = milp(obj, constraints=constraints, integrality=np.ones(len(variables)), bounds=Bounds(lb, ub))
    if res.status == 2:
        return ("unsat", None)
    if res.x is None:
        return ("unknown", None)
    model = {v: int(round(res.x[i])) for v, i in index.items()}
    if not all(c.holds(model) for c in cmps):
        return ("unknown", None)
    return ("sat", model)


def solve(formula, backend: str = "builtin", node_budget: int = 5000, timeout_s: float | None = None) -> LiaResult:
    """Decide satisfiability of ``formula`` and return a model over its free variables.

    ``backend`` is ``"builtin"`` or ``"external:<command>"``.
    """
    if backend.startswith("external:"):
        return solve_external(formula, backend[len("external:"):], timeout_s)
    if backend != "builtin":
        raise ValueError(f"unknown LIA backend {backend!r}")
    variables = sorted(formula.variables())
    # A node holds unprocessed parts, collected comparisons, connectivity
    # conditions and postponed disjunctions.  Disjunctions are only split
    # when the model of the collected comparisons violates them.
    stack = [((formula,), (), (), ())]
    nodes = 0
    unknown = False
    while stack:
        pending, cmps, conns, ors = stack.pop()
        nodes += 1
        if nodes > node_budget:
            return LiaResult("unknown", reason=f"node budget {node_budget} exhausted")
        pending = list(pending)
        cmps = list(cmps)
        conns = list(conns)
        ors = list(ors)
        consistent = True
        while pending:
            f = pending.pop()
            if isinstance(f, Cmp):
                if f.op == "!=":
                    ors.append(Or((Cmp(f.expr, "<"), Cmp(f.expr, ">"))))
                elif not f.expr.terms:
                    if not f.holds({}):
                        consistent = False
                        break
                else:
                    cmps.append(f)
            elif isinstance(f, And):
                pending.extend(f.parts)
            elif isinstance(f, Connected):
                conns.append(f)
            elif isinstance(f, Or):
                if not f.parts:
                    consistent = False
                    break
                ors.append(f)
            else:
                raise TypeError(f"not a formula: {f!r}")
        if not consistent:
            continue
        status, model = _solve_conjunction(cmps, variables)
        if status == "unknown":
            unknown = True
            continue
        if status == "unsat":
            continue
        model = {v: model.get(v, 0) for v in variables}
        violated = next((k for k, f in enumerate(ors) if not evaluate(f, model)), None)
        if violated is not None:
            rest = tuple(ors[:violated] + ors[violated + 1:])
            for part in reversed(ors[violated].parts):
                stack.append(((part,), tuple(cmps), tuple(conns), rest))
            continue
        cuts = []
        for c in conns:
            unreached = _disconnected(c, model)
            if unreached is not None:
                cuts.append(_cut(c, unreached))
        if cuts:
            stack.append((tuple(cuts), tuple(cmps), tuple(conns), tuple(ors)))
            continue
        return LiaResult("sat", model)
    if unknown:
        return LiaResult("unknown", reason="numerical trouble in the integer programming backend")
    return LiaResult("unsat")


# -- SMT-LIB bridge ---------------------------------------------------------------------


def _expand_connected(f, fresh):
    """Replace connectivity conditions by depth-variable encodings."""
    if isinstance(f, Connected):
        states = sorted({p for p, _, _ in f.transitions} | {q for _, q, _ in f.transitions} | {q for q, _ in f.sources})
        depth = {q: f"#depth{fresh()}" for q in states}
        start = dict(f.sources)
        parts = []
        for q in states:
            incoming = [(p, x) for p, r, x in f.transitions if r == q]
            options = [cmp(LinExpr.total(x for _, x in incoming), "<=")]
            if q in start:
                options.append(cmp(start[q], ">=", 1))
            for p, x in incoming:
                options.append(And((cmp(x, ">=", 1), cmp(LinExpr.var(depth[p]) + 1, "<=", depth[q]))))
            parts.append(disj(options))
        return conj(parts)
    if isinstance(f, And):
        return And(tuple(_expand_connected(p, fresh) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(_expand_connected(p, fresh) for p in f.parts))
    return f


def _term(expr: LinExpr, names: dict) -> str:
    parts = []
    for v, c in sorted(expr.terms.items()):
        name = names[v]
        if c == 1:
            parts.append(name)
        elif c < 0:
            parts.append(f"(* (- {-c}) {name})")
        else:
            parts.append(f"(* {c} {name})")
    if not parts:
        return "0"
    return parts[0] if len(parts) == 1 else "(+ " + " ".join(parts) + ")"


def _num(k: int) -> str:
    return str(k) if k >= 0 else f"(- {-k})"


def _formula_text(f, names: dict) -> str:
    if isinstance(f, Cmp):
        lhs = _term(LinExpr(f.expr.terms), names)
        rhs = _num(-f.expr.const)
        if f.op == "!=":
            return f"(not (= {lhs} {rhs}))"
        op = "=" if f.op == "==" else f.op
        return f"({op} {lhs} {rhs})"
    if isinstance(f, And):
        if not f.parts:
            return "true"
        if len(f.parts) == 1:
            return _formula_text(f.parts[0], names)
        return "(and " + " ".join(_formula_text(p, names) for p in f.parts) + ")"
    if isinstance(f, Or):
        if not f.parts:
            return "false"
        if len(f.parts) == 1:
            return _formula_text(f.parts[0], names)
        return "(or " + " ".join(_formula_text(p, names) for p in f.parts) + ")"
    raise TypeError(f"cannot print {f!r}")


def to_smtlib(formula) -> tuple[str, dict]:
    """SMT-LIB2 script for ``formula`` and the map from sanitized names back to variables."""
    counter = count()
    formula = _expand_connected(formula, lambda: next(counter))
    variables = sorted(formula.variables())
    names = {v: f"v{i}" for i, v in enumerate(variables)}
    bounds = [cmp(v, ">=") for v in variables if is_nonnegative(v)]
    body = conj(bounds + [formula])
    lines = ["(set-logic LIA)"]
    lines += [f"(declare-fun {names[v]} () Int)" for v in variables]
    lines.append(f"(assert {_formula_text(body, names)})")
    lines.append("(check-sat)")
    free = [names[v] for v in variables if not is_counter(v)]
    if free:
        lines.append("(get-value (" + " ".join(free) + "))")
    return "\n".join(lines) + "\n", {n: v for v, n in names.items()}


def _value(e) -> int:
    if isinstance(e, int):
        return e
    if isinstance(e, list) and len(e) == 2 and e[0] == "-":
        return -_value(e[1])
    raise ValueError(f"unexpected value {sexpr.dump(e)}")


def solve_external(formula, command: str, timeout_s: float | None = None) -> LiaResult:
    script, back = to_smtlib(formula)
    try:
        proc = subprocess.run(shlex.split(command), input=script, capture_output=True, text=True,
                              timeout=timeout_s)
    except (OSError, subprocess.SubprocessError) as exc:
        return LiaResult("unknown", reason=f"external solver failed: {exc}")
    try:
        items = sexpr.parse(proc.stdout)
    except sexpr.ParseError as exc:
        return LiaResult("unknown", reason=f"unreadable solver output: {exc}")
    if not items or items[0] not in ("sat", "unsat", "unknown"):
        return LiaResult("unknown", reason=f"unexpected solver output: {proc.stdout.strip()[:200]} {proc.stderr.strip()[:200]}")
    if items[0] != "sat":
        return LiaResult(items[0], reason="reported by external solver" if items[0] == "unknown" else "")
    model = {}
    for entry in items[1:]:
        if isinstance(entry, list):
            for pair in entry:
                if isinstance(pair, list) and len(pair) == 2 and pair[0] in back:
                    model[back[pair[0]]] = _value(pair[1])
    return LiaResult("sat", model)

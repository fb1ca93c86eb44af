"""Worklist decision procedure over proof vertices.

A vertex holds the equations and transducer constraints still in play, a
frontier of constraints to process (kept in topological order), the current
language of every variable, the solved equations and the length-aware
variables.  Rules rewrite the constraint on top of the frontier; once the
frontier is empty the remaining system is in a form whose satisfiability is
decided by the length image.
"""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field, replace
from graphlib import CycleError

from . import lia
from .automata import Nfa, concat_all, includes
from .constraints import (CodePointAtom, Cube, Equation, Fresh, LengthAtom, NegatedNonFunctionalTransducer,
                          RegularConstraint, TransducerConstraint, code_point_lia, desugar_literals,
                          eliminate_negation, evaluate_cube, normalize_regular)
from .graph import dualize_search, toposort
from .intersection import check_pair, pair_shape
from .lengths import length_image
from .noodles import compact, con_to_cf, con_to_st, is_stable
from .transducer import image, is_homomorphism_syntactic, preimage

RULE_ORDER = ("RSubst", "LSubst", "RedTrans", "Skip", "HomTrans", "RefineSt", "CombNL", "RefineCF")


@dataclass(frozen=True, eq=False)
class Vertex:
    nodes: tuple
    frontier: tuple
    lang: dict
    seq: tuple
    lvar: frozenset


@dataclass
class SolverConfig:
    hom_heuristic: bool = True
    intersect_heuristic: bool = True
    red_trans: bool = True
    intersect_bound: int = 4
    max_steps: int = 20_000
    timeout_s: float | None = None
    lia_backend: str = "builtin"
    lia_node_budget: int = 5000
    dualize_limit: int = 12
    functional_bound: int = 8
    produce_models: bool = True
    model_budget: int = 200_000
    trace: object = None            # callable receiving one line per rule application

    def __post_init__(self):
        if self.intersect_bound < 1:
            raise ValueError("the intersection bound must be at least 1")


@dataclass
class Stats:
    vertices: int = 0
    rules: Counter = field(default_factory=Counter)
    hom_declined: int = 0
    lia_calls: int = 0
    cubes: int = 0
    heuristic_configurations: int = 0

    def as_dict(self) -> dict:
        return {"vertices": self.vertices, "rules": dict(sorted(self.rules.items())),
                "hom_declined": self.hom_declined, "lia_calls": self.lia_calls, "cubes": self.cubes,
                "heuristic_configurations": self.heuristic_configurations}


@dataclass
class SolveResult:
    status: str                     # "sat", "unsat" or "unknown"
    model: dict | None = None       # variable -> word as a tuple of symbols
    ints: dict | None = None
    reason: str = ""
    stats: Stats = field(default_factory=Stats)


# -- term helpers -------------------------------------------------------------------------


def substitute_term(term, var, value) -> tuple:
    out = []
    for x in term:
        out.extend(value if x == var else (x,))
    return tuple(out)


def substitute(atom, var, value):
    return replace(atom, lhs=substitute_term(atom.lhs, var, value), rhs=substitute_term(atom.rhs, var, value))


def term_lang(lang: dict, term, alphabet) -> Nfa:
    return concat_all(alphabet, [lang[x] for x in term])


def len_fw(constraints, lvar) -> frozenset:
    """Output variables of constraints whose input meets ``lvar``, added to ``lvar``."""
    out = set(lvar)
    for c in constraints:
        if set(c.lhs) & set(lvar):
            out |= set(c.rhs)
    return frozenset(out)


def len_bw(constraints, lvar) -> frozenset:
    """Input variables of constraints whose output meets ``lvar``, added to ``lvar``."""
    out = set(lvar)
    for c in constraints:
        if set(c.rhs) & set(lvar):
            out |= set(c.lhs)
    return frozenset(out)


def uniform(term, lvar, fresh):
    """Merge every maximal block of at least two non-length-aware variables into one fresh variable."""
    new, eqs = [], []
    block = []

    def flush():
        if len(block) >= 2:
            x = fresh("c")
            eqs.append(Equation(tuple(block), (x,)))
            new.append(x)
        else:
            new.extend(block)
        block.clear()

    for x in term:
        if x in lvar:
            flush()
            new.append(x)
        else:
            block.append(x)
    flush()
    return tuple(new), eqs


def push(items, frontier) -> tuple:
    """``items`` in topological order on top of ``frontier``."""
    items = list(dict.fromkeys(items))
    try:
        items = toposort(items)
    except CycleError:
        pass
    return tuple(items) + tuple(frontier)


def _dedupe(atoms) -> tuple:
    return tuple(dict.fromkeys(a for a in atoms if not (isinstance(a, Equation) and a.lhs == a.rhs)))


# -- the procedure ------------------------------------------------------------------------


class Procedure:
    """Runs the rules on one positive, directly chain-free cube."""

    def __init__(self, alphabet, fresh: Fresh, config: SolverConfig, stats: Stats, length_formula=lia.TRUE,
                 code_atoms=(), initial_lang=None):
        self.alphabet = alphabet
        self.fresh = fresh
        self.config = config
        self.stats = stats
        self.length_formula = length_formula
        self.code_atoms = tuple(code_atoms)
        self.initial_lang = initial_lang or {}
        self.lia_unknown = False
        self.deadline = None

    # -- driver -------------------------------------------------------------------------

    def initial_vertex(self, constraints, lang, lvar) -> Vertex:
        nodes = _dedupe(constraints)
        return Vertex(nodes, tuple(toposort(nodes)), dict(lang), (), frozenset(lvar))

    def run(self, start: Vertex):
        """Depth-first search; returns ``("sat", vertex, query, lia_model)``, ``("unsat",)`` or ``("unknown", reason)``."""
        if self.config.timeout_s is not None:
            self.deadline = time.monotonic() + self.config.timeout_s
        stack = [start]
        steps = 0
        while stack:
            v = stack.pop()
            steps += 1
            self.stats.vertices += 1
            if steps > self.config.max_steps:
                return ("unknown", f"step limit {self.config.max_steps} reached")
            if self.deadline is not None and time.monotonic() > self.deadline:
                return ("unknown", "time limit reached")
            if not v.frontier:
                found = self.len_image(v)
                if found is not None:
                    return ("sat", v) + found
                continue
            conclusions = self.step(v)
            stack.extend(reversed(conclusions))
        if self.lia_unknown:
            return ("unknown", "the length constraint solver gave up on some branch")
        return ("unsat",)

    def step(self, v: Vertex) -> list:
        head = v.frontier[0]
        if head not in v.nodes:
            self._trace("Drop", head, 1)
            return [replace(v, frontier=v.frontier[1:])]
        if isinstance(head, Equation) and head.lhs == head.rhs:
            self._trace("Drop", head, 1)
            return [replace(v, nodes=tuple(a for a in v.nodes if a != head), frontier=v.frontier[1:])]
        for name in RULE_ORDER:
            out = getattr(self, "rule_" + name.lower())(v, head)
            if out is not None:
                self.stats.rules[name] += 1
                self._trace(name, head, len(out))
                return out
        raise RuntimeError(f"no rule applies to {head}")

    def _trace(self, name, head, k):
        if self.config.trace is not None:
            label = f"{name} {head}" if head != "" else name
            self.config.trace(f"{label} -> {k}")

    def lang_of(self, v: Vertex, term) -> Nfa:
        return term_lang(v.lang, term, self.alphabet)

    # -- substitution rules -----------------------------------------------------------

    def rule_rsubst(self, v: Vertex, head):
        if not isinstance(head, Equation) or len(head.rhs) != 1:
            return None
        (x,), s = head.rhs, head.lhs
        if x in s:
            return None
        if x in v.lvar and not set(s) <= v.lvar:
            return None
        src = self.lang_of(v, s)
        if not includes(v.lang[x], src):
            return None
        rest = [a for a in v.nodes if a != head]
        # Readers of x only need another look when the substitution shrinks the language of x.
        hset = [] if includes(src, v.lang[x]) else [a for a in rest if x in a.lhs]
        if len(s) > 1:
            hset += [a for a in rest if isinstance(a, TransducerConstraint) and x in a.rhs
                     and len(a.lhs) == 1 and a.lhs[0] in v.lvar]
        return [self._substituted(v, head, rest, hset, x, s)]

    def rule_lsubst(self, v: Vertex, head):
        if not isinstance(head, Equation) or len(head.lhs) != 1:
            return None
        (x,), s = head.lhs, head.rhs
        if x in s:
            return None
        if not ({x} | set(s)) <= v.lvar:
            return None
        if not includes(v.lang[x], self.lang_of(v, s)):
            return None
        rest = [a for a in v.nodes if a != head]
        hset = []
        if len(s) > 1:
            hset = [a for a in rest if isinstance(a, TransducerConstraint) and x in a.rhs
                    and len(a.lhs) == 1 and a.lhs[0] in v.lvar]
        return [self._substituted(v, head, rest, hset, x, s)]

    def _substituted(self, v, head, rest, hset, x, s) -> Vertex:
        nodes = _dedupe(substitute(a, x, s) for a in rest)
        frontier = tuple(substitute(a, x, s) for a in v.frontier[1:])
        frontier = tuple(a for a in dict.fromkeys(frontier) if a in nodes)
        h = [a for a in dict.fromkeys(substitute(a, x, s) for a in hset) if a not in frontier and a in nodes]
        seq = tuple(Equation(e.lhs, substitute_term(e.rhs, x, s)) for e in v.seq) + (Equation((x,), tuple(s)),)
        return Vertex(nodes, push(h, frontier), v.lang, seq, v.lvar)

    # -- heuristics ---------------------------------------------------------------------

    def rule_redtrans(self, v: Vertex, head):
        if not self.config.red_trans or not isinstance(head, TransducerConstraint):
            return None
        src = self.lang_of(v, head.lhs)
        if src.is_singleton() is not None:
            f = self.fresh("f")
            new = Equation((f,), head.rhs)
            lang = dict(v.lang)
            lang[f] = compact(image(head.transducer, src))
        else:
            dst = self.lang_of(v, head.rhs)
            if dst.is_singleton() is None:
                return None
            f = self.fresh("f")
            new = Equation(head.lhs, (f,))
            lang = dict(v.lang)
            lang[f] = compact(preimage(head.transducer, dst))
        if lang[f].is_empty():
            return []
        nodes = _dedupe([a for a in v.nodes if a != head] + [new])
        return [Vertex(nodes, (new,) + v.frontier[1:], lang, v.seq, v.lvar)]

    def rule_homtrans(self, v: Vertex, head):
        if not self.config.hom_heuristic or not isinstance(head, TransducerConstraint):
            return None
        if len(head.lhs) < 2 or not set(head.lhs) & v.lvar:
            return None
        if not is_homomorphism_syntactic(head.transducer):
            self.stats.hom_declined += 1
            return None
        lang = dict(v.lang)
        parts, outs = [], []
        for k, x in enumerate(head.lhs):
            f = self.fresh("h")
            lang[f] = compact(image(head.transducer, v.lang[x]))
            if lang[f].is_empty():
                return []
            parts.append(TransducerConstraint(head.transducer, (x,), (f,), head.functional, f"{head.name}.{k}"))
            outs.append(f)
        hset = parts + [Equation(tuple(outs), head.rhs)]
        nodes = _dedupe([a for a in v.nodes if a != head] + hset)
        return [Vertex(nodes, push(hset, v.frontier[1:]), lang, v.seq, v.lvar)]

    # -- refinement rules --------------------------------------------------------------

    def rule_skip(self, v: Vertex, head):
        if set(head.lhs) & v.lvar:
            return None
        if not is_stable(v.lang, head, self.alphabet):
            return None
        return [replace(v, frontier=v.frontier[1:])]

    def rule_refinest(self, v: Vertex, head):
        if set(head.lhs) & v.lvar:
            return None
        out = []
        for res in con_to_st(v.lang, head, self.fresh, self.alphabet):
            lang = dict(v.lang)
            lang.update(res.lang)
            if isinstance(head, Equation):
                out.append(Vertex(v.nodes, v.frontier[1:], lang, v.seq, v.lvar))
            else:
                nodes = _dedupe([a for a in v.nodes if a != head] + res.transducers + res.ins)
                out.append(Vertex(nodes, push(res.ins, v.frontier[1:]), lang, v.seq, v.lvar))
        return out

    def rule_combnl(self, v: Vertex, head):
        new_lhs, eqs = uniform(head.lhs, v.lvar, self.fresh)
        if not eqs:
            return None
        lang = dict(v.lang)
        for e in eqs:
            lang[e.rhs[0]] = compact(self.lang_of(v, e.lhs))
        new_head = replace(head, lhs=new_lhs)
        nodes = _dedupe([new_head if a == head else a for a in v.nodes] + eqs)
        return [Vertex(nodes, (new_head,) + v.frontier[1:], lang, v.seq, v.lvar)]

    def rule_refinecf(self, v: Vertex, head):
        out = []
        for res in con_to_cf(v.lang, head, self.fresh, self.alphabet):
            lang = dict(v.lang)
            lang.update(res.lang)
            if any(lang[x].is_empty() for x in res.lang):
                continue
            binding = res.ins + res.outs
            nodes = _dedupe([a for a in v.nodes if a != head] + binding + res.transducers)
            added = len_fw(res.transducers, len_fw(res.ins, v.lvar)) | len_bw(res.outs, v.lvar)
            out.append(Vertex(nodes, push(binding, v.frontier[1:]), lang, v.seq, v.lvar | added))
        return out

    # -- length image ------------------------------------------------------------------

    def concatenation_free_part(self, v: Vertex):
        """Transducer constraints with a length-aware input, with empty outputs given a placeholder."""
        part = []
        lang = dict(v.lang)
        for a in v.nodes:
            if isinstance(a, TransducerConstraint) and set(a.lhs) & v.lvar:
                if len(a.lhs) != 1 or len(a.rhs) > 1:
                    raise AssertionError(f"{a} is not concatenation-free")
                if not a.rhs:
                    e = self.fresh("e")
                    lang[e] = Nfa.epsilon(self.alphabet)
                    a = replace(a, rhs=(e,))
                part.append(a)
        return part, lang

    def length_query(self, v: Vertex):
        part, lang = self.concatenation_free_part(v)
        codes = sorted({c for atom in self.code_atoms for c in (atom.first, atom.second)})
        seq = [e for e in v.seq if e.lhs[0] in v.lvar or e.lhs[0] in codes]
        query = length_image(part, lang, seq, v.lvar, codes)
        extra = []
        for atom in self.code_atoms:
            extra.append(lia.cmp(lia.code_var(atom.first), "!=", lia.code_var(atom.second)))
            for c in (atom.first, atom.second):
                extra.append(code_point_lia(c, self.initial_lang.get(c) or lang[c]))
        return query, lia.conj([query.formula, self.length_formula] + extra)

    def len_image(self, v: Vertex):
        query, formula = self.length_query(v)
        self.stats.lia_calls += 1
        res = lia.solve(formula, self.config.lia_backend, self.config.lia_node_budget, self.config.timeout_s)
        self._trace("LenImage", "", 1 if res.status == "sat" else 0)
        if res.status == "sat":
            self.stats.rules["LenImage"] += 1
            return (query, res.model)
        if res.status == "unknown":
            self.lia_unknown = True
        return None


# -- preprocessing and the public entry point -------------------------------------------


def _length_parts(atoms):
    formulas = [a.formula for a in atoms if isinstance(a, LengthAtom)]
    codes = [a for a in atoms if isinstance(a, CodePointAtom)]
    return lia.conj(formulas), codes


def split_cube(cube: Cube):
    """Constraints, languages, length formula and code point atoms of a normalized cube."""
    constraints = [a for a in cube.atoms if isinstance(a, (Equation, TransducerConstraint))]
    constraints = [a for a in constraints if not (isinstance(a, Equation) and a.lhs == a.rhs)]
    lang = {a.var: a.nfa for a in cube.atoms if isinstance(a, RegularConstraint)}
    formula, codes = _length_parts(cube.atoms)
    return constraints, lang, formula, codes


def prepare(cube: Cube, fresh: Fresh, config: SolverConfig) -> list[Cube]:
    """Positive cubes with literals desugared and exactly one language per variable."""
    cube = desugar_literals(cube, fresh)
    return [normalize_regular(c) for c in eliminate_negation(cube, fresh, config.functional_bound)]


def solve(cube: Cube, config: SolverConfig | None = None) -> SolveResult:
    """Satisfiability of a cube (possibly with negated atoms)."""
    config = config or SolverConfig()
    stats = Stats()
    taken = set(cube.string_vars())
    for a in cube.atoms:
        if isinstance(a, LengthAtom):
            taken |= lia.free_variables(a.formula)
    fresh = Fresh(taken)
    try:
        cubes = prepare(cube, fresh, config)
    except NegatedNonFunctionalTransducer as exc:
        return SolveResult("unknown", reason=str(exc), stats=stats)
    reasons = []
    for positive in cubes:
        stats.cubes += 1
        result = _solve_positive(positive, fresh, config, stats)
        if result.status == "sat":
            if result.model is not None:
                if not evaluate_cube(cube, result.model, result.ints):
                    result.reason = "the constructed model violates the input cube"
                    result.model = result.ints = None
                else:
                    result.model = {x: w for x, w in result.model.items() if x in taken}
            return result
        if result.status == "unknown":
            reasons.append(result.reason)
    if reasons:
        return SolveResult("unknown", reason="; ".join(reasons), stats=stats)
    return SolveResult("unsat", stats=stats)


def _solve_positive(cube: Cube, fresh: Fresh, config: SolverConfig, stats: Stats) -> SolveResult:
    from .model import ModelSearchExceeded, build_model

    constraints, lang, formula, codes = split_cube(cube)
    if any(nfa.is_empty() for nfa in lang.values()):
        return SolveResult("unsat", stats=stats)
    directed = dualize_search(constraints, config.dualize_limit)
    if directed is None:
        return _heuristic(cube, constraints, lang, formula, codes, config, stats)
    lvar = set()
    for a in cube.atoms:
        if isinstance(a, LengthAtom):
            lvar |= a.string_vars()
    lvar |= {c for atom in codes for c in (atom.first, atom.second)}
    proc = Procedure(cube.alphabet, fresh, config, stats, formula, codes, lang)
    outcome = proc.run(proc.initial_vertex(directed, lang, lvar))
    if outcome[0] != "sat":
        reason = outcome[1] if len(outcome) > 1 else ""
        return SolveResult(outcome[0], reason=reason, stats=stats)
    _, vertex, query, model = outcome
    if not config.produce_models:
        return SolveResult("sat", stats=stats)
    try:
        words, ints = build_model(vertex, query, model, cube, config.model_budget)
    except ModelSearchExceeded as exc:
        return SolveResult("sat", reason=f"model search gave up: {exc}", stats=stats)
    return SolveResult("sat", words, ints, stats=stats)


def _heuristic(cube, constraints, lang, formula, codes, config, stats) -> SolveResult:
    if not config.intersect_heuristic:
        return SolveResult("unknown", reason="the cube is not chain-free", stats=stats)
    shape = pair_shape(constraints)
    if shape is None:
        return SolveResult("unknown", reason="the cube is not chain-free and has no supported shape", stats=stats)
    res = check_pair(shape, lang, cube.alphabet, config.intersect_bound)
    stats.heuristic_configurations += res.configurations
    stats.rules["Intersection"] += 1
    if res.status != "sat":
        return SolveResult(res.status, reason=res.reason, stats=stats)
    words = dict(res.assignment)
    for x, nfa in lang.items():
        words.setdefault(x, nfa.shortest_word())
    if lia.free_variables(formula) - {lia.length_var(x) for x in words}:
        return SolveResult("unknown", reason="integer variables are not supported by the intersection check",
                           stats=stats)
    if evaluate_cube(cube, words):
        return SolveResult("sat", words, {}, stats=stats)
    return SolveResult("unknown", reason="the intersection witness violates other constraints", stats=stats)

"""Independent brute-force oracles and random instance generators for the test suites.

The oracles work on plain Python strings and never call the solver's
automata or transducer code, so agreement with the solver is meaningful.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from chainfree import lia
from chainfree.automata import Alphabet, Nfa
from chainfree.constraints import (Cube, Equation, LengthAtom, Not, RegularConstraint, TransducerConstraint)
from chainfree.replaceall import compile_replace, literal_spec
from chainfree.transducer import Transducer

SIGMA = "ab"


def words_up_to(letters: str, n: int) -> list[str]:
    out = [""]
    for k in range(1, n + 1):
        out += ["".join(p) for p in itertools.product(letters, repeat=k)]
    return out


# -- relations with a string-level reference ---------------------------------------------


@dataclass
class Relation:
    name: str
    transducer: Transducer
    outputs: object              # input string -> set of output strings
    functional: bool


def _letter_map(alphabet, name, mapping, functional=True):
    trans = []
    states = 1
    for a, out in mapping.items():
        if not out:
            trans.append((0, (alphabet.symbol(a), -1), 0))
            continue
        prev = 0
        for k, b in enumerate(out):
            last = k == len(out) - 1
            nxt = 0 if last else states
            if not last:
                states += 1
            trans.append((prev, (alphabet.symbol(a) if k == 0 else -1, alphabet.symbol(b)), nxt))
            prev = nxt
    t = Transducer(alphabet, 2, states, trans, (0,), (0,))
    return Relation(name, t, lambda w: {"".join(mapping[c] for c in w)}, functional)


def relation_pool(alphabet: Alphabet) -> list[Relation]:
    pool = [
        _letter_map(alphabet, "id", {"a": "a", "b": "b"}),
        _letter_map(alphabet, "swap", {"a": "b", "b": "a"}),
        _letter_map(alphabet, "dropA", {"a": "", "b": "b"}),
        _letter_map(alphabet, "double", {"a": "aa", "b": "bb"}),
        _letter_map(alphabet, "aToAb", {"a": "ab", "b": "b"}),
    ]
    for pat, rep in [("ab", "b"), ("a", "bb"), ("ba", ""), ("aa", "b")]:
        t = compile_replace(literal_spec(alphabet, pat, rep))
        pool.append(Relation(f"rep[{pat}->{rep}]", t, lambda w, p=pat, r=rep: {w.replace(p, r)}, True))
    pairs = [("a", "b"), ("a", "ab"), ("b", ""), ("ab", "ba")]
    t = Transducer.from_pairs(alphabet, pairs)
    rel = {}
    for u, v in pairs:
        rel.setdefault(u, set()).add(v)
    pool.append(Relation("pairs", t, lambda w, rel=rel: rel.get(w, set()), False))
    return pool


# -- random cubes -------------------------------------------------------------------------


@dataclass
class Instance:
    """A cube together with a string-level description used by the oracle."""
    variables: list
    langs: dict                      # var -> list of words
    constraints: list                # ("eq", lhs, rhs) or ("tr", relation, lhs, rhs)
    length: object = None            # (description, python predicate over lengths, lia formula)
    negated: object = None           # one extra constraint that must NOT hold
    cube: Cube = None
    notes: dict = field(default_factory=dict)


def directly_chain_free(constraints) -> bool:
    """Distinct input variables and an acyclic output-to-input graph."""
    inputs = [x for c in constraints for x in c[-2]]
    if len(inputs) != len(set(inputs)):
        return False
    n = len(constraints)
    succ = {i: [j for j in range(n) if set(constraints[i][-1]) & set(constraints[j][-2])] for i in range(n)}
    color = {}

    def cyclic(i):
        color[i] = 1
        for j in succ[i]:
            if color.get(j) == 1 or (j not in color and cyclic(j)):
                return True
        color[i] = 2
        return False

    return not any(i not in color and cyclic(i) for i in range(n))


def _length_atom(rng, variables):
    x, y = rng.sample(variables, 2) if len(variables) > 1 else (variables[0], variables[0])
    k = rng.randint(0, 4)
    lx, ly = lia.length_var(x), lia.length_var(y)
    choices = [
        (f"|{x}|+|{y}|={k}", lambda L: L[x] + L[y] == k, lia.cmp(lia.LinExpr.var(lx) + lia.LinExpr.var(ly), "==", k)),
        (f"|{x}|<|{y}|", lambda L: L[x] < L[y], lia.cmp(lx, "<", ly)),
        (f"|{x}|!=|{y}|", lambda L: L[x] != L[y], lia.cmp(lx, "!=", ly)),
        (f"|{x}|>={k}", lambda L: L[x] >= k, lia.cmp(lx, ">=", min(k, 3))),
        (f"|{x}|=2|{y}|", lambda L: L[x] == 2 * L[y], lia.cmp(lx, "==", lia.LinExpr.var(ly, 2))),
    ]
    desc, pred, formula = rng.choice(choices)
    if desc.startswith(f"|{x}|>="):
        k = min(k, 3)
        pred = lambda L, k=k: L[x] >= k
    return (desc, pred, formula)


def _plant(rng, variables, langs, constraints) -> None:
    """Add one assignment satisfying the positive constraints to the languages, when one is found.

    Constraints are visited so that every input is computed after all
    constraints reading the variables it is built from.
    """
    value = {v: rng.choice(langs[v]) for v in variables}
    n = len(constraints)
    done = set()
    order = []
    while len(order) < n:
        ready = [i for i in range(n) if i not in done
                 and not any(j not in done and j != i and set(constraints[i][-1]) & set(constraints[j][-2])
                             for j in range(n))]
        if not ready:
            return
        done.add(ready[0])
        order.append(ready[0])
    for i in order:
        c = constraints[i]
        target = "".join(value[x] for x in c[-1])
        if c[0] == "eq":
            source = target
        else:
            found = [w for w in words_up_to(SIGMA, 4) if target in c[1].outputs(w)]
            if not found:
                return
            source = rng.choice(found)
        lhs = c[-2]
        cuts = sorted(rng.randint(0, len(source)) for _ in range(len(lhs) - 1))
        bounds = [0] + cuts + [len(source)]
        for k, x in enumerate(lhs):
            value[x] = source[bounds[k]:bounds[k + 1]]
    if any(len(w) > 4 for w in value.values()) or not all(holds(c, value) for c in constraints):
        return
    for v in variables:
        if value[v] not in langs[v]:
            langs[v] = sorted(langs[v] + [value[v]])


def random_instance(rng: random.Random, alphabet: Alphabet, pool, negation: str | None = None,
                    max_vars=4, max_constraints=3, length_prob=0.5, plant_prob=0.5) -> Instance:
    while True:
        n = rng.randint(2, max_vars)
        variables = [f"x{i}" for i in range(n)]
        universe = words_up_to(SIGMA, 3)
        langs = {v: sorted(set(rng.sample(universe, rng.randint(1, 4)))) for v in variables}
        constraints = []
        for _ in range(rng.randint(1, max_constraints)):
            lhs = tuple(rng.sample(variables, rng.randint(1, min(2, n))))
            rhs = tuple(rng.choice(variables) for _ in range(rng.randint(1, 2)))
            if rng.random() < 0.5:
                constraints.append(("eq", lhs, rhs))
            else:
                constraints.append(("tr", rng.choice(pool), lhs, rhs))
        negated = None
        if negation == "eq":
            lhs = tuple(rng.choice(variables) for _ in range(rng.randint(1, 2)))
            rhs = tuple(rng.choice(variables) for _ in range(rng.randint(1, 2)))
            negated = ("eq", lhs, rhs)
        elif negation == "tr":
            rel = rng.choice([r for r in pool if r.functional])
            negated = ("tr", rel, (rng.choice(variables),), (rng.choice(variables),))
        check = constraints + ([negated] if negated and negated[0] == "tr" else [])
        if not directly_chain_free(check):
            continue
        if rng.random() < plant_prob:
            _plant(rng, variables, langs, constraints)
        length = _length_atom(rng, variables) if rng.random() < length_prob else None
        inst = Instance(variables, langs, constraints, length, negated)
        inst.cube = to_cube(inst, alphabet)
        return inst


def _atom(c):
    if c[0] == "eq":
        return Equation(c[1], c[2])
    rel = c[1]
    return TransducerConstraint(rel.transducer, c[2], c[3], rel.functional, rel.name)


def to_cube(inst: Instance, alphabet: Alphabet) -> Cube:
    atoms = [_atom(c) for c in inst.constraints]
    if inst.negated is not None:
        atoms.append(Not(_atom(inst.negated)))
    if inst.length is not None:
        atoms.append(LengthAtom(inst.length[2]))
    atoms += [RegularConstraint(v, Nfa.from_words(alphabet, inst.langs[v])) for v in inst.variables]
    return Cube(alphabet, atoms)


# -- the oracle ---------------------------------------------------------------------------


def holds(c, value) -> bool:
    if c[0] == "eq":
        return "".join(value[x] for x in c[1]) == "".join(value[x] for x in c[2])
    _, rel, lhs, rhs = c
    return "".join(value[x] for x in rhs) in rel.outputs("".join(value[x] for x in lhs))


def satisfies(inst: Instance, value: dict) -> bool:
    if any(value[v] not in inst.langs[v] for v in inst.variables):
        return False
    if not all(holds(c, value) for c in inst.constraints):
        return False
    if inst.negated is not None and holds(inst.negated, value):
        return False
    if inst.length is not None and not inst.length[1]({v: len(value[v]) for v in inst.variables}):
        return False
    return True


def oracle(inst: Instance) -> bool:
    """Satisfiability by enumerating every assignment from the finite languages."""
    for combo in itertools.product(*(inst.langs[v] for v in inst.variables)):
        if satisfies(inst, dict(zip(inst.variables, combo))):
            return True
    return False


def decode_model(model: dict, alphabet: Alphabet) -> dict:
    return {x: alphabet.decode(w) for x, w in model.items()}


# -- regular expressions and replacement through Python's re module --------------------


def random_regex(rng: random.Random, letters: str = SIGMA, depth: int = 3) -> str:
    """A regular expression in the syntax shared by Python's re module and parse_regex."""
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(list(letters) + ["[" + letters + "]", "."])
    kind = rng.choice(["concat", "concat", "union", "star", "plus", "opt"])
    if kind == "concat":
        return random_regex(rng, letters, depth - 1) + random_regex(rng, letters, depth - 1)
    if kind == "union":
        return "(" + random_regex(rng, letters, depth - 1) + "|" + random_regex(rng, letters, depth - 1) + ")"
    return "(" + random_regex(rng, letters, depth - 1) + ")" + {"star": "*", "plus": "+", "opt": "?"}[kind]


def python_replace(pattern: str, replacement: str, text: str, first_only: bool = False) -> str:
    """Leftmost, shortest non-empty match replacement using ``re.fullmatch`` on every slice.

    Replacing only the first match of a pattern that accepts the empty word
    inserts the replacement in front, as SMT-LIB's ``str.replace`` does.
    """
    import re

    compiled = re.compile(pattern, re.DOTALL)
    if first_only and compiled.fullmatch(""):
        return replacement + text
    out = []
    i = 0
    replaced = False
    while i < len(text):
        end = None
        if not (first_only and replaced):
            end = next((j for j in range(i + 1, len(text) + 1) if compiled.fullmatch(text, i, j)), None)
        if end is None:
            out.append(text[i])
            i += 1
        else:
            out.append(replacement)
            i = end
            replaced = True
    return "".join(out)

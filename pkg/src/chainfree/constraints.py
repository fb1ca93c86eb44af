"""String constraint atoms, cubes, and the transformations producing positive cubes."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

from . import lia
from .automata import Alphabet, Nfa, complement, concat_all, intersect
from .transducer import Functional, Transducer, check_functional


class NegatedNonFunctionalTransducer(ValueError):
    """A negated transducer constraint whose relation is not known to be a function."""


@dataclass(frozen=True)
class StrLit:
    """A string literal occurring inside a term before desugaring."""
    text: str


@dataclass(frozen=True)
class Equation:
    """``lhs ≈ rhs``; ``lhs`` is the input side and ``rhs`` the output side."""
    lhs: tuple
    rhs: tuple

    def __str__(self):
        return f"{_term_text(self.lhs)} = {_term_text(self.rhs)}"


@dataclass(frozen=True)
class TransducerConstraint:
    """``(lhs, rhs)`` belongs to the relation of ``transducer``."""
    transducer: Transducer
    lhs: tuple
    rhs: tuple
    functional: bool = False
    name: str = "T"

    def __str__(self):
        return f"{self.name}({_term_text(self.lhs)}, {_term_text(self.rhs)})"


@dataclass(frozen=True)
class RegularConstraint:
    var: str
    nfa: Nfa = field(compare=False)
    label: str = ""

    def __str__(self):
        return f"{self.var} in {self.label or repr(self.nfa)}"


@dataclass(frozen=True)
class LengthAtom:
    """A linear arithmetic formula over ``|x|`` lengths and integer variables."""
    formula: object

    def string_vars(self) -> set:
        return {v[1:-1] for v in self.formula.variables() if v.startswith("|") and v.endswith("|")}

    def __str__(self):
        return f"len {self.formula}"


@dataclass(frozen=True)
class CodePointAtom:
    """``to_code(first) != to_code(second)`` on single-letter variables."""
    first: str
    second: str

    def __str__(self):
        return f"code({self.first}) != code({self.second})"


@dataclass(frozen=True)
class Not:
    atom: object

    def __str__(self):
        return f"not {self.atom}"


def _term_text(term) -> str:
    if not term:
        return '""'
    return " ".join(f'"{x.text}"' if isinstance(x, StrLit) else str(x) for x in term)


@dataclass
class Cube:
    """A conjunction of atoms over string variables drawn from ``alphabet``."""
    alphabet: Alphabet
    atoms: list

    def string_vars(self) -> set:
        out = set()
        for atom in self.atoms:
            out |= atom_vars(atom)
        return out

    def __str__(self):
        return " & ".join(str(a) for a in self.atoms)


def atom_vars(atom) -> set:
    if isinstance(atom, Not):
        return atom_vars(atom.atom)
    if isinstance(atom, (Equation, TransducerConstraint)):
        return {x for x in atom.lhs + atom.rhs if isinstance(x, str)}
    if isinstance(atom, RegularConstraint):
        return {atom.var}
    if isinstance(atom, LengthAtom):
        return atom.string_vars()
    if isinstance(atom, CodePointAtom):
        return {atom.first, atom.second}
    raise TypeError(f"unknown atom {atom!r}")


class Fresh:
    """Generator of variable names that never collide with existing ones."""

    def __init__(self, taken: Iterable[str] = (), prefix: str = "_"):
        self.taken = set(taken)
        self.prefix = prefix
        self.counter = 0

    def __call__(self, hint: str = "v") -> str:
        while True:
            name = f"{self.prefix}{hint}{self.counter}"
            self.counter += 1
            if name not in self.taken:
                self.taken.add(name)
                return name


def term_language(term: Iterable[str], lang: dict, alphabet: Alphabet) -> Nfa:
    """Concatenation of the languages of the variables of ``term``."""
    return concat_all(alphabet, [lang[x] for x in term])


# -- transformations --------------------------------------------------------------------


def desugar_literals(cube: Cube, fresh: Fresh) -> Cube:
    """Replace every literal inside a term by a fresh variable with a singleton language."""
    atoms = []
    extra = []

    def convert(term):
        out = []
        for x in term:
            if isinstance(x, StrLit):
                v = fresh("lit")
                extra.append(RegularConstraint(v, Nfa.word(cube.alphabet, x.text), repr(x.text)))
                out.append(v)
            else:
                out.append(x)
        return tuple(out)

    def walk(atom):
        if isinstance(atom, Not):
            return Not(walk(atom.atom))
        if isinstance(atom, (Equation, TransducerConstraint)):
            return replace(atom, lhs=convert(atom.lhs), rhs=convert(atom.rhs))
        return atom

    for atom in cube.atoms:
        atoms.append(walk(atom))
    return Cube(cube.alphabet, atoms + extra)


def normalize_regular(cube: Cube) -> Cube:
    """Exactly one regular constraint per string variable.

    Negated memberships are complemented, memberships of the same variable are
    intersected and variables without a membership get the universal language.
    """
    lang = {}
    rest = []
    for atom in cube.atoms:
        if isinstance(atom, RegularConstraint):
            nfa = atom.nfa
        elif isinstance(atom, Not) and isinstance(atom.atom, RegularConstraint):
            atom = atom.atom
            nfa = complement(atom.nfa)
        else:
            rest.append(atom)
            continue
        lang[atom.var] = intersect(lang[atom.var], nfa).trim() if atom.var in lang else nfa
    for v in sorted(cube.string_vars()):
        if v not in lang:
            lang[v] = Nfa.universal(cube.alphabet)
    regs = [RegularConstraint(v, lang[v]) for v in sorted(lang)]
    return Cube(cube.alphabet, rest + regs)


def disequation_cases(lhs: tuple, rhs: tuple, alphabet: Alphabet, fresh: Fresh) -> list[list]:
    """The two positive alternatives equivalent to ``lhs ≉ rhs``.

    Either the lengths differ, or both sides split around a first position
    holding letters with different code points.  The split equations put the
    fresh variables on the input side, which keeps the cube chain-free.
    """
    lengths_differ = lia.cmp(lia.LinExpr.total(lia.length_var(x) for x in lhs), "!=",
                             lia.LinExpr.total(lia.length_var(x) for x in rhs))
    x1, a1, x2 = fresh("dx"), fresh("da"), fresh("dx")
    y1, a2, y2 = fresh("dy"), fresh("da"), fresh("dy")
    letters = Nfa.symbol_set(alphabet, alphabet.symbols)
    differ_at = [
        Equation((x1, a1, x2), tuple(lhs)),
        Equation((y1, a2, y2), tuple(rhs)),
        LengthAtom(lia.cmp(lia.length_var(x1), "==", lia.length_var(y1))),
        RegularConstraint(a1, letters, "any letter"),
        RegularConstraint(a2, letters, "any letter"),
        CodePointAtom(a1, a2),
    ]
    return [[LengthAtom(lengths_differ)], differ_at]


def eliminate_negation(cube: Cube, fresh: Fresh, functional_bound: int = 8) -> list[Cube]:
    """Equisatisfiable disjunction of positive cubes.

    Raises :class:`NegatedNonFunctionalTransducer` when a negated transducer
    constraint is neither annotated functional nor proven functional.
    """
    base = []
    alternatives = [[]]
    for atom in cube.atoms:
        if not isinstance(atom, Not):
            base.append(atom)
            continue
        inner = atom.atom
        if isinstance(inner, RegularConstraint):
            base.append(atom)
            continue
        if isinstance(inner, Equation):
            cases = disequation_cases(inner.lhs, inner.rhs, cube.alphabet, fresh)
        elif isinstance(inner, TransducerConstraint):
            if not inner.functional:
                if not isinstance(check_functional(inner.transducer, functional_bound), Functional):
                    raise NegatedNonFunctionalTransducer(f"cannot negate {inner}: relation is not known to be functional")
            z = fresh("neg")
            positive = replace(inner, rhs=(z,))
            cases = [[positive] + c for c in disequation_cases((z,), inner.rhs, cube.alphabet, fresh)]
        elif isinstance(inner, LengthAtom):
            cases = [[LengthAtom(lia_negate(inner.formula))]]
        elif isinstance(inner, CodePointAtom):
            raise ValueError("negated code point atoms are not supported")
        else:
            raise TypeError(f"unknown atom {inner!r}")
        alternatives = [prev + case for prev in alternatives for case in cases]
    return [Cube(cube.alphabet, base + alt) for alt in alternatives]


def lia_negate(f):
    if isinstance(f, lia.Cmp):
        flip = {"<=": ">", "<": ">=", ">=": "<", ">": "<=", "==": "!=", "!=": "=="}
        return lia.Cmp(f.expr, flip[f.op])
    if isinstance(f, lia.And):
        return lia.disj(lia_negate(p) for p in f.parts) if f.parts else lia.FALSE
    if isinstance(f, lia.Or):
        return lia.conj(lia_negate(p) for p in f.parts)
    raise TypeError(f"cannot negate {f!r}")


def code_point_lia(atom_var: str, nfa: Nfa):
    """Bind ``code(atom_var)`` to the code point of a one-letter word of ``nfa``."""
    alphabet = nfa.alphabet
    options = []
    for a in alphabet.symbols:
        if nfa.member((a,)):
            options.append(lia.conj([lia.cmp(lia.code_var(atom_var), "==", ord(alphabet.chars[a])),
                                     lia.cmp(lia.length_var(atom_var), "==", 1)]))
    return lia.disj(options) if options else lia.FALSE


# -- semantics ---------------------------------------------------------------------------


def evaluate_atom(atom, assignment: dict, alphabet: Alphabet, ints: dict | None = None) -> bool:
    """Direct evaluation of one atom under an assignment of words to variables."""
    ints = ints or {}
    if isinstance(atom, Not):
        return not evaluate_atom(atom.atom, assignment, alphabet, ints)

    def value(term):
        out = []
        for x in term:
            out.extend(alphabet.encode(x.text) if isinstance(x, StrLit) else assignment[x])
        return tuple(out)

    if isinstance(atom, Equation):
        return value(atom.lhs) == value(atom.rhs)
    if isinstance(atom, TransducerConstraint):
        return atom.transducer.accepts([value(atom.lhs), value(atom.rhs)])
    if isinstance(atom, RegularConstraint):
        return atom.nfa.member(assignment[atom.var])
    if isinstance(atom, LengthAtom):
        model = dict(ints)
        for x in atom.string_vars():
            model[lia.length_var(x)] = len(assignment[x])
        return lia.evaluate(atom.formula, model)
    if isinstance(atom, CodePointAtom):
        a, b = assignment[atom.first], assignment[atom.second]
        code = lambda w: ord(alphabet.chars[w[0]]) if len(w) == 1 else -1
        return code(a) != code(b)
    raise TypeError(f"unknown atom {atom!r}")


def evaluate_cube(cube: Cube, assignment: dict, ints: dict | None = None) -> bool:
    return all(evaluate_atom(a, assignment, cube.alphabet, ints) for a in cube.atoms)

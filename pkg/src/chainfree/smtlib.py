"""Front end for the supported SMT-LIB 2 subset.

A file is read into a :class:`ProblemFile` holding raw assertions.  The
alphabet is inferred from the characters the file mentions plus one extra
symbol standing for every other character.  Assertions are then translated
into cubes: string functions become transducer constraints, memberships
become regular constraints and integer comparisons become length atoms.  The
Boolean structure is expanded into disjunctive normal form, up to a cap on
the number of cubes.

Models are checked against the original assertions by direct evaluation on
Python strings, with replacements computed by the reference scanners rather
than by the compiled transducers.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import lia
from .automata import Alphabet, Regex, from_regex, re_word
from .constraints import (Cube, Equation, LengthAtom, Not, RegularConstraint, StrLit, lia_negate)
from .replaceall import (Apply, ReplaceSpec, compile_casing, compile_replace, flatten, reference_casing,
                         reference_replace)
from .sexpr import ParseError, Str, parse

__all__ = ["CubeLimitExceeded", "ParseError", "ProblemFile", "UnsupportedFeature", "check_model", "infer_alphabet",
           "parse_smtlib", "render_model", "to_cubes"]


class UnsupportedFeature(Exception):
    """The input uses an operator or command outside the supported subset."""

    def __init__(self, operator: str, detail: str = ""):
        super().__init__(f"unsupported feature: {operator}" + (f" ({detail})" if detail else ""))
        self.operator = operator


class CubeLimitExceeded(Exception):
    """The disjunctive normal form has more cubes than allowed."""


@dataclass
class ProblemFile:
    declarations: dict = field(default_factory=dict)   # name -> "String" or "Int"
    assertions: list = field(default_factory=list)     # raw s-expressions
    logic: str | None = None
    options: dict = field(default_factory=dict)


_IGNORED = {"check-sat", "get-model", "exit", "set-info", "get-info", "echo", "get-value"}


def parse_smtlib(text: str) -> ProblemFile:
    problem = ProblemFile()
    for cmd in parse(text):
        if not isinstance(cmd, list) or not cmd or not isinstance(cmd[0], str):
            raise UnsupportedFeature(str(cmd), "top-level items must be commands")
        head = cmd[0]
        if head == "set-logic":
            problem.logic = str(cmd[1])
        elif head == "set-option":
            problem.options[str(cmd[1])] = cmd[2] if len(cmd) > 2 else None
        elif head in ("declare-fun", "declare-const"):
            name = cmd[1]
            if head == "declare-fun":
                if cmd[2]:
                    raise UnsupportedFeature("declare-fun", "only constants are supported")
                sort = cmd[3]
            else:
                sort = cmd[2]
            if sort not in ("String", "Int"):
                raise UnsupportedFeature(f"sort {sort}")
            problem.declarations[name] = sort
        elif head == "assert":
            problem.assertions.append(cmd[1])
        elif head in _IGNORED:
            continue
        else:
            raise UnsupportedFeature(head)
    return problem


# -- alphabet inference -------------------------------------------------------------------


def _range_chars(lo, hi) -> set:
    if not (isinstance(lo, Str) and isinstance(hi, Str) and len(lo.value) == 1 and len(hi.value) == 1):
        return set()
    a, b = ord(lo.value), ord(hi.value)
    if b - a > 512:
        raise UnsupportedFeature("re.range", "ranges wider than 512 characters")
    return {chr(c) for c in range(a, b + 1)}


def _collect_chars(e, out: set) -> bool:
    """Characters mentioned by ``e``; returns whether case conversions occur."""
    casing = False
    if isinstance(e, Str):
        out.update(e.value)
    elif isinstance(e, list):
        if e and e[0] == "re.range" and len(e) == 3:
            out.update(_range_chars(e[1], e[2]))
        if e and e[0] in ("str.to_lower", "str.to_upper"):
            casing = True
        for x in e:
            casing |= _collect_chars(x, out)
    return casing


def infer_alphabet(problem: ProblemFile) -> Alphabet:
    chars = set()
    casing = False
    for a in problem.assertions:
        casing |= _collect_chars(a, chars)
    if casing:
        chars |= {d for c in chars for d in (c.lower(), c.upper()) if len(d) == 1}
    return Alphabet.with_fresh(sorted(chars))


# -- translation to cubes -----------------------------------------------------------------

_STRING_FUNCTIONS = {"str.replace", "str.replace_all", "str.replace_re", "str.replace_re_all",
                     "str.to_lower", "str.to_upper"}
_INT_OPS = {"+", "-", "*", "str.len"}
_COMPARISONS = {"<=": "<=", "<": "<", ">=": ">=", ">": ">"}


class _Translator:
    def __init__(self, problem: ProblemFile, alphabet: Alphabet, fresh):
        self.problem = problem
        self.alphabet = alphabet
        self.fresh = fresh
        self.definitions = []        # atoms that hold in every cube
        self.compiled = {}

    # sorts

    def is_int(self, e) -> bool:
        if isinstance(e, int):
            return True
        if isinstance(e, str):
            return self.problem.declarations.get(e) == "Int"
        if isinstance(e, list) and e and isinstance(e[0], str):
            return e[0] in _INT_OPS
        return False

    # regular expressions

    def regex(self, e) -> Regex:
        if isinstance(e, str):
            if e == "re.none":
                return Regex("empty")
            if e == "re.allchar":
                return Regex("any")
            if e == "re.all":
                return Regex("star", (Regex("any"),))
            raise UnsupportedFeature(e)
        if not isinstance(e, list) or not e:
            raise UnsupportedFeature(str(e), "not a regular expression")
        head, args = e[0], e[1:]
        if isinstance(head, list):
            return self.indexed_regex(head, args)
        if head == "str.to_re":
            (lit,) = args
            if not isinstance(lit, Str):
                raise UnsupportedFeature("str.to_re", "argument must be a literal")
            return re_word(lit.value)
        unary = {"re.*": "star", "re.+": "plus", "re.opt": "opt", "re.comp": "comp"}
        if head in unary:
            return Regex(unary[head], (self.regex(args[0]),))
        nary = {"re.union": "union", "re.++": "concat", "re.inter": "inter"}
        if head in nary:
            return Regex(nary[head], tuple(self.regex(a) for a in args))
        if head == "re.diff":
            return Regex("inter", (self.regex(args[0]), Regex("comp", (self.regex(args[1]),))))
        if head == "re.range":
            chars = _range_chars(*args)
            return Regex("chars", chars=frozenset(chars)) if chars else Regex("empty")
        raise UnsupportedFeature(head)

    def indexed_regex(self, head, args) -> Regex:
        if len(head) < 3 or head[0] != "_":
            raise UnsupportedFeature(str(head))
        body = self.regex(args[0])
        if head[1] == "re.^":
            lo = hi = head[2]
        elif head[1] == "re.loop":
            lo, hi = head[2], head[3] if len(head) > 3 else head[2]
        else:
            raise UnsupportedFeature(str(head[1]))
        if hi < lo:
            return Regex("empty")
        parts = [body] * lo + [Regex("opt", (body,))] * (hi - lo)
        return Regex("concat", tuple(parts)) if parts else Regex("eps")

    # string terms

    def string_term(self, e) -> tuple:
        if isinstance(e, Str):
            return (StrLit(e.value),) if e.value else ()
        if isinstance(e, str):
            if self.problem.declarations.get(e) != "String":
                raise UnsupportedFeature(e, "undeclared string constant")
            return (e,)
        if isinstance(e, list) and e and e[0] == "str.++":
            return tuple(x for a in e[1:] for x in self.string_term(a))
        if self.is_application(e):
            v = self.fresh("app")
            self.definitions.extend(flatten(self.application(e), (v,), self.fresh))
            return (v,)
        head = e[0] if isinstance(e, list) and e else e
        raise UnsupportedFeature(str(head))

    @staticmethod
    def is_application(e) -> bool:
        return isinstance(e, list) and bool(e) and e[0] in _STRING_FUNCTIONS

    def application(self, e) -> Apply:
        subject = e[1]
        inner = self.application(subject) if self.is_application(subject) else self.string_term(subject)
        key, name = self.function_key(e)
        if key not in self.compiled:
            self.compiled[key] = self.compile(key)
        return Apply(name, self.compiled[key], inner)

    def function_key(self, e):
        head = e[0]
        if head in ("str.to_lower", "str.to_upper"):
            return (head,), head[4:]
        if len(e) != 4 or not isinstance(e[3], Str):
            raise UnsupportedFeature(head, "the replacement must be a string literal")
        if head in ("str.replace", "str.replace_all"):
            if not isinstance(e[2], Str):
                raise UnsupportedFeature(head, "the pattern must be a string literal")
            pattern = e[2].value
            return (head, pattern, e[3].value), f"{head[4:]}({pattern!r},{e[3].value!r})"
        regex = self.regex(e[2])
        return (head, regex, e[3].value), f"{head[4:]}(re,{e[3].value!r})"

    def compile(self, key):
        head = key[0]
        if head == "str.to_lower":
            return compile_casing("lower", self.alphabet)
        if head == "str.to_upper":
            return compile_casing("upper", self.alphabet)
        return compile_replace(self.spec(key))

    def spec(self, key) -> ReplaceSpec:
        head, pattern, replacement = key
        mode = "all" if head.endswith("_all") else "first"
        if isinstance(pattern, str):
            pattern = re_word(pattern)
        return ReplaceSpec(from_regex(pattern, self.alphabet), self.alphabet.encode(replacement), mode)

    # integer terms

    def int_expr(self, e) -> lia.LinExpr:
        if isinstance(e, int):
            return lia.LinExpr({}, e)
        if isinstance(e, str):
            if self.problem.declarations.get(e) != "Int":
                raise UnsupportedFeature(e, "undeclared integer constant")
            return lia.LinExpr.var(e)
        head, args = e[0], e[1:]
        if head == "str.len":
            total = lia.LinExpr()
            for x in self.string_term(args[0]):
                total = total + (len(x.text) if isinstance(x, StrLit) else lia.LinExpr.var(lia.length_var(x)))
            return total
        if head == "+":
            return lia.LinExpr.total(self.int_expr(a) for a in args)
        if head == "-":
            if len(args) == 1:
                return -self.int_expr(args[0])
            out = self.int_expr(args[0])
            for a in args[1:]:
                out = out - self.int_expr(a)
            return out
        if head == "*":
            out = lia.LinExpr({}, 1)
            for a in args:
                p = self.int_expr(a)
                if p.terms and out.terms:
                    raise UnsupportedFeature("*", "nonlinear multiplication")
                out = out * p.const if not p.terms else p * out.const
            return out
        raise UnsupportedFeature(str(head))

    # formulas, as trees of ("and", parts), ("or", parts), ("not", f), ("atom", a), ("const", bool)

    def formula(self, e):
        if e == "true":
            return ("const", True)
        if e == "false":
            return ("const", False)
        if not isinstance(e, list) or not e:
            raise UnsupportedFeature(str(e), "not a Boolean formula")
        head, args = e[0], e[1:]
        if head == "and":
            return ("and", [self.formula(a) for a in args])
        if head == "or":
            return ("or", [self.formula(a) for a in args])
        if head == "not":
            return ("not", self.formula(args[0]))
        if head == "=>":
            return ("or", [("not", self.formula(args[0])), self.formula(args[1])])
        if head == "=":
            if len(args) != 2:
                return ("and", [self.formula(["=", a, b]) for a, b in zip(args, args[1:])])
            return self.equality(*args)
        if head == "distinct":
            pairs = [(a, b) for i, a in enumerate(args) for b in args[i + 1:]]
            return ("and", [("not", self.equality(a, b)) for a, b in pairs])
        if head in _COMPARISONS:
            return ("atom", LengthAtom(lia.cmp(self.int_expr(args[0]), _COMPARISONS[head], self.int_expr(args[1]))))
        if head == "str.in_re":
            return ("atom", self.membership(args[0], args[1]))
        raise UnsupportedFeature(str(head))

    def equality(self, a, b):
        if self.is_int(a) or self.is_int(b):
            return ("atom", LengthAtom(lia.cmp(self.int_expr(a), "==", self.int_expr(b))))
        if self.is_application(b) and not self.is_application(a):
            a, b = b, a
        if self.is_application(a):
            constraints = flatten(self.application(a), self.string_term(b), self.fresh)
            self.definitions.extend(constraints[:-1])
            return ("atom", constraints[-1])
        return ("atom", Equation(self.string_term(a), self.string_term(b)))

    def membership(self, term, regex):
        nfa = from_regex(self.regex(regex), self.alphabet)
        parts = self.string_term(term)
        if len(parts) == 1 and isinstance(parts[0], str):
            var = parts[0]
        else:
            var = self.fresh("in")
            self.definitions.append(Equation((var,), parts))
        return RegularConstraint(var, nfa, "regex")


def _dnf(node, positive: bool, cap: int) -> list:
    """Conjunctions of literals equivalent to ``node`` (or its negation)."""
    kind = node[0]
    if kind == "const":
        return [[]] if node[1] == positive else []
    if kind == "not":
        return _dnf(node[1], not positive, cap)
    if kind == "atom":
        atom = node[1]
        if positive:
            return [[atom]]
        if isinstance(atom, LengthAtom):
            return [[LengthAtom(lia_negate(atom.formula))]]
        return [[Not(atom)]]
    conjunctive = (kind == "and") == positive
    parts = [_dnf(p, positive, cap) for p in node[1]]
    if not conjunctive:
        out = [c for p in parts for c in p]
        if len(out) > cap:
            raise CubeLimitExceeded(f"more than {cap} cubes")
        return out
    out = [[]]
    for p in parts:
        out = [a + b for a in out for b in p]
        if len(out) > cap:
            raise CubeLimitExceeded(f"more than {cap} cubes")
    return out


def to_cubes(problem: ProblemFile, alphabet: Alphabet, fresh, cap: int = 64) -> list[Cube]:
    """The assertions as a disjunction of cubes, in a deterministic order."""
    tr = _Translator(problem, alphabet, fresh)
    tree = ("and", [tr.formula(a) for a in problem.assertions])
    cubes = _dnf(tree, True, cap)
    declared = [RegularConstraint(v, from_regex(Regex("star", (Regex("any"),)), alphabet), "declared")
                for v, sort in sorted(problem.declarations.items()) if sort == "String"]
    return [Cube(alphabet, list(tr.definitions) + atoms + declared) for atoms in cubes]


# -- models -------------------------------------------------------------------------------


def _quote(text: str) -> str:
    out = []
    for c in text:
        if c == '"':
            out.append('""')
        elif 32 <= ord(c) < 127:
            out.append(c)
        else:
            out.append(f"\\u{{{ord(c):x}}}")
    return '"' + "".join(out) + '"'


def render_model(declarations: dict, words: dict, ints: dict) -> str:
    """An SMT-LIB ``(model ...)`` block for the declared constants."""
    lines = ["(model"]
    for name, sort in sorted(declarations.items()):
        if sort == "String":
            lines.append(f"  (define-fun {name} () String {_quote(words.get(name, ''))})")
        else:
            value = ints.get(name, 0)
            lines.append(f"  (define-fun {name} () Int {value if value >= 0 else f'(- {-value})'})")
    lines.append(")")
    return "\n".join(lines)


class _Evaluator:
    def __init__(self, problem: ProblemFile, alphabet: Alphabet, words: dict, ints: dict):
        self.problem = problem
        self.alphabet = alphabet
        self.words = words
        self.ints = ints
        self.translator = _Translator(problem, alphabet, lambda hint="v": hint)

    def value(self, e):
        if isinstance(e, Str):
            return e.value
        if isinstance(e, int):
            return e
        if isinstance(e, str):
            if e == "true":
                return True
            if e == "false":
                return False
            if self.problem.declarations.get(e) == "String":
                return self.words.get(e, "")
            return self.ints.get(e, 0)
        head, args = e[0], e[1:]
        if head == "str.++":
            return "".join(self.value(a) for a in args)
        if head == "str.len":
            return len(self.value(args[0]))
        if head == "+":
            return sum(self.value(a) for a in args)
        if head == "-":
            vals = [self.value(a) for a in args]
            return -vals[0] if len(vals) == 1 else vals[0] - sum(vals[1:])
        if head == "*":
            out = 1
            for a in args:
                out *= self.value(a)
            return out
        if head == "and":
            return all(self.value(a) for a in args)
        if head == "or":
            return any(self.value(a) for a in args)
        if head == "not":
            return not self.value(args[0])
        if head == "=>":
            return (not self.value(args[0])) or self.value(args[1])
        if head == "=":
            vals = [self.value(a) for a in args]
            return all(x == y for x, y in zip(vals, vals[1:]))
        if head == "distinct":
            vals = [self.value(a) for a in args]
            return len(set(vals)) == len(vals)
        if head in _COMPARISONS:
            x, y = self.value(args[0]), self.value(args[1])
            return {"<=": x <= y, "<": x < y, ">=": x >= y, ">": x > y}[head]
        if head == "str.in_re":
            nfa = from_regex(self.translator.regex(args[1]), self.alphabet)
            return nfa.member(self.alphabet.encode(self.value(args[0])))
        if head == "str.to_lower" or head == "str.to_upper":
            word = self.alphabet.encode(self.value(args[0]))
            return self.alphabet.decode(reference_casing(word, head[7:], self.alphabet))
        if head in ("str.replace", "str.replace_all") and isinstance(args[1], Str):
            subject, pattern, repl = self.value(args[0]), args[1].value, self.value(args[2])
            if head == "str.replace":
                return subject.replace(pattern, repl, 1)
            return subject.replace(pattern, repl) if pattern else subject
        if head in ("str.replace_re", "str.replace_re_all"):
            key, _ = self.translator.function_key(e)
            spec = self.translator.spec(key)
            word = self.alphabet.encode(self.value(args[0]))
            return self.alphabet.decode(reference_replace(word, spec))
        raise UnsupportedFeature(str(head))


def check_model(problem: ProblemFile, alphabet: Alphabet, words: dict, ints: dict) -> bool:
    """Whether every assertion evaluates to true under the given values."""
    ev = _Evaluator(problem, alphabet, words, ints)
    return all(ev.value(a) is True for a in problem.assertions)

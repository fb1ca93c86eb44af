"""Reader for the line-based native input format.

One constraint per line; ``#`` starts a comment.  Words in double quotes are
literals (a doubled quote stands for a quote), other words are variables.

    ALPHABET a<&lt;                    exact alphabet (otherwise inferred)
    TDEF T1 replace_all "<" "&lt;"     also replace, replace_re, replace_re_all
    TDEF T2 to_lower                   also to_upper and identity
    TDEF T3 pairs "ab" "ba" "ba" "ab"  finite relation, listed as input/output pairs
    TDEF T4 machine                    explicit transducer, ended by a line END
    EQ x y u = w z
    TR T1 x y -> v z
    RE x [alt]+<*
    LEN |z| = 8 + 3k
    NOT EQ x = y                       NOT also applies to TR, RE and LEN

Regular expressions use the compact syntax of :func:`automata.parse_regex`.
A ``machine`` block holds lines ``states n``, ``initial ...``, ``final ...``
and transitions ``p a/b q`` where ``ε`` marks an empty tape.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import lia
from .automata import Alphabet, from_regex, parse_regex, re_word
from .constraints import (Cube, Equation, LengthAtom, Not, RegularConstraint, StrLit, TransducerConstraint,
                          evaluate_cube)
from .replaceall import ReplaceSpec, compile_casing, compile_replace
from .transducer import Transducer


class NativeFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


_TOKEN = re.compile(r'"(?:[^"]|"")*"|\S+')


def _tokens(text: str) -> list:
    return _TOKEN.findall(text)


def _literal(tok: str):
    if len(tok) >= 2 and tok[0] == '"' and tok[-1] == '"':
        return tok[1:-1].replace('""', '"')
    return None


@dataclass
class NativeProblem:
    alphabet: Alphabet
    cube: Cube
    string_vars: list = field(default_factory=list)
    int_vars: list = field(default_factory=list)

    @property
    def declarations(self) -> dict:
        out = {v: "String" for v in self.string_vars}
        out.update({v: "Int" for v in self.int_vars})
        return out

    def check(self, words: dict, ints: dict) -> bool:
        encoded = {v: self.alphabet.encode(words.get(v, "")) for v in self.string_vars}
        return evaluate_cube(self.cube, encoded, {v: ints.get(v, 0) for v in self.int_vars})


# -- length expressions ---------------------------------------------------------------------

_LEN_TOKEN = re.compile(r"\|[^|]+\||\d+|[A-Za-z_][\w']*|<=|>=|!=|==|=|<|>|\+|-|\*|\S")
_LEN_OPS = {"=": "==", "==": "==", "!=": "!=", "<=": "<=", ">=": ">=", "<": "<", ">": ">"}


def parse_length(text: str, line: int = 0):
    """A comparison of two linear expressions over ``|x|`` lengths and integer names."""
    toks = _LEN_TOKEN.findall(text)
    ops = [i for i, t in enumerate(toks) if t in _LEN_OPS]
    if len(ops) != 1:
        raise NativeFormatError("a length constraint needs exactly one comparison", line)
    k = ops[0]
    return lia.cmp(_linear(toks[:k], line), _LEN_OPS[toks[k]], _linear(toks[k + 1:], line))


def _linear(toks, line) -> lia.LinExpr:
    if not toks:
        raise NativeFormatError("empty linear expression", line)
    total = lia.LinExpr()
    sign = 1
    product = None
    expect_term = True
    for tok in toks + ["+"]:
        if tok in "+-" and len(tok) == 1:
            if expect_term and product is None:
                sign = -sign if tok == "-" else sign
                continue
            total = total + product * sign
            sign, product, expect_term = (-1 if tok == "-" else 1), None, True
            continue
        if tok == "*":
            continue
        if tok.isdigit():
            factor = lia.LinExpr({}, int(tok))
        elif tok.startswith("|") and tok.endswith("|"):
            factor = lia.LinExpr.var(lia.length_var(tok[1:-1].strip()))
        elif re.fullmatch(r"[A-Za-z_][\w']*", tok):
            factor = lia.LinExpr.var(tok)
        else:
            raise NativeFormatError(f"unexpected {tok!r} in a length constraint", line)
        if product is None:
            product = factor
        elif not product.terms:
            product = factor * product.const
        elif not factor.terms:
            product = product * factor.const
        else:
            raise NativeFormatError("nonlinear product", line)
        expect_term = False
    return total


# -- the reader ---------------------------------------------------------------------------


def _split_terms(tokens, sep, line):
    if sep not in tokens:
        raise NativeFormatError(f"missing {sep!r}", line)
    k = tokens.index(sep)
    return tokens[:k], tokens[k + 1:]


def _term(tokens) -> tuple:
    out = []
    for tok in tokens:
        lit = _literal(tok)
        if lit is None:
            out.append(tok)
        elif lit:
            out.append(StrLit(lit))
    return tuple(out)


def parse_native(text: str) -> NativeProblem:
    lines = text.splitlines()
    records = []
    chars = set()
    casing = False
    explicit = None
    i = 0
    while i < len(lines):
        number = i + 1
        raw = lines[i].strip()
        i += 1
        if not raw or raw.startswith("#"):
            continue
        negated = False
        if raw.startswith("NOT "):
            negated = True
            raw = raw[4:].strip()
        if not raw.startswith("RE "):
            # a regular expression may contain '#', so only other lines carry comments
            raw = raw.split("#", 1)[0].strip()
        kind, _, rest = raw.partition(" ")
        rest = rest.strip()
        if kind == "ALPHABET":
            explicit = rest
            continue
        if kind == "TDEF":
            toks = _tokens(rest)
            if len(toks) < 2:
                raise NativeFormatError("TDEF needs a name and a kind", number)
            body = None
            if toks[1] == "machine":
                block = []
                while i < len(lines) and lines[i].strip() != "END":
                    block.append(lines[i])
                    i += 1
                if i == len(lines):
                    raise NativeFormatError("machine block without END", number)
                i += 1
                body = "tapes 2\n" + "\n".join(block)
                for bl in block:
                    parts = bl.split()
                    if len(parts) == 3 and parts[0].isdigit():
                        chars.update(c for c in parts[1].split("/") if len(c) == 1 and c != "ε")
            else:
                for tok in toks[2:]:
                    lit = _literal(tok)
                    if lit is not None:
                        chars.update(lit)
                    elif toks[1].startswith("replace_re"):
                        chars.update(parse_regex(tok).characters())
            casing |= toks[1] in ("to_lower", "to_upper")
            records.append(("TDEF", number, toks, body))
            continue
        if kind == "RE":
            var, _, regex = rest.partition(" ")
            try:
                tree = parse_regex(regex.strip())
            except ValueError as exc:
                raise NativeFormatError(str(exc), number) from exc
            chars.update(tree.characters())
            records.append(("RE", number, negated, var, tree))
            continue
        if kind in ("EQ", "TR"):
            toks = _tokens(rest)
            for tok in toks:
                lit = _literal(tok)
                if lit:
                    chars.update(lit)
            records.append((kind, number, negated, toks))
            continue
        if kind == "LEN":
            records.append(("LEN", number, negated, parse_length(rest, number)))
            continue
        raise NativeFormatError(f"unknown line kind {kind!r}", number)
    if explicit is not None:
        alphabet = Alphabet(explicit)
    else:
        if casing:
            chars |= {d for c in chars for d in (c.lower(), c.upper()) if len(d) == 1}
        alphabet = Alphabet.with_fresh(sorted(chars))
    return _build(records, alphabet)


def _build(records, alphabet: Alphabet) -> NativeProblem:
    transducers = {}
    atoms = []
    int_vars = set()
    for rec in records:
        kind, number = rec[0], rec[1]
        if kind == "TDEF":
            _, _, toks, body = rec
            transducers[toks[0]] = _transducer(toks, body, alphabet, number)
            continue
        negated = rec[2]
        if kind == "RE":
            atom = RegularConstraint(rec[3], from_regex(rec[4], alphabet), "regex")
        elif kind == "EQ":
            lhs, rhs = _split_terms(rec[3], "=", number)
            atom = Equation(_term(lhs), _term(rhs))
        elif kind == "TR":
            name, toks = rec[3][0], rec[3][1:]
            if name not in transducers:
                raise NativeFormatError(f"transducer {name} is not defined", number)
            t, functional = transducers[name]
            lhs, rhs = _split_terms(toks, "->", number)
            atom = TransducerConstraint(t, _term(lhs), _term(rhs), functional, name)
        else:
            formula = rec[3]
            int_vars |= lia.free_variables(formula) - {v for v in formula.variables() if v.startswith("|")}
            atom = LengthAtom(formula)
        atoms.append(Not(atom) if negated else atom)
    cube = Cube(alphabet, atoms)
    return NativeProblem(alphabet, cube, sorted(cube.string_vars()), sorted(int_vars))


def _transducer(toks, body, alphabet, number):
    name, kind, args = toks[0], toks[1], toks[2:]
    if kind == "machine":
        try:
            return Transducer.from_text(alphabet, body), False
        except (ValueError, IndexError) as exc:
            raise NativeFormatError(f"bad machine {name}: {exc}", number) from exc
    if kind in ("to_lower", "to_upper"):
        return compile_casing(kind[3:], alphabet), True
    if kind == "identity":
        return Transducer.identity(alphabet), True
    if kind == "pairs":
        words = [_literal(t) for t in args]
        if None in words or len(words) % 2:
            raise NativeFormatError("pairs needs an even number of quoted words", number)
        return Transducer.from_pairs(alphabet, list(zip(words[::2], words[1::2]))), False
    if kind in ("replace", "replace_all", "replace_re", "replace_re_all"):
        if len(args) != 2 or _literal(args[1]) is None:
            raise NativeFormatError(f"{kind} needs a pattern and a quoted replacement", number)
        if kind.startswith("replace_re"):
            pattern = parse_regex(args[0])
        else:
            if _literal(args[0]) is None:
                raise NativeFormatError(f"{kind} needs a quoted pattern", number)
            pattern = re_word(_literal(args[0]))
        mode = "all" if kind.endswith("_all") else "first"
        spec = ReplaceSpec(from_regex(pattern, alphabet), alphabet.encode(_literal(args[1])), mode)
        return compile_replace(spec), True
    raise NativeFormatError(f"unknown transducer kind {kind!r}", number)

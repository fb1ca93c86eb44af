"""Data of the running examples, shared by the test modules."""
from __future__ import annotations

from chainfree.automata import Alphabet, from_regex
from chainfree.constraints import Equation, TransducerConstraint
from chainfree.replaceall import compile_replace, literal_spec
from chainfree.transducer import Transducer

HTML = Alphabet("a<&lt;")


def escape_lt(alphabet: Alphabet = HTML) -> Transducer:
    """replaceAll of ``<`` by ``&lt;``."""
    return compile_replace(literal_spec(alphabet, "<", "&lt;"))


def html_langs(alphabet: Alphabet = HTML) -> dict:
    """Languages of ``T(x y, v z)`` in the running example."""
    return {
        "x": from_regex("[alt]+<*", alphabet),
        "y": from_regex("<*[;&]*", alphabet),
        "v": from_regex("(at)*(&lt)+", alphabet),
        "z": from_regex(";*&*", alphabet),
    }


def html_constraint(alphabet: Alphabet = HTML) -> TransducerConstraint:
    return TransducerConstraint(escape_lt(alphabet), ("x", "y"), ("v", "z"), True, "T")


AB = Alphabet("ab")


def split_langs(alphabet: Alphabet = AB) -> dict:
    """Languages of the equation ``x y u = w z``."""
    lang = {v: from_regex("(a|b)*", alphabet) for v in "yuwz"}
    lang["x"] = from_regex("a*", alphabet)
    return lang


SPLIT_EQUATION = Equation(("x", "y", "u"), ("w", "z"))


def swap_pairs(alphabet: Alphabet) -> Transducer:
    """The finite relation {(ab, ba), (ba, ab)}."""
    return Transducer.from_pairs(alphabet, [("ab", "ba"), ("ba", "ab")])

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from chainfree.automata import Alphabet, Nfa, from_regex
from chainfree.constraints import Fresh
from chainfree.graph import build
from chainfree.replaceall import (Apply, ReplaceSpec, compile_casing, compile_replace, flatten, literal_spec,
                                  reference_casing, reference_replace)
from chainfree.transducer import Functional, check_functional, compose, image, is_homomorphism_syntactic

import oracles
from fixtures import HTML, escape_lt

ABC = Alphabet("abc")
CASES = Alphabet("aAbB")


def apply(t, alphabet, text):
    out = image(t, Nfa.word(alphabet, text)).is_singleton()
    return None if out is None else alphabet.decode(out)


def test_escaping_example():
    t = escape_lt()
    assert apply(t, HTML, "a<t<") == "a&lt;t&lt;"
    assert apply(t, HTML, "&lt;") == "&lt;"
    assert apply(t, HTML, "") == ""


def test_overlapping_matches_are_taken_left_to_right():
    t = compile_replace(literal_spec(ABC, "aa", "b"))
    assert apply(t, ABC, "aaa") == "ba"
    assert apply(t, ABC, "aaaa") == "bb"


def test_regex_pattern_uses_the_shortest_match():
    spec = ReplaceSpec(from_regex("ab*", ABC), ABC.encode("c"))
    assert apply(compile_replace(spec), ABC, "abbab") == "cbbcb"


def test_replace_first_only():
    t = compile_replace(literal_spec(ABC, "a", "c", "first"))
    assert apply(t, ABC, "baba") == "bcba"
    assert apply(t, ABC, "bb") == "bb"


def test_empty_pattern():
    identity = compile_replace(ReplaceSpec(Nfa.epsilon(ABC), ABC.encode("c")))
    assert apply(identity, ABC, "ab") == "ab"
    prepend = compile_replace(ReplaceSpec(Nfa.epsilon(ABC), ABC.encode("c"), "first"))
    assert apply(prepend, ABC, "ab") == "cab"


def test_casing_examples():
    alphabet = Alphabet("aAbB")
    lower, upper = compile_casing("lower", alphabet), compile_casing("upper", alphabet)
    assert apply(lower, alphabet, "Ab") == "ab"
    assert apply(compose(lower, lower), alphabet, "AbB") == apply(lower, alphabet, "AbB")
    assert apply(compose(lower, upper), alphabet, "ab") == "AB" != "ab"
    assert is_homomorphism_syntactic(lower) and is_homomorphism_syntactic(upper)


def test_casing_idempotent_on_all_short_inputs():
    lower = compile_casing("lower", CASES)
    twice = compose(lower, lower)
    for w in oracles.words_up_to("aAbB", 3):
        assert apply(twice, CASES, w) == apply(lower, CASES, w) == w.lower()
        assert CASES.decode(reference_casing(CASES.encode(w), "lower", CASES)) == w.lower()


def test_flatten_nested_applications():
    t_ab = compile_replace(literal_spec(ABC, "a", "b"))
    t_bc = compile_replace(literal_spec(ABC, "b", "c"))
    nested = Apply("ab", t_ab, ("x",))
    outer = Apply("bc", t_bc, nested)
    first, second = flatten(outer, ("t",), Fresh({"x", "t"}))
    assert first.lhs == ("x",) and second.rhs == ("t",) and first.rhs == second.lhs
    assert first.name == "ab" and second.name == "bc"
    (single,) = flatten(nested, ("t",), Fresh({"x", "t"}))
    assert single.lhs == ("x",) and single.rhs == ("t",)


def test_chain_of_four_nestings_gives_a_path_graph():
    t = compile_replace(literal_spec(ABC, "a", "b"))
    app = ("x",)
    for k in range(4):
        app = Apply(f"r{k}", t, app)
    chain = flatten(app, ("t",), Fresh({"x", "t"}))
    assert len(chain) == 4
    assert build(chain).edges == {(0, 1), (1, 2), (2, 3)}


# -- properties ---------------------------------------------------------------------------------


@st.composite
def specs(draw):
    if draw(st.booleans()):
        pattern = draw(st.text("abc", min_size=1, max_size=3))
    else:
        pattern = oracles.random_regex(random.Random(draw(st.integers(0, 10 ** 6))), "abc", 2)
    replacement = draw(st.text("abc", max_size=3))
    mode = draw(st.sampled_from(["all", "first"]))
    return pattern, replacement, mode


@settings(max_examples=80, deadline=None)
@given(specs())
def test_compiled_transducer_matches_both_oracles(spec_parts):
    pattern, replacement, mode = spec_parts
    spec = ReplaceSpec(from_regex(pattern, ABC), ABC.encode(replacement), mode)
    t = compile_replace(spec)
    for w in oracles.words_up_to("abc", 4):
        expected = oracles.python_replace(pattern, replacement, w, first_only=mode == "first")
        assert apply(t, ABC, w) == expected
        assert ABC.decode(reference_replace(ABC.encode(w), spec)) == expected


@settings(max_examples=40, deadline=None)
@given(specs())
def test_compiled_transducers_are_functional(spec_parts):
    pattern, replacement, mode = spec_parts
    t = compile_replace(ReplaceSpec(from_regex(pattern, ABC), ABC.encode(replacement), mode))
    assert isinstance(check_functional(t), Functional)


@settings(max_examples=30, deadline=None)
@given(st.text("ab", min_size=1, max_size=2), st.text("ab", max_size=2))
def test_replace_all_is_total_and_single_valued(pattern, replacement):
    alphabet = Alphabet("ab")
    t = compile_replace(literal_spec(alphabet, pattern, replacement))
    for w in oracles.words_up_to("ab", 6):
        outputs = list(image(t, Nfa.word(alphabet, w)).words(20))
        assert outputs == [alphabet.encode(w.replace(pattern, replacement))]

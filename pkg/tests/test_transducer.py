import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainfree.automata import EPS, LEFT, Alphabet, Nfa, equivalent, from_regex
from chainfree.replaceall import compile_casing
from chainfree.transducer import (Functional, NonFunctional, Transducer, Unknown, abstract_to_dummy,
                                  check_functional, compose, image, inverse, is_homomorphism_syntactic, permute,
                                  preimage, project, project_out, restrict, sync)

import oracles
from fixtures import HTML, escape_lt

AB = Alphabet("ab")
ABC = Alphabet("abc")
SHORT = oracles.words_up_to("ab", 3)

pair_sets = st.lists(st.tuples(st.sampled_from(SHORT), st.sampled_from(SHORT)), max_size=5).map(set)


def relation(t, letters="ab", n=3):
    return {(u, v) for u in oracles.words_up_to(letters, n) for v in oracles.words_up_to(letters, n)
            if t.accepts([u, v])}


# -- examples -----------------------------------------------------------------------------------


def test_from_pairs_recognizes_exactly_the_pairs():
    t = Transducer.from_pairs(AB, [("ab", "b"), ("", "a")])
    assert relation(t) == {("ab", "b"), ("", "a")}


def test_sync_of_single_pairs():
    t = Transducer.from_pairs(ABC, [("a", "b")])
    u = Transducer.from_pairs(ABC, [("b", "c")])
    s = sync(t, u, 1, 0)
    assert s.arity == 3
    assert s.accepts(["a", "b", "c"]) and not s.accepts(["a", "c", "c"])


def test_sync_copies_listed_delimiters():
    x = Transducer.lift(from_regex("a", AB))
    x = Transducer(AB, 1, x.n_states + 1, list(x.transitions) + [(q, (LEFT,), x.n_states) for q in x.final],
                   x.initial, (x.n_states,))
    s = sync(x, Transducer.identity(AB), 0, 0, {LEFT})
    assert s.arity == 2
    assert any(lab == (LEFT, LEFT) for _, lab, _ in s.transitions)


def test_project_out_and_project():
    t = Transducer.from_pairs(ABC, [("a", "b")])
    one = project_out(t, {1})
    assert one.arity == 1 and one.accepts(["a"]) and not one.accepts(["b"])
    assert project(t, 1).is_singleton() == (1,)


def test_compose_examples():
    t = Transducer.from_pairs(ABC, [("a", "b")])
    u = Transducer.from_pairs(ABC, [("b", "c")])
    assert relation(compose(t, u), "abc", 2) == {("a", "c")}
    ident = Transducer.identity(ABC)
    assert relation(compose(ident, t), "abc", 2) == relation(t, "abc", 2)


def test_escaping_twice_leaves_entities_untouched():
    t = escape_lt()
    twice = compose(t, t)
    assert twice.accepts(["a<", "a&lt;"])
    assert not twice.accepts(["a<", "a&lt;lt;"])


def test_image_and_preimage_of_escaping():
    t = escape_lt()
    img = image(t, from_regex("a<", HTML))
    assert img.is_singleton() == HTML.encode("a&lt;")
    pre = preimage(t, from_regex("a&lt;", HTML))
    assert equivalent(pre, from_regex("a(<|&lt;)", HTML))      # entities are left alone
    assert image(t, Nfa.empty(HTML)).is_empty()
    assert equivalent(image(Transducer.identity(AB), from_regex("a*b", AB)), from_regex("a*b", AB))


def test_inverse_swaps_pairs():
    t = Transducer.from_pairs(AB, [("a", "b")])
    assert relation(inverse(t)) == {("b", "a")}
    with pytest.raises(ValueError):
        inverse(Transducer.identity(AB, 3))


def test_restrict_keeps_tape_order():
    t = restrict(Transducer.identity(AB), 0, from_regex("a*", AB))
    assert t.arity == 2
    assert t.accepts(["aa", "aa"]) and not t.accepts(["ab", "ab"])


def test_permute_reorders_tapes():
    t = Transducer.from_pairs(AB, [("a", "bb")])
    swapped = permute(t, (1, 0))
    assert swapped.accepts(["bb", "a"])


def test_functionality_examples():
    assert isinstance(check_functional(escape_lt()), Functional)
    assert isinstance(check_functional(Transducer.identity(AB)), Functional)
    res = check_functional(Transducer.from_pairs(ABC, [("a", "b"), ("a", "c")]))
    assert isinstance(res, NonFunctional) and res.witness == (0,)


def test_functionality_reports_unknown_past_the_delay_bound():
    # two runs on "ab" both write "aaa", one before reading b and one after
    a, b = 0, 1
    trans = [(0, (a, a), 1), (1, (EPS, a), 2), (2, (EPS, a), 3), (3, (b, EPS), 4),
             (0, (a, EPS), 5), (5, (b, a), 6), (6, (EPS, a), 7), (7, (EPS, a), 4)]
    t = Transducer(AB, 2, 8, trans, (0,), (4,))
    assert isinstance(check_functional(t, bound=2), Unknown)
    assert isinstance(check_functional(t, bound=8), Functional)


def test_homomorphism_test_examples():
    single_state = Transducer(HTML, 2, 4, [(0, (a, a), 0) for a in HTML.symbols if HTML.chars[a] != "<"]
                              + [(0, (HTML.symbol("<"), HTML.symbol("&")), 1), (1, (EPS, HTML.symbol("l")), 2),
                                 (2, (EPS, HTML.symbol("t")), 3), (3, (EPS, HTML.symbol(";")), 0)], (0,), (0,))
    assert is_homomorphism_syntactic(single_state)
    assert is_homomorphism_syntactic(Transducer.identity(AB))
    assert is_homomorphism_syntactic(compile_casing("lower", Alphabet("aA")))
    assert not is_homomorphism_syntactic(escape_lt_two_state())


def escape_lt_two_state():
    """replaceAll of ``ab`` by ``c``: a transducer that has to remember a pending ``a``."""
    from chainfree.replaceall import compile_replace, literal_spec
    return compile_replace(literal_spec(ABC, "ab", "c"))


def test_homomorphic_single_state_machine_distributes_over_concatenation():
    t = Transducer(HTML, 2, 4, [(0, (a, a), 0) for a in HTML.symbols if HTML.chars[a] != "<"]
                   + [(0, (HTML.symbol("<"), HTML.symbol("&")), 1), (1, (EPS, HTML.symbol("l")), 2),
                      (2, (EPS, HTML.symbol("t")), 3), (3, (EPS, HTML.symbol(";")), 0)], (0,), (0,))
    words = oracles.words_up_to("a<", 2)
    for u, v in itertools.product(words, repeat=2):
        whole = image(t, Nfa.word(HTML, u + v)).is_singleton()
        parts = image(t, Nfa.word(HTML, u)).is_singleton() + image(t, Nfa.word(HTML, v)).is_singleton()
        assert whole == parts


def test_abstract_to_dummy_keeps_lengths():
    t = escape_lt()
    dummy = abstract_to_dummy(t)
    assert all(x in (EPS, 0) for _, lab, _ in dummy.transitions for x in lab)
    assert dummy.accepts(["aa", "aaaaa"])      # "<" becomes the four letters "&lt;"


def test_text_round_trip():
    t = escape_lt()
    back = Transducer.from_text(HTML, t.to_text())
    assert back.transitions == t.transitions and back.initial == t.initial and back.final == t.final


def test_constructor_checks_labels():
    with pytest.raises(ValueError):
        Transducer(AB, 2, 1, [(0, (0,), 0)], (0,), (0,))
    with pytest.raises(ValueError):
        Transducer(AB, 2, 1, [(0, (LEFT, 0), 0)], (0,), (0,))


# -- properties against explicit pair sets -------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(pair_sets, pair_sets)
def test_sync_matches_the_join_of_relations(r, s):
    t, u = Transducer.from_pairs(AB, r), Transducer.from_pairs(AB, s)
    joined = sync(t, u, 1, 0)
    expected = {(a, b, c) for a, b in r for b2, c in s if b == b2}
    for a, b, c in itertools.product(SHORT, repeat=3):
        assert joined.accepts([a, b, c]) == ((a, b, c) in expected)


@settings(max_examples=100, deadline=None)
@given(pair_sets, pair_sets)
def test_compose_matches_relational_composition(r, s):
    composed = compose(Transducer.from_pairs(AB, r), Transducer.from_pairs(AB, s))
    assert relation(composed) == {(a, c) for a, b in r for b2, c in s if b == b2}


@settings(max_examples=100, deadline=None)
@given(pair_sets)
def test_identity_is_neutral_for_composition(r):
    t = Transducer.from_pairs(AB, r)
    ident = Transducer.identity(AB)
    assert relation(compose(ident, t)) == r == relation(compose(t, ident))


@settings(max_examples=100, deadline=None)
@given(pair_sets, st.lists(st.sampled_from(SHORT), max_size=4))
def test_image_and_preimage_match_enumeration(r, lang):
    t = Transducer.from_pairs(AB, r)
    nfa = Nfa.from_words(AB, lang)
    img = image(t, nfa)
    pre = preimage(t, nfa)
    for w in SHORT:
        assert img.member(w) == any(u in lang and v == w for u, v in r)
        assert pre.member(w) == any(u == w and v in lang for u, v in r)


@settings(max_examples=100, deadline=None)
@given(pair_sets)
def test_inverse_is_an_involution(r):
    t = Transducer.from_pairs(AB, r)
    assert relation(inverse(t)) == {(v, u) for u, v in r}
    assert relation(inverse(inverse(t))) == r


@settings(max_examples=100, deadline=None)
@given(pair_sets)
def test_functional_verdicts_are_correct(r):
    verdict = check_functional(Transducer.from_pairs(AB, r), bound=4)
    outputs = {}
    for u, v in r:
        outputs.setdefault(u, set()).add(v)
    single_valued = all(len(v) == 1 for v in outputs.values())
    if isinstance(verdict, Functional):
        assert single_valued
    elif isinstance(verdict, NonFunctional):
        assert len(outputs[AB.decode(verdict.witness)]) > 1


@settings(max_examples=60, deadline=None)
@given(pair_sets)
def test_reduce_and_trim_preserve_the_relation(r):
    t = Transducer.from_pairs(AB, r)
    assert relation(t.reduce()) == r == relation(t.trim())

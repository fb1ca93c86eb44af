import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainfree import lia
from chainfree.automata import Alphabet, Nfa, equivalent, from_regex
from chainfree.constraints import (CodePointAtom, Cube, Equation, Fresh, LengthAtom, Not, RegularConstraint,
                                   TransducerConstraint)
from chainfree.engine import (Procedure, SolverConfig, Stats, Vertex, len_bw, len_fw, push, solve, substitute,
                              uniform)
from chainfree.intersection import check_pair, pair_shape
from chainfree.replaceall import compile_casing, compile_replace, literal_spec
from chainfree.transducer import Transducer

import oracles
from fixtures import AB, HTML, escape_lt, swap_pairs

CONFIG = SolverConfig(max_steps=50_000)


def _procedure(alphabet, lang, config=None):
    return Procedure(alphabet, Fresh(set(lang)), config or SolverConfig(), Stats())


def _vertex(nodes, lang, lvar=()):
    return Vertex(tuple(nodes), tuple(nodes), dict(lang), (), frozenset(lvar))


# -- helpers ------------------------------------------------------------------------------------


def test_length_awareness_propagates_along_constraints():
    cons = [Equation(("x",), ("y", "z")), Equation(("u",), ("x",))]
    assert len_fw(cons, {"x"}) == {"x", "y", "z"}
    assert len_bw(cons, {"x"}) == {"x", "u"}
    assert len_fw(cons, set()) == frozenset()


def test_uniform_merges_blocks_of_plain_variables():
    names = iter(["c1", "c2"])
    term, eqs = uniform(("a", "b", "L", "c", "d", "e"), {"L"}, lambda _: next(names))
    assert term == ("c1", "L", "c2")
    assert eqs == [Equation(("a", "b"), ("c1",)), Equation(("c", "d", "e"), ("c2",))]
    assert uniform(("a", "L", "b"), {"L"}, None) == (("a", "L", "b"), [])


def test_push_orders_new_items_topologically():
    first, second = Equation(("x",), ("y",)), Equation(("y",), ("z",))
    rest = (Equation(("u",), ("v",)),)
    assert push([second, first], rest) == (first, second) + rest


def test_substitute_replaces_every_occurrence():
    e = Equation(("x", "y", "x"), ("z",))
    assert substitute(e, "x", ("a", "b")) == Equation(("a", "b", "y", "a", "b"), ("z",))


# -- rules --------------------------------------------------------------------------------------


def test_refine_stable_with_disjoint_languages_has_no_conclusion():
    lang = {"x": from_regex("a+", AB), "y": from_regex("b+", AB)}
    eq = Equation(("x",), ("y",))
    assert _procedure(AB, lang).rule_refinest(_vertex([eq], lang), eq) == []


def test_skip_needs_a_stable_constraint():
    lang = {"x": from_regex("a*", AB), "y": from_regex("(a|b)*", AB)}
    proc = _procedure(AB, lang)
    stable = Equation(("y",), ("x",))
    (out,) = proc.rule_skip(_vertex([stable], lang), stable)
    assert out.frontier == () and out.nodes == (stable,)
    unstable = Equation(("x",), ("y",))
    assert proc.rule_skip(_vertex([unstable], lang), unstable) is None
    assert proc.rule_skip(_vertex([stable], lang, {"y"}), stable) is None


def test_combine_non_length_variables():
    lang = {v: Nfa.universal(AB) for v in "abcx"}
    eq = Equation(("a", "b", "c"), ("x",))
    proc = _procedure(AB, lang)
    (out,) = proc.rule_combnl(_vertex([eq], lang, {"c"}), eq)
    head = out.frontier[0]
    assert len(head.lhs) == 2 and head.lhs[1] == "c"
    merged = head.lhs[0]
    assert Equation(("a", "b"), (merged,)) in out.nodes
    assert proc.rule_combnl(_vertex([eq], lang, {"a", "b", "c"}), eq) is None


def test_left_substitution_requires_length_awareness():
    lang = {"x": Nfa.universal(AB), "y": from_regex("a*", AB), "z": from_regex("b*", AB)}
    eq = Equation(("x",), ("y", "z"))
    reader = Equation(("x",), ("z",))
    proc = _procedure(AB, lang)
    assert proc.rule_lsubst(_vertex([eq, reader], lang), eq) is None
    (out,) = proc.rule_lsubst(_vertex([eq, reader], lang, {"x", "y", "z"}), eq)
    assert out.seq == (Equation(("x",), ("y", "z")),)
    assert Equation(("y", "z"), ("z",)) in out.nodes


def test_reduce_transducer_on_a_singleton_input():
    lang = {"l": from_regex("a<", HTML), "t": Nfa.universal(HTML)}
    tc = TransducerConstraint(escape_lt(), ("l",), ("t",), True, "T")
    (out,) = _procedure(HTML, lang).rule_redtrans(_vertex([tc], lang), tc)
    (eq,) = out.nodes
    (f,) = eq.lhs
    assert eq.rhs == ("t",) and out.lang[f].is_singleton() == HTML.encode("a&lt;")


def test_reduce_transducer_on_a_singleton_output():
    lang = {"s": Nfa.universal(HTML), "t": from_regex("a&lt;", HTML)}
    tc = TransducerConstraint(escape_lt(), ("s",), ("t",), True, "T")
    (out,) = _procedure(HTML, lang).rule_redtrans(_vertex([tc], lang), tc)
    (eq,) = out.nodes
    assert eq.lhs == ("s",)
    assert equivalent(out.lang[eq.rhs[0]], from_regex("a(<|&lt;)", HTML))


def test_reduce_transducer_closes_a_branch_with_an_empty_image():
    lang = {"l": from_regex("a", AB), "t": Nfa.universal(AB)}
    tc = TransducerConstraint(Transducer.from_pairs(AB, [("b", "b")]), ("l",), ("t",))
    assert _procedure(AB, lang).rule_redtrans(_vertex([tc], lang), tc) == []


def test_homomorphism_split_and_its_preconditions():
    lower = Alphabet("aA")
    t = compile_casing("lower", lower)
    lang = {"x": Nfa.universal(lower), "y": Nfa.universal(lower), "t": Nfa.universal(lower)}
    tc = TransducerConstraint(t, ("x", "y"), ("t",), True, "lower")
    proc = _procedure(lower, lang)
    assert proc.rule_homtrans(_vertex([tc], lang), tc) is None              # no length-aware input
    (out,) = proc.rule_homtrans(_vertex([tc], lang, {"x"}), tc)
    parts = [a for a in out.nodes if isinstance(a, TransducerConstraint)]
    assert [p.lhs for p in parts] == [("x",), ("y",)]
    joined = [a for a in out.nodes if isinstance(a, Equation)]
    assert joined == [Equation((parts[0].rhs[0], parts[1].rhs[0]), ("t",))]

    abc = Alphabet("abc")
    two_state = compile_replace(literal_spec(abc, "ab", "c"))
    lang = {v: Nfa.universal(abc) for v in "xyt"}
    tc = TransducerConstraint(two_state, ("x", "y"), ("t",), True, "R")
    proc = _procedure(abc, lang)
    assert proc.rule_homtrans(_vertex([tc], lang, {"x"}), tc) is None
    assert proc.stats.hom_declined == 1
    assert _procedure(lower, lang, SolverConfig(hom_heuristic=False)).rule_homtrans(
        _vertex([tc], lang, {"x"}), tc) is None


def test_rules_are_tried_in_order_and_traced():
    lines = []
    config = SolverConfig(trace=lines.append)
    cube = Cube(AB, [Equation(("x",), ("y",)), RegularConstraint("x", from_regex("a*", AB)),
                     RegularConstraint("y", from_regex("(a|b)*", AB))])
    res = solve(cube, config)
    assert res.status == "sat"
    assert lines == ["RSubst x = y -> 1", "LenImage -> 1"]


# -- whole procedure ----------------------------------------------------------------------------


def test_trivially_unsat_and_sat_cubes():
    empty = Cube(AB, [RegularConstraint("x", Nfa.empty(AB))])
    assert solve(empty).status == "unsat"
    res = solve(Cube(AB, [RegularConstraint("x", from_regex("ab", AB))]))
    assert res.status == "sat" and res.model["x"] == AB.encode("ab")


def test_length_constraints_restrict_models():
    lx = lia.length_var("x")
    cube = Cube(AB, [Equation(("x",), ("y", "y")), RegularConstraint("y", from_regex("a*", AB)),
                     LengthAtom(lia.cmp(lx, "==", 6))])
    res = solve(cube, CONFIG)
    assert res.status == "sat" and res.model["x"] == AB.encode("aaaaaa") and res.model["y"] == AB.encode("aaa")
    odd = Cube(AB, [Equation(("x",), ("y", "y")), LengthAtom(lia.cmp(lx, "==", 5))])
    assert solve(odd, CONFIG).status == "unsat"


def test_code_point_atom():
    abc = Alphabet("abc")
    cube = Cube(abc, [CodePointAtom("x", "y"), RegularConstraint("x", from_regex("a|b", abc)),
                      RegularConstraint("y", from_regex("a", abc))])
    res = solve(cube, CONFIG)
    assert res.status == "sat" and res.model["x"] == abc.encode("b")


def test_negated_equation():
    cube = Cube(AB, [Not(Equation(("x",), ("y",))), RegularConstraint("x", from_regex("a", AB)),
                     RegularConstraint("y", from_regex("a", AB))])
    assert solve(cube, CONFIG).status == "unsat"


def test_escaping_round_trip_is_unsat():
    # escaping never produces a bare "<"
    cube = Cube(HTML, [TransducerConstraint(escape_lt(), ("x",), ("y",), True),
                       RegularConstraint("y", from_regex(".*<.*", HTML))])
    assert solve(cube, CONFIG).status == "unsat"


def test_solver_is_deterministic():
    rng = random.Random(21)
    pool = oracles.relation_pool(AB)
    for _ in range(10):
        inst = oracles.random_instance(rng, AB, pool)
        first, second = solve(inst.cube, CONFIG), solve(inst.cube, CONFIG)
        assert first.status == second.status and first.model == second.model
        assert first.stats.vertices == second.stats.vertices


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_verdicts_agree_with_enumeration(seed):
    rng = random.Random(seed)
    inst = oracles.random_instance(rng, AB, oracles.relation_pool(AB), negation=rng.choice([None, "eq", "tr"]))
    res = solve(inst.cube, CONFIG)
    expected = oracles.oracle(inst)
    assert res.status != ("unsat" if expected else "sat")
    if res.status == "sat" and res.model is not None:
        value = oracles.decode_model(res.model, AB)
        assert oracles.satisfies(inst, {v: value.get(v, "") for v in inst.variables})


# -- intersection check -------------------------------------------------------------------------


def test_pair_shape_recognition():
    t = Transducer.identity(AB)
    assert pair_shape([TransducerConstraint(t, ("x",), ("x",))]).base == "x"
    two = pair_shape([TransducerConstraint(t, ("x",), ("y",)), TransducerConstraint(t, ("y",), ("x",))])
    assert two is not None and two.other in ("x", "y")
    assert pair_shape([TransducerConstraint(t, ("x", "y"), ("z",))]) is None
    assert pair_shape([Equation(("x",), ("y",)), Equation(("y",), ("z",))]) is None


def test_check_pair_finds_a_fixed_point():
    swap = Transducer.from_pairs(AB, [("ab", "ab"), ("a", "b")])
    shape = pair_shape([TransducerConstraint(swap, ("x",), ("x",))])
    res = check_pair(shape, {"x": Nfa.universal(AB)}, AB, 4)
    assert res.status == "sat" and res.assignment["x"] == AB.encode("ab")


def test_check_pair_refutes_a_swap():
    shape = pair_shape([TransducerConstraint(swap_pairs(AB), ("x",), ("x",))])
    res = check_pair(shape, {"x": Nfa.universal(AB)}, AB, 4)
    assert res.status == "unsat"


def test_intersection_bound_must_be_positive():
    with pytest.raises(ValueError):
        SolverConfig(intersect_bound=0)

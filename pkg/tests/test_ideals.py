import itertools

import pytest
from hypothesis import given, settings, strategies as st

from conftest import all_corpus
from oracles import closed_under
from idealkit import corpus
from idealkit.congruence import Congruence, all_congruences, point_class
from idealkit.ideals import (
    GammaSet, IdealTerm, brute_force_ideals, check_congruential_witness, check_epsilon_chains,
    check_ideal_determined, check_interval_convexity, check_lemma_special, check_maincon3,
    check_normal_ideals, check_point_classes_are_ideals, check_subtractive_equivalents,
    check_t_from_axioms, check_zero_regular, congruence_interval, default_gamma,
    enumerate_ideal_terms, find_maincon_q, find_subtractive_witness, generate_ideal,
    ideal_lattice, is_gamma_ideal, is_t_special, one_step_ideal, subtractive_identities,
    t_from_axioms,
)
from idealkit.lattice import check_modularity, pentagon
from idealkit.terms import App, TermError, Var, parse_term, term_function

P = parse_term


def gamma_of(*texts):
    return GammaSet([P(t) for t in texts])


def test_ideal_term_needs_slot():
    with pytest.raises(TermError):
        IdealTerm(P("x1"), ("x1",), ())
    assert IdealTerm.from_term(P("c1")).y_vars == ("y1",)


def test_is_gamma_ideal_examples(g3):
    gam = gamma_of("imp(x1,y1)", "y1")
    assert is_gamma_ideal(g3, gam, {1, 2}).ok
    assert is_gamma_ideal(g3, gam, {0, 1, 2}).ok
    assert is_gamma_ideal(g3, gamma_of("imp(x1,y1)"), {2}).ok
    r = is_gamma_ideal(g3, gam, {1})
    assert not r.ok and "point" in r.witness["reason"]


def test_is_gamma_ideal_counterexample(g3):
    r = is_gamma_ideal(g3, gamma_of("meet(x1,y1)"), {1, 2})
    assert not r.ok
    assert r.witness["value"] == 0


def test_generate_examples(g3, l3):
    gam = gamma_of("imp(x1,y1)", "y1")
    assert generate_ideal(g3, gam, {1}) == {1, 2}
    assert generate_ideal(g3, gam, ()) == {2}
    assert generate_ideal(l3, default_gamma(l3, 2), {1}) == {0, 1, 2}


def test_ideal_lattice_examples(g3, z4):
    assert [sorted(m) for m in ideal_lattice(g3, default_gamma(g3, 2))] == [[2], [1, 2], [0, 1, 2]]
    assert [sorted(m) for m in ideal_lattice(z4, default_gamma(z4, 2))] == [[0], [0, 2], [0, 1, 2, 3]]
    one = corpus.bundled("onepoint")
    assert len(ideal_lattice(one, default_gamma(one))) == 1


def test_enumerate_ideal_terms_examples(g3):
    terms = {str(t) for t in enumerate_ideal_terms(g3, 1, 1, 1)}
    assert "y1" in terms and "imp(x1,y1)" in terms
    assert "imp(y1,x1)" not in terms


@pytest.mark.parametrize("alg", all_corpus(), ids=lambda a: a.label())
@pytest.mark.parametrize("depth", [1, 2, 3])
def test_ideals_match_bruteforce(alg, depth):
    gam = default_gamma(alg, depth)
    assert set(ideal_lattice(alg, gam).members) == brute_force_ideals(alg, gam)


@pytest.mark.parametrize("alg", all_corpus(), ids=lambda a: a.label())
@pytest.mark.parametrize("depth", [1, 2, 3])
def test_one_step_equals_fixpoint(alg, depth):
    gam = default_gamma(alg, depth)
    for r in range(alg.size + 1):
        for X in itertools.combinations(range(alg.size), r):
            assert one_step_ideal(alg, gam, X) == generate_ideal(alg, gam, X)


def test_sparse_gamma_fixpoint_exceeds_one_step(z4):
    # without negation, one round of sums from {0,1} reaches only 2
    gam = gamma_of("y1", "add(y1,y2)")
    assert one_step_ideal(z4, gam, {1}) == {0, 1, 2}
    assert generate_ideal(z4, gam, {1}) == {0, 1, 2, 3}


@settings(max_examples=25, deadline=None)
@given(name=st.sampled_from(["g3", "l3", "b2"]), point=st.sampled_from(["c0", "c1"]),
       subset=st.sets(st.integers(0, 2)))
def test_ideals_match_reference_closure(name, point, subset):
    alg = corpus.bundled(name, point)
    gam = default_gamma(alg, 1, 1, 2)
    texts = [str(t) for t in gam]
    subset = {a for a in subset if a < alg.size} | {alg.point}
    assert is_gamma_ideal(alg, gam, subset).ok == closed_under(alg, texts, subset)


@pytest.mark.parametrize("alg", all_corpus(), ids=lambda a: a.label())
def test_intersection_closure_and_point_classes(alg):
    gam = default_gamma(alg)
    lat = ideal_lattice(alg, gam)
    for a, b in itertools.combinations(lat.members, 2):
        assert a & b in lat
    assert check_point_classes_are_ideals(alg, gam).ok


def test_subtractive_witness_examples(l3, g3, set2):
    s = find_subtractive_witness(l3.with_point("c0"), 3)
    assert s is not None
    ref = P("mul(imp(y1,c0),x1)")
    alg0 = l3.with_point("c0")
    assert (term_function(alg0, s, ["x1", "y1"]) == term_function(alg0, ref, ["x1", "y1"])).all()
    assert str(find_subtractive_witness(g3, 1)) == "imp(y1,x1)"
    assert find_subtractive_witness(set2, 3) is None
    assert find_subtractive_witness(corpus.bundled("sl3"), 3) is None


def test_subtractive_identities_zero_term(l3):
    assert subtractive_identities(l3.with_point("c0"), P("mul(imp(y1,c0),x1)")).ok


def test_interval_examples(g3):
    iv = congruence_interval(g3, {1, 2})
    assert str(iv.lower) == str(iv.upper) == "{{0},{1,2}}"
    assert congruence_interval(g3, {2}).lower == Congruence.identity(3)
    assert congruence_interval(g3, {1}) is None


def test_non_normal_ideal_exists():
    # sl3 at 0 with a sparse Gamma: {0,2} is closed but no congruence has it as 0-class
    sl3 = corpus.bundled("sl3")
    gam = gamma_of("y1")
    assert is_gamma_ideal(sl3, gam, {0, 2}).ok
    assert congruence_interval(sl3, {0, 2}) is None


@pytest.mark.parametrize("alg", all_corpus(), ids=lambda a: a.label())
def test_interval_convexity(alg):
    assert check_interval_convexity(alg).ok


def test_subtractive_equivalents(l3, g3, set2):
    assert check_subtractive_equivalents(l3.with_point("c0"), P("mul(imp(y1,c0),x1)")).ok
    assert check_subtractive_equivalents(g3, P("imp(y1,x1)")).ok
    r = check_subtractive_equivalents(set2, P("x1"))
    assert r.status == "ERROR"


def test_modularity():
    assert not check_modularity(pentagon()).ok
    z4 = corpus.bundled("z4")
    assert check_modularity(ideal_lattice(z4, default_gamma(z4)).as_lattice()).ok


SUBTRACTIVE = [a for a in all_corpus() if find_subtractive_witness(a, 3) is not None]


def test_subtractive_instances():
    assert {a.label() for a in all_corpus()} - {a.label() for a in SUBTRACTIVE} == {"sl3@c0", "set2@c0"}


@pytest.mark.parametrize("alg", SUBTRACTIVE, ids=lambda a: a.label())
def test_corollary_on_subtractive(alg):
    assert check_modularity(ideal_lattice(alg, default_gamma(alg)).as_lattice()).ok
    assert check_normal_ideals(alg).ok


def test_congruential_witness(g3, l3):
    assert check_congruential_witness(g3, [P("imp(x1,y1)"), P("imp(y1,x1)")]).ok
    assert check_congruential_witness(l3.with_point("c0"), [P("mul(imp(x1,c0),y1)"), P("mul(imp(y1,c0),x1)")]).ok
    assert check_congruential_witness(corpus.bundled("onepoint"), [P("imp(x1,y1)")]).ok
    r = check_congruential_witness(g3, [P("x1")])
    assert r.status == "ERROR"


def test_epsilon_chains(g3, z4):
    assert check_epsilon_chains(g3).ok
    assert check_epsilon_chains(z4).ok


def test_maincon3(l3, g3):
    alg = l3.with_point("c0")
    d = [P("mul(imp(x1,c0),y1)"), P("mul(imp(y1,c0),x1)")]
    q = find_maincon_q(alg, d, 3)
    assert q is not None
    r = check_maincon3(alg, d, q)
    assert r.ok and any("fifth" in n for n in r.notes)
    assert not check_maincon3(g3, [], App("c1")).ok
    assert check_maincon3(corpus.bundled("onepoint"), [], App("c1")).ok
    assert check_maincon3(g3, [], P("x9")).status == "ERROR"


def test_zero_regular_examples(g3, z4, sl3):
    assert check_zero_regular(g3).ok
    assert check_zero_regular(z4).ok
    r = check_zero_regular(sl3)
    assert not r.ok and r.witness["point_class"] == "{0}"


def test_ideal_determined(l3, set2):
    r = check_ideal_determined(l3)
    assert r.ok
    r0 = check_ideal_determined(l3.with_point("c0"))
    assert r0.ok
    assert not check_ideal_determined(set2).ok


def test_t_special_examples(g3):
    T = [P("imp(imp(imp(x1,c0),c0),x1)")]
    assert is_t_special(g3, {1, 2}, T).ok
    assert is_t_special(g3, {0, 1, 2}, T).ok
    r = is_t_special(g3, {2}, T)
    assert not r.ok and r.witness["assignment"] == {"x1": 1}


def test_lemma_special(g3):
    d = [P("imp(x1,y1)"), P("imp(y1,x1)")]
    T = [P("imp(imp(imp(x1,c0),c0),x1)")]
    r = check_lemma_special(g3, d, T)
    assert r.ok
    assert dict((row[0], row[1:]) for row in r.details["rows"]) == {
        "{2}": (False, False), "{1,2}": (True, True), "{0,1,2}": (True, True)}
    assert check_lemma_special(g3, d, []).ok


def test_t_from_axioms(g3):
    d = [P("imp(x1,y1)"), P("imp(y1,x1)")]
    dn = P("imp(imp(x1,c0),c0)")
    assert [str(t) for t in t_from_axioms(d, [(dn, Var("x1"))])] == [
        "imp(imp(imp(x1,c0),c0),x1)", "imp(x1,imp(imp(x1,c0),c0))"]
    assert t_from_axioms(d, []) == []
    comm = t_from_axioms(d, [(P("join(x1,y1)"), P("join(y1,x1)"))])
    assert len(comm) == 2
    for t in comm:
        assert (term_function(g3, t, ["x1", "y1"]) == 2).all()
    assert check_t_from_axioms(g3, d, [(dn, Var("x1"))]).ok

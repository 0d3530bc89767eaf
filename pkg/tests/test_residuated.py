import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from oracles import compatible_partitions, evaluate, tables_of

from idealkit import corpus
from idealkit.algebra import AlgebraError, make_algebra
from idealkit.congruence import Congruence, all_congruences, point_class
from idealkit.report import PreconditionError
from idealkit.residuated import (
    ResiduatedView, audit_generation_lemma, check_filter_congruence_iso, check_filter_join,
    check_normal_operator, check_operator_filters, check_residuated_axioms, filter_from_theta,
    filter_join, filters, generate_operator_filter, normal_filters, operator_filters,
    operator_polynomials, polynomial_filter, theta_from_filter, zero_ideal_suite,
)

OPS = ["g3delta", "g3nn", "g3id"]


def view(name):
    return ResiduatedView.of(corpus.bundled(name))


def sets(fam):
    return [sorted(m) for m in fam]


def sugihara3():
    """Odd Sugihara monoid on -1 < 0 < 1 (relabelled 0 < 1 < 2); unit 0 is not the top."""
    val = [-1, 0, 1]
    idx = {v: i for i, v in enumerate(val)}

    def mul(a, b):
        x, y = val[a], val[b]
        if abs(x) != abs(y):
            return a if abs(x) > abs(y) else b
        return idx[min(x, y)]

    def imp(a, b):
        x, y = val[a], val[b]
        return idx[max(-x, y)] if x <= y else idx[min(-x, y)]

    return make_algebra("s3", 3, "e", {
        "join": (2, max), "meet": (2, min), "mul": (2, mul), "imp": (2, imp), "e": (0, 1), "bot": (0, 0),
    }, {"join": "join", "meet": "meet", "fuse": "mul", "lres": "imp", "rres": "imp", "one": "e", "zero": "bot"})


def test_axioms_flags():
    flags = check_residuated_axioms(corpus.bundled("b2")).details["flags"]
    assert all(flags[k] for k in ("integral", "commutative", "FL_w", "FL_e", "FL_ew"))
    l3 = check_residuated_axioms(corpus.bundled("l3"))
    assert l3.ok and l3.details["flags"]["FL_ew"] and not l3.details["flags"]["idempotent_fuse"]
    assert check_residuated_axioms(corpus.bundled("g3")).details["flags"]["idempotent_fuse"]


def test_non_integral_view():
    alg = sugihara3()
    r = check_residuated_axioms(alg)
    assert r.ok and not r.details["flags"]["integral"]
    v = ResiduatedView.of(alg)
    with pytest.raises(PreconditionError):
        theta_from_filter(v, {1, 2})
    assert check_filter_congruence_iso(v).status == "SKIP"


def test_axiom_failure_reports_law():
    g3 = corpus.bundled("g3")
    t = dict(g3.tables)
    bad = t["imp"].copy()
    bad[1, 0] = 2
    alg = make_algebra("bad", 3, "c1", {s: (g3.signature.arities[s], t[s] if s != "imp" else bad)
                                       for s in g3.signature.names}, g3.bindings)
    r = check_residuated_axioms(alg)
    assert not r.ok and "residuation" in r.witness["law"]


def test_missing_bindings():
    with pytest.raises(AlgebraError, match="missing"):
        ResiduatedView.of(corpus.bundled("z4"))


def test_filter_examples():
    assert sets(filters(view("g3"))) == [[2], [1, 2], [0, 1, 2]]
    assert sets(filters(view("l3"))) == [[2], [0, 1, 2]]
    assert sets(filters(view("b2"))) == [[1], [0, 1]]


@pytest.mark.parametrize("name", ["b2", "g3", "l3", "l4"] + OPS)
def test_commutative_normal_filters(name):
    v = view(name)
    assert normal_filters(v) == filters(v)


def test_theta_filter_examples():
    v = view("g3")
    assert str(theta_from_filter(v, {1, 2})) == "{{0},{1,2}}"
    assert theta_from_filter(v, {2}) == Congruence.identity(3)
    assert theta_from_filter(v, {0, 1, 2}) == Congruence.total(3)
    assert filter_from_theta(v, Congruence.from_blocks(3, [[1, 2]])) == {1, 2}


@pytest.mark.parametrize("name", ["b2", "g3", "l3", "l4", "onepoint"] + OPS)
def test_filter_congruence_iso(name):
    v = view(name)
    assert check_filter_congruence_iso(v).ok
    if not v.operators:
        classes = {point_class(v.alg, c, v.one) for c in all_congruences(v.alg)}
        assert set(filters(v)) == classes


def test_normal_operator_examples():
    assert check_normal_operator(view("g3nn"), "nn").ok
    assert check_normal_operator(view("g3delta"), "delta").ok
    g3 = corpus.g3(extra={"k0": (1, lambda a: 0)}, name="g3k0")
    r = check_normal_operator(ResiduatedView.of(g3), "k0")
    assert not r.ok and r.witness["law"] == "h(1)=1"


def test_operator_filter_examples():
    assert sets(operator_filters(view("g3delta"))) == [[2], [0, 1, 2]]
    assert len(filters(view("g3delta"))) == 3
    assert sets(operator_filters(view("g3nn"))) == [[2], [1, 2], [0, 1, 2]]
    assert operator_filters(view("g3id")) == filters(view("g3id"))


@pytest.mark.parametrize("name", OPS + ["g3", "l3"])
def test_prop35(name):
    assert check_operator_filters(view(name)).ok


def test_generation_examples():
    assert generate_operator_filter(view("g3delta"), {1}) == {0, 1, 2}
    assert generate_operator_filter(view("g3"), {1}) == {1, 2}
    assert generate_operator_filter(view("g3"), {2}) == {2}


@pytest.mark.parametrize("name", OPS + ["g3", "l3", "b2", "l4"])
def test_generation_lemma_all_subsets(name):
    v = view(name)
    for r in range(v.n + 1):
        for X in itertools.combinations(range(v.n), r):
            assert polynomial_filter(v, X, 4) <= generate_operator_filter(v, X)
            assert audit_generation_lemma(v, X, 4).ok


def test_polynomials():
    polys = operator_polynomials(view("g3delta"), 4)
    assert (0, 1, 2) in polys and (0, 0, 2) in polys
    assert operator_polynomials(view("g3"), 4) == [(0, 1, 2)]


def test_filter_join_examples():
    v = view("g3")
    assert filter_join(v, {2}, {1, 2}) == {1, 2}
    assert filter_join(v, {1, 2}, {1, 2}) == {1, 2}
    assert filter_join(v, {2}, {0, 1, 2}) == {0, 1, 2}


@pytest.mark.parametrize("name", ["b2", "g3", "l3", "l4"] + OPS)
def test_filter_join_audit(name):
    assert check_filter_join(view(name)).ok


def test_zero_suite_examples():
    l3 = zero_ideal_suite(view("l3"))
    assert l3.ok and l3.details["point_regular"]
    assert zero_ideal_suite(view("b2")).ok
    g3 = zero_ideal_suite(view("g3"))
    assert g3.ok and not g3.details["point_regular"]
    w = g3.details["regularity_failure"]
    assert {w["theta"], w["phi"]} == {"{{0},{1},{2}}", "{{0},{1,2}}"} and w["point_class"] == "{0}"
    assert zero_ideal_suite(ResiduatedView.of(sugihara3())).status == "ERROR"


# -- random FL_ew chains built from t-norm-like tables ------------------------

def chain_from_mul(n, mul):
    imp = lambda a, b: max(c for c in range(n) if mul[a][c] <= b)
    return corpus.chain_flew("rnd", n, lambda a, b: mul[a][b], imp)


@st.composite
def monotone_chain_monoids(draw, max_n=4):
    """Commutative monotone tables on a chain with top as unit and 0 absorbing; associativity filtered."""
    n = draw(st.integers(2, max_n))
    top = n - 1
    mul = [[0] * n for _ in range(n)]
    for a in range(n):
        mul[a][top] = mul[top][a] = a
    for a in range(1, top):
        for b in range(a, top):
            lo = max(mul[a - 1][b], mul[a][b - 1]) if b > a else mul[a - 1][b]
            mul[a][b] = mul[b][a] = draw(st.integers(lo, a))
    ok = all(mul[mul[a][b]][c] == mul[a][mul[b][c]] for a in range(n) for b in range(n) for c in range(n))
    return n, mul, ok


@settings(max_examples=60, deadline=None)
@given(monotone_chain_monoids())
def test_random_chains(data):
    n, mul, assoc = data
    alg = chain_from_mul(n, mul)
    r = check_residuated_axioms(alg)
    assert r.ok == assoc
    if not assoc:
        return
    v = ResiduatedView.of(alg)
    assert check_filter_congruence_iso(v).ok
    assert check_filter_join(v).ok
    z = zero_ideal_suite(v)
    assert dict(z.details["parts"])["s(x,point)=x"] == "PASS"
    assert z.ok == (oracle_formula_mismatch(alg) is None)


def oracle_formula_mismatch(alg):
    """First 0-class where {(a,b): (a->0)b, (b->0)a in I} differs from the coarsest congruence with that class."""
    tabs = tables_of(alg)
    n = alg.size
    zero = alg.bindings["zero"]
    z = evaluate(tabs, zero, {})
    parts = list(compatible_partitions(alg))
    classes = {next(b for b in p if z in b) for p in parts}
    for cls in sorted(classes, key=sorted):
        upper = set()
        for p in parts:
            if cls in p:
                upper |= {(a, b) for blk in p for a in blk for b in blk}
        formula = {(a, b) for a in range(n) for b in range(n)
                   if evaluate(tabs, f"mul(imp(x1,{zero}),y1)", {"x1": a, "y1": b}) in cls
                   and evaluate(tabs, f"mul(imp(y1,{zero}),x1)", {"x1": a, "y1": b}) in cls}
        if formula != upper:
            return sorted(cls), sorted(formula ^ upper)
    return None


def test_zero_formula_counterexample():
    """Drastic product on a 4-chain: the displayed formula relates 1 and 2 although Con = {Δ, ∇}."""
    alg = chain_from_mul(4, [[0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 2], [0, 1, 2, 3]])
    assert check_residuated_axioms(alg).ok
    assert len(compatible_partitions(alg)) == 2
    r = zero_ideal_suite(ResiduatedView.of(alg))
    assert r.status == "FAIL"
    assert r.witness["ideal"] == "{0}" and r.witness["pair"] == [1, 2]
    assert r.witness["in_formula"] and not r.witness["in_upper"]
    assert oracle_formula_mismatch(alg) == ([0], [(1, 2), (2, 1)])

"""Acceptance criteria 1-9, one pass/fail line each."""

import io
import itertools
import time

import pytest

from idealkit import corpus
from idealkit.audits import default_t_pool, run_audit
from idealkit.cli import main
from idealkit.congruence import all_congruences, brute_force_congruences, point_class
from idealkit.ideals import (
    brute_force_ideals, check_lemma_special, check_subtractive_equivalents, check_zero_regular,
    congruence_interval, default_gamma, enumerate_ideal_terms, find_subtractive_witness, generate_ideal,
    ideal_lattice, is_t_special, one_step_ideal, quotient_satisfies, subtractive_identities,
)
from idealkit.quasi import (
    QuasiView, check_quasi_axioms, enumerate_quasi_models, regular_core, theorem_audit_61, theorem_audit_62,
)
from idealkit.residuated import (
    ResiduatedView, audit_generation_lemma, check_filter_congruence_iso, check_filter_join,
    check_operator_filters, filters, operator_filters, zero_ideal_suite,
)
from idealkit.terms import parse_term
from oracles import compatible_partitions

BUDGET = 10.0
FLEW = ("b2", "g3", "l3", "l4")


def pointed_corpus():
    return [corpus.bundled(n) for n in corpus.CORPUS_NAMES] + [corpus.bundled(n, "c0") for n in ("b2", "g3", "l3")]


@pytest.fixture
def verdict(capsys):
    def emit(number, title, checks, started):
        elapsed = time.perf_counter() - started
        failed = [k for k, ok in checks.items() if not ok]
        if elapsed >= BUDGET:
            failed.append(f"took {elapsed:.1f}s")
        with capsys.disabled():
            tag = "PASS" if not failed else "FAIL"
            extra = f" ({'; '.join(failed)})" if failed else ""
            print(f"\n[{tag}] criterion {number}: {title} [{elapsed:.2f}s]{extra}")
        assert not failed
    return emit


def test_criterion_1(verdict):
    t = time.perf_counter()
    checks = {}
    for name, k in (("g3", 3), ("l3", 2)):
        v = ResiduatedView.of(corpus.bundled(name))
        checks[f"|filters({name})|"] = len(filters(v)) == k
        checks[f"|Con({name})|"] = len(all_congruences(v.alg)) == k
        checks[f"iso {name}"] = check_filter_congruence_iso(v).ok
    verdict(1, "filter/congruence correspondence on G3 and L3", checks, t)


def test_criterion_2(verdict):
    t = time.perf_counter()
    checks, found = {}, set()
    for alg in pointed_corpus():
        s = find_subtractive_witness(alg, 3)
        if s is None:
            continue
        found.add(alg.label())
        checks[f"thm2 {alg.label()}"] = check_subtractive_equivalents(alg, s).ok
    for label in ("g3@c1", "l3@c1", "l3@c0", "b2@c0"):
        checks[f"witness at {label}"] = label in found
    s0 = parse_term("mul(imp(y1,c0),x1)")
    for name in ("l3", "b2"):
        alg = corpus.bundled(name, "c0")
        checks[f"(y->0)x on {name}"] = subtractive_identities(alg, s0).ok and check_subtractive_equivalents(alg, s0).ok
    verdict(2, f"subtractive point-class audit on {len(found)} instances", checks, t)


def test_criterion_3(verdict):
    t = time.perf_counter()
    checks, n = {}, 0
    for alg in pointed_corpus():
        if find_subtractive_witness(alg, 3) is None:
            continue
        n += 1
        checks[f"cormain {alg.label()}"] = run_audit("cormain", alg).ok
    sl3 = corpus.bundled("sl3")
    checks["sl3 has no witness"] = find_subtractive_witness(sl3, 3) is None
    reg = check_zero_regular(sl3)
    checks["sl3 regularity FAIL"] = reg.status == "FAIL" and reg.witness["point_class"] == "{0}" \
        and reg.witness["theta"] != reg.witness["phi"]
    verdict(3, f"modular ideal lattices on {n} subtractive instances, sl3 regularity failure", checks, t)


def test_criterion_4(verdict):
    t = time.perf_counter()
    g3 = corpus.bundled("g3")
    d = [parse_term("imp(x1,y1)"), parse_term("imp(y1,x1)")]
    T = [parse_term("imp(imp(imp(x1,c0),c0),x1)")]
    con = all_congruences(g3)
    up = lambda I: congruence_interval(g3, I, con).upper
    checks = {
        "{1,2} T-special": is_t_special(g3, {1, 2}, T).ok,
        "G3/{1,2}^e satisfies T": quotient_satisfies(g3, up({1, 2}), T).ok,
        "{2} not T-special": not is_t_special(g3, {2}, T).ok,
        "G3 fails T": not quotient_satisfies(g3, up({2}), T).ok,
    }
    for name in FLEW:
        alg = corpus.bundled(name)
        v = ResiduatedView.of(alg)
        dd = [v.term("lres", parse_term("x1"), parse_term("y1")), v.term("lres", parse_term("y1"), parse_term("x1"))]
        for pool, terms in default_t_pool(v).items():
            checks[f"{name}/{pool}"] = check_lemma_special(alg, dd, terms).ok
    verdict(4, "T-special biconditional over all FL_ew filters and term pools", checks, t)


def test_criterion_5(verdict):
    t = time.perf_counter()
    checks = {}
    for name in ("l3", "b2"):
        r = zero_ideal_suite(ResiduatedView.of(corpus.bundled(name)))
        checks[f"{name} suite"] = r.ok and r.witness["s"] == "mul(imp(y1,c0),x1)"
    g3 = zero_ideal_suite(ResiduatedView.of(corpus.bundled("g3")))
    w = g3.details.get("regularity_failure") or {}
    checks["g3 regularity failure reported"] = not g3.details["point_regular"] and w.get("theta") != w.get("phi") \
        and bool(w.get("point_class"))
    verdict(5, "zero-ideal subtractivity and displayed I^e formula on L3, B2; G3 regularity failure", checks, t)


def test_criterion_6(verdict):
    t = time.perf_counter()
    dv = ResiduatedView.of(corpus.bundled("g3delta"))
    checks = {"g3delta 2 vs 3": len(operator_filters(dv)) == 2 and len(filters(dv)) == 3}
    for name in corpus.OPERATOR_NAMES:
        v = ResiduatedView.of(corpus.bundled(name))
        checks[f"prop35 {name}"] = check_operator_filters(v).ok
        checks[f"prop36 {name}"] = all(
            audit_generation_lemma(v, X, 4).ok
            for r in range(v.n + 1) for X in itertools.combinations(range(v.n), r))
    for name in FLEW + corpus.OPERATOR_NAMES:
        checks[f"join {name}"] = check_filter_join(ResiduatedView.of(corpus.bundled(name))).ok
    verdict(6, "operator filters, generation formula and filter joins", checks, t)


def test_criterion_7(verdict):
    t = time.perf_counter()
    checks, findings, models = {}, [], 0
    for name in FLEW + ("onepoint",):
        alg = corpus.bundled(name)
        checks[f"{name} quasi"] = check_quasi_axioms(alg).ok and \
            regular_core(QuasiView.of(alg)).elements == tuple(range(alg.size))
    for size in (1, 2, 3):
        for m in enumerate_quasi_models(size):
            models += 1
            v = QuasiView.of(m)
            for r in (theorem_audit_61(v), theorem_audit_62(v)):
                if r.ok:
                    continue
                checks[f"{r.theorem} {m.name} has a record"] = r.status == "FAIL" and r.witness is not None
                findings.append(f"{r.theorem}@{m.name}")
    title = f"quasi-FL_w enumeration, {models} models, findings: {', '.join(findings) or 'none'}"
    verdict(7, title, checks, t)


def test_criterion_8(verdict):
    t = time.perf_counter()
    checks = {}
    for alg in pointed_corpus():
        label = alg.label()
        con = set(all_congruences(alg))
        oracle = {frozenset(frozenset(b) for b in c.blocks()) for c in con}
        checks[f"Con {label}"] = con == brute_force_congruences(alg) and oracle == set(compatible_partitions(alg))
        gamma = default_gamma(alg)
        checks[f"Id {label}"] = set(ideal_lattice(alg, gamma).members) == brute_force_ideals(alg, gamma)
        deep = enumerate_ideal_terms([alg], 1, 2, 3)
        checks[f"one-step {label}"] = all(
            one_step_ideal(alg, deep, X) == generate_ideal(alg, deep, X)
            for r in range(alg.size + 1) for X in itertools.combinations(range(alg.size), r))
    verdict(8, "oracle cross-checks for Con, ideal lattices and one-step generation", checks, t)


def test_criterion_9(verdict):
    t = time.perf_counter()
    runs = []
    for _ in range(2):
        out = io.StringIO()
        main(["audit", "--theorem", "all", "--corpus", "--format", "machine"], stream=out)
        runs.append(out.getvalue())
    checks = {"byte-identical": runs[0] == runs[1], "non-empty": bool(runs[0])}
    verdict(9, f"deterministic corpus audit ({len(runs[0].splitlines())} records)", checks, t)

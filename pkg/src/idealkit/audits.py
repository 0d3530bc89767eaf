"""Theorem audits by id, run over one or more algebras.

Each id maps to a function returning one AuditReport. Audits whose
hypotheses do not apply to an algebra report SKIP with a note.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import report as rep
from .algebra import AlgebraError, FiniteAlgebra
from .congruence import all_congruences, point_class
from .ideals import (
    check_congruential_witness, check_epsilon_chains, check_interval_convexity, check_lemma_special,
    check_maincon3, check_normal_ideals, check_point_classes_are_ideals, check_subtractive_equivalents,
    check_t_from_axioms, check_zero_regular, default_gamma, find_congruential_witness, find_maincon_q,
    find_regularity_terms, find_subtractive_witness, generate_ideal, ideal_lattice, one_step_ideal,
)
from .lattice import check_lattice_axioms, check_modularity, fmt_set
from .quasi import QuasiView, check_quasi_axioms, regular_core, theorem_audit_61, theorem_audit_62
from .residuated import (
    ResiduatedView, audit_generation_lemma, check_filter_congruence_iso, check_filter_join,
    check_operator_filters, check_residuated_axioms, zero_difference_terms, zero_ideal_suite,
)
from .terms import App, Var, satisfies_quasi_identity

THEOREMS = ("lemma1", "thm2", "cormain", "maincon", "gummursini", "special",
            "sec3-iso", "prop35", "prop36", "sec5", "sec6-1", "sec6-2")
# audits that do not depend on the designated point
POINT_FREE = frozenset({"sec3-iso", "prop35", "prop36", "sec5", "sec6-1", "sec6-2"})


@dataclass
class AuditConfig:
    depth: int = 2            # ideal-term depth for the default Γ
    witness_depth: int = 3    # subtractive / q / regularity term searches
    congruential_depth: int = 2
    poly_depth: int = 4
    terms: list | None = None  # T for the special-ideal audit


@dataclass
class _Ctx:
    alg: FiniteAlgebra
    cfg: AuditConfig
    cache: dict = field(default_factory=dict)

    def get(self, key, make):
        if key not in self.cache:
            self.cache[key] = make()
        return self.cache[key]

    @property
    def con(self):
        return self.get("con", lambda: all_congruences(self.alg))

    @property
    def gamma(self):
        return self.get("gamma", lambda: default_gamma(self.alg, self.cfg.depth))

    @property
    def s(self):
        return self.get("s", lambda: find_subtractive_witness(self.alg, self.cfg.witness_depth))

    @property
    def view(self) -> ResiduatedView | None:
        def make():
            try:
                v = ResiduatedView.of(self.alg)
            except AlgebraError:
                return None
            return v if check_residuated_axioms(self.alg).ok else None
        return self.get("view", make)

    @property
    def d(self):
        def make():
            v = self.view
            p = self.alg.point
            if v is not None and v.integral and p == v.one:
                x, y = Var("x1"), Var("y1")
                return [v.term("lres", x, y), v.term("lres", y, x)]
            if v is not None and v.is_flew and p == v.zero:
                return zero_difference_terms(v)
            return find_congruential_witness(self.alg, self.cfg.congruential_depth, 2, self.gamma, self.con)
        return self.get("d", make)


def _skip(theorem, alg, why, witness=None):
    return rep.AuditReport(theorem, rep.SKIP, alg.label(), witness, notes=[why])


def _subsets(n, cap=8):
    """All subsets for small universes, else singletons and pairs."""
    if n <= cap:
        return [frozenset(c) for k in range(n + 1) for c in itertools.combinations(range(n), k)]
    return [frozenset(c) for k in (0, 1, 2) for c in itertools.combinations(range(n), k)]


def audit_lemma1(ctx: _Ctx) -> rep.AuditReport:
    alg, gamma = ctx.alg, ctx.gamma
    lat = ideal_lattice(alg, gamma)
    parts = []
    members = set(lat.members)
    bad = next(((a, b) for a, b in itertools.combinations(lat.members, 2) if (a & b) not in members), None)
    parts.append(rep.failed("intersection-closure", alg.label(), {"I": fmt_set(bad[0]), "J": fmt_set(bad[1])})
                 if bad else rep.passed("intersection-closure", alg.label()))
    parts.append(check_lattice_axioms(lat.as_lattice(), "ideal-lattice-axioms", alg.label()))
    for X in _subsets(alg.size):
        one, fix = one_step_ideal(alg, gamma, X), generate_ideal(alg, gamma, X)
        if one != fix:
            parts.append(rep.failed("one-step", alg.label(), {"X": fmt_set(X), "one_step": fmt_set(one),
                                                              "fixpoint": fmt_set(fix)}))
            break
    else:
        parts.append(rep.passed("one-step", alg.label()))
    parts.append(check_point_classes_are_ideals(alg, gamma, ctx.con))
    out = rep.combine("lemma1", alg.label(), parts,
                      notes=[f"Gamma = ideal terms to depth {ctx.cfg.depth} ({len(gamma)} terms)"])
    out.details["ideals"] = [fmt_set(m) for m in lat.members]
    return out


def audit_thm2(ctx: _Ctx) -> rep.AuditReport:
    if ctx.s is None:
        return _skip("thm2", ctx.alg, f"no subtractive term within depth {ctx.cfg.witness_depth}")
    r = check_subtractive_equivalents(ctx.alg, ctx.s, ctx.gamma, ctx.con)
    r.theorem = "thm2"
    r.witness = dict(r.witness or {}, s=str(ctx.s))
    return r


def audit_cormain(ctx: _Ctx) -> rep.AuditReport:
    alg = ctx.alg
    if ctx.s is None:
        reg = check_zero_regular(alg, ctx.con)
        note = f"no subtractive term within depth {ctx.cfg.witness_depth}"
        if not reg.ok:
            note += "; point-regularity fails"
        return _skip("cormain", alg, note, reg.witness)
    lat = ideal_lattice(alg, ctx.gamma)
    parts = [check_modularity(lat.as_lattice(), "ideal-modularity", alg.label()),
             check_normal_ideals(alg, ctx.gamma, ctx.con),
             check_point_classes_are_ideals(alg, ctx.gamma, ctx.con)]
    out = rep.combine("cormain", alg.label(), parts)
    out.witness = dict(out.witness or {}, s=str(ctx.s))
    return out


def audit_maincon(ctx: _Ctx) -> rep.AuditReport:
    alg = ctx.alg
    d = ctx.d
    if not d:
        return _skip("maincon", alg, f"no congruential witness within depth {ctx.cfg.congruential_depth}, n <= 2")
    parts = [check_congruential_witness(alg, d, ctx.gamma, ctx.con),
             check_epsilon_chains(alg, ctx.gamma, ctx.con),
             check_interval_convexity(alg, ctx.gamma, ctx.con)]
    q = find_maincon_q(alg, d, ctx.cfg.witness_depth)
    notes = ["r terms not searched; their only well-formed scheme is checked when supplied"]
    if q is None:
        notes.append(f"no q within depth {ctx.cfg.witness_depth}; term condition not checked")
    else:
        parts.append(check_maincon3(alg, d, q))
    out = rep.combine("maincon", alg.label(), parts, notes=notes)
    out.witness = dict(out.witness or {}, d=[str(t) for t in d], q=str(q) if q is not None else None)
    return out


def audit_gummursini(ctx: _Ctx) -> rep.AuditReport:
    """Subtractive and point-regular iff subtractive with regularity terms d."""
    alg = ctx.alg
    subtractive = ctx.s is not None
    regular = check_zero_regular(alg, ctx.con)
    d = find_regularity_terms(alg, ctx.cfg.witness_depth, 2)
    pt = App(alg.signature.point)
    if d is not None:
        qi = satisfies_quasi_identity(alg, [(t, pt) for t in d], (Var("x1"), Var("y1")))
        if not qi.ok:
            return rep.failed("gummursini", alg.label(), {"reason": "regularity terms fail", **qi.witness})
    left = subtractive and regular.ok
    right = subtractive and d is not None
    witness = {"subtractive": subtractive, "point_regular": regular.ok, "d_found": d is not None}
    notes = [f"term searches bounded by depth {ctx.cfg.witness_depth}"]
    if not regular.ok:
        witness["regularity_failure"] = regular.witness
    if left != right:
        return rep.failed("gummursini", alg.label(), witness, notes=notes)
    if left:
        classes = [point_class(alg, c) for c in ctx.con]
        if set(classes) != set(ideal_lattice(alg, ctx.gamma).members):
            return rep.failed("gummursini", alg.label(), dict(witness, reason="point-class map not onto ideals"))
        witness.update(s=str(ctx.s), d=[str(t) for t in d])
    return rep.passed("gummursini", alg.label(), witness=witness, notes=notes, vacuous=alg.size == 1)


def default_t_pool(view: ResiduatedView) -> dict:
    """Named term sets: prelinearity, double negation, idempotent fuse."""
    x, y = Var("x1"), Var("y1")
    imp = lambda a, b: view.term("lres", a, b)
    zero = App(view.bindings["zero"])
    xx = view.term("fuse", x, x)
    return {
        "prelinearity": [view.term("join", imp(x, y), imp(y, x))],
        "double-negation": [imp(imp(imp(x, zero), zero), x)],
        "idempotence": [view.term("meet", imp(xx, x), imp(x, xx))],
    }


def audit_special(ctx: _Ctx) -> rep.AuditReport:
    alg = ctx.alg
    d = ctx.d
    if not d:
        return _skip("special", alg, "no congruential witness")
    v = ctx.view
    if ctx.cfg.terms:
        pools = {"terms": list(ctx.cfg.terms)}
    elif v is not None and v.is_flew and alg.point == v.one:
        pools = default_t_pool(v)
        pools["all"] = [t for ts in list(pools.values()) for t in ts]
    else:
        return _skip("special", alg, "no term set given and no default pool at this point")
    parts = []
    for name, T in pools.items():
        r = check_lemma_special(alg, d, T, gamma=ctx.gamma, con=ctx.con)
        r.theorem = f"special:{name}"
        parts.append(r)
    if v is not None and v.is_flew and alg.point == v.one and not ctx.cfg.terms:
        x = Var("x1")
        zero = App(v.bindings["zero"])
        dn = v.term("lres", v.term("lres", x, zero), zero)
        parts.append(check_t_from_axioms(alg, d, [(dn, x)], ctx.con))
    out = rep.combine("special", alg.label(), parts)
    out.witness = dict(out.witness or {}, d=[str(t) for t in d])
    return out


def _residuated_or_skip(ctx, theorem, need_commutative=False):
    v = ctx.view
    if v is None:
        return None, _skip(theorem, ctx.alg, "no valid residuated bindings")
    if need_commutative and not (v.integral and v.commutative):
        return None, _skip(theorem, ctx.alg, "needs a commutative integral view")
    return v, None


def audit_sec3(ctx: _Ctx) -> rep.AuditReport:
    v, skip = _residuated_or_skip(ctx, "sec3-iso")
    if skip is not None:
        return skip
    r = check_filter_congruence_iso(v, ctx.con)
    r.theorem = "sec3-iso"
    return r


def audit_prop35(ctx: _Ctx) -> rep.AuditReport:
    v, skip = _residuated_or_skip(ctx, "prop35", need_commutative=True)
    if skip is not None:
        return skip
    r = check_operator_filters(v, ctx.con)
    r.theorem = "prop35"
    if not v.operators:
        r.notes.append("no operators; reduct filters against congruence classes")
    return r


def audit_prop36(ctx: _Ctx) -> rep.AuditReport:
    v, skip = _residuated_or_skip(ctx, "prop36", need_commutative=True)
    if skip is not None:
        return skip
    parts = []
    for X in _subsets(v.n):
        r = audit_generation_lemma(v, X, ctx.cfg.poly_depth)
        if not r.ok:
            parts.append(r)
            break
    else:
        parts.append(rep.passed("generation-lemma", ctx.alg.label()))
    parts.append(check_filter_join(v))
    return rep.combine("prop36", ctx.alg.label(), parts, notes=[f"polynomial depth {ctx.cfg.poly_depth}"])


def audit_sec5(ctx: _Ctx) -> rep.AuditReport:
    v = ctx.view
    if v is None or not v.is_flew:
        return _skip("sec5", ctx.alg, "not an FL_ew-algebra")
    r = zero_ideal_suite(v)
    r.theorem = "sec5"
    return r


def _quasi_or_skip(ctx, theorem):
    try:
        qv = QuasiView.of(ctx.alg)
    except AlgebraError:
        return None, _skip(theorem, ctx.alg, "no quasi-FL_w bindings")
    if not check_quasi_axioms(ctx.alg).ok:
        return None, _skip(theorem, ctx.alg, "not a quasi-FL_w-algebra")
    return qv, None


def audit_sec61(ctx: _Ctx) -> rep.AuditReport:
    qv, skip = _quasi_or_skip(ctx, "sec6-1")
    if skip is not None:
        return skip
    return theorem_audit_61(qv, ctx.con, ctx.get("core", lambda: regular_core(qv)))


def audit_sec62(ctx: _Ctx) -> rep.AuditReport:
    qv, skip = _quasi_or_skip(ctx, "sec6-2")
    if skip is not None:
        return skip
    return theorem_audit_62(qv, ctx.con, ctx.get("core", lambda: regular_core(qv)))


AUDITS = {
    "lemma1": audit_lemma1, "thm2": audit_thm2, "cormain": audit_cormain, "maincon": audit_maincon,
    "gummursini": audit_gummursini, "special": audit_special, "sec3-iso": audit_sec3,
    "prop35": audit_prop35, "prop36": audit_prop36, "sec5": audit_sec5,
    "sec6-1": audit_sec61, "sec6-2": audit_sec62,
}


def resolve_theorems(name: str) -> list[str]:
    if name == "all":
        return list(THEOREMS)
    if name not in AUDITS:
        raise KeyError(f"unknown theorem id {name!r}; choose from {', '.join(THEOREMS)} or all")
    return [name]


def run_audit(theorem: str, alg: FiniteAlgebra, cfg: AuditConfig | None = None, ctx=None) -> rep.AuditReport:
    ctx = ctx or _Ctx(alg, cfg or AuditConfig())
    try:
        r = AUDITS[theorem](ctx)
    except rep.PreconditionError as exc:
        r = rep.AuditReport(theorem, rep.ERROR, alg.label(), notes=[str(exc)])
    r.algebra = alg.label()
    if alg.size == 1:
        r.vacuous = True
    return r


def run_suite(theorems, algebras, cfg: AuditConfig | None = None) -> list[rep.AuditReport]:
    """Reports in (algebra, theorem) order; point-free audits run once per algebra name."""
    cfg = cfg or AuditConfig()
    out = []
    done = set()
    for alg in algebras:
        ctx = _Ctx(alg, cfg)
        for th in theorems:
            if th in POINT_FREE:
                if (alg.name, th) in done:
                    continue
                done.add((alg.name, th))
            out.append(run_audit(th, alg, cfg, ctx))
    return out

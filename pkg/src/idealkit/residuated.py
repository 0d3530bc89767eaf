"""Residuated lattices, FL-algebras, filters and normal operators.

Roles are taken from the algebra's ``bindings``: ``join meet fuse lres rres
one`` and optionally ``zero``. ``lres`` is read as ``x\\z`` at index
``[x, z]`` and ``rres`` as ``z/y`` at index ``[z, y]``. When both roles name
the same symbol it is taken to be a commutative implication ``x -> z`` and
``z/y`` is read as ``y -> z``.

Symbols with positive arity that carry no role are the view's operators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import report as rep
from .algebra import AlgebraError, FiniteAlgebra
from .congruence import Congruence, all_congruences, is_compatible, point_class
from .ideals import (
    check_congruential_witness, check_zero_regular, subtractive_identities,
)
from .lattice import SetFamily, fmt_set
from .terms import App, Var

ROLES = ("join", "meet", "fuse", "lres", "rres", "one")


@dataclass(frozen=True, eq=False)
class ResiduatedView:
    alg: FiniteAlgebra
    bindings: dict

    @classmethod
    def of(cls, alg: FiniteAlgebra, bindings=None) -> ResiduatedView:
        b = dict(alg.bindings if bindings is None else bindings)
        missing = [r for r in ROLES if r not in b]
        if missing:
            raise AlgebraError(f"{alg.label()}: missing bindings {missing}")
        for role, sym in b.items():
            arity = alg.signature.arities.get(sym)
            want = 0 if role in ("one", "zero") else 2
            if arity != want:
                raise AlgebraError(f"binding {role}={sym!r} must name a symbol of arity {want}")
        return cls(alg, b)

    @property
    def n(self):
        return self.alg.size

    @cached_property
    def join(self):
        return self.alg.tables[self.bindings["join"]]

    @cached_property
    def meet(self):
        return self.alg.tables[self.bindings["meet"]]

    @cached_property
    def fuse(self):
        return self.alg.tables[self.bindings["fuse"]]

    @cached_property
    def lres(self):
        return self.alg.tables[self.bindings["lres"]]

    @cached_property
    def rres(self):
        if self.bindings["rres"] == self.bindings["lres"]:
            return self.lres.T
        return self.alg.tables[self.bindings["rres"]]

    @cached_property
    def one(self) -> int:
        return self.alg.constant(self.bindings["one"])

    @property
    def has_zero(self) -> bool:
        return "zero" in self.bindings

    @cached_property
    def zero(self) -> int:
        return self.alg.constant(self.bindings["zero"])

    @cached_property
    def leq(self) -> np.ndarray:
        """``leq[a, b]`` iff a <= b, read off the join."""
        return self.join == np.arange(self.n)[None, :]

    @property
    def integral(self) -> bool:
        return bool(self.leq[:, self.one].all())

    @property
    def commutative(self) -> bool:
        return bool((self.fuse == self.fuse.T).all())

    @property
    def bounded_below_by_zero(self) -> bool:
        return self.has_zero and bool(self.leq[self.zero, :].all())

    @property
    def is_flew(self) -> bool:
        return self.integral and self.commutative and self.bounded_below_by_zero

    @cached_property
    def positive(self) -> frozenset[int]:
        return frozenset(int(a) for a in np.nonzero(self.leq[self.one, :])[0])

    @cached_property
    def operators(self) -> list[str]:
        bound = set(self.bindings.values())
        return [s for s, a in self.alg.signature.symbols if a > 0 and s not in bound]

    def imp(self, a, b) -> int:
        return int(self.lres[a, b])

    def term(self, role, *args):
        return App(self.bindings[role], tuple(args))


def _first(mask):
    idx = np.argwhere(mask)
    return tuple(int(i) for i in idx[0]) if len(idx) else None


def check_residuated_axioms(alg: FiniteAlgebra, bindings=None) -> rep.AuditReport:
    """Lattice, monoid and residuation laws, with the FL flags as details."""
    name = "residuated-axioms"
    view = ResiduatedView.of(alg, bindings)
    n = view.n
    J, M, F, L, R = view.join, view.meet, view.fuse, view.lres, view.rres
    e = view.one
    i = np.arange(n)
    a, b = np.meshgrid(i, i, indexing="ij")
    a3, b3, c3 = np.meshgrid(i, i, i, indexing="ij")
    leq = view.leq
    laws = [
        ("join commutative", J != J.T, "a v b = b v a"),
        ("meet commutative", M != M.T, "a ^ b = b ^ a"),
        ("join idempotent", J[i, i] != i, "a v a = a"),
        ("meet idempotent", M[i, i] != i, "a ^ a = a"),
        ("join associative", J[J[a3, b3], c3] != J[a3, J[b3, c3]], "(a v b) v c = a v (b v c)"),
        ("meet associative", M[M[a3, b3], c3] != M[a3, M[b3, c3]], "(a ^ b) ^ c = a ^ (b ^ c)"),
        ("absorption", (J[a, M[a, b]] != a) | (M[a, J[a, b]] != a), "a v (a ^ b) = a = a ^ (a v b)"),
        ("fuse associative", F[F[a3, b3], c3] != F[a3, F[b3, c3]], "(ab)c = a(bc)"),
        ("unit", (F[i, e] != i) | (F[e, i] != i), "a1 = a = 1a"),
        ("left residuation", leq[F[a3, b3], c3] != leq[b3, L[a3, c3]], "ab <= c iff b <= a\\c"),
        ("right residuation", leq[F[a3, b3], c3] != leq[a3, R[c3, b3]], "ab <= c iff a <= c/b"),
    ]
    for law, bad, eq in laws:
        hit = _first(bad)
        if hit is not None:
            return rep.failed(name, alg.label(), {"law": law, "equation": eq,
                                                  "at": dict(zip("abc", hit))})
    flags = {
        "integral": view.integral,
        "commutative": view.commutative,
        "FL_w": view.integral and view.bounded_below_by_zero,
        "FL_e": view.has_zero and view.commutative,
        "FL_ew": view.has_zero and view.is_flew,
        "idempotent_fuse": bool((F[i, i] == i).all()),
    }
    if view.bindings["lres"] == view.bindings["rres"] and not view.commutative:
        return rep.failed(name, alg.label(), {"law": "shared residual symbol needs a commutative fuse"})
    return rep.passed(name, alg.label(), vacuous=n == 1, details={"flags": flags})


def residuated_flags(alg, bindings=None) -> dict:
    r = check_residuated_axioms(alg, bindings)
    return r.details.get("flags", {}) if r.ok else {}


# -- filters ------------------------------------------------------------------

def _is_filter_mask(view: ResiduatedView, mask: np.ndarray, normal=False) -> bool:
    if not mask[list(view.positive)].all():
        return False
    L, R, M, F = view.lres, view.rres, view.meet, view.fuse
    # a, a\b in F => b in F ; a, b/a in F => b in F
    if (mask[:, None] & mask[L] & ~mask[None, :]).any():
        return False
    if (mask[None, :] & mask[R] & ~mask[:, None]).any():
        return False
    idx = np.nonzero(mask)[0]
    if not mask[M[np.ix_(idx, idx)]].all():
        return False
    if normal:
        b = np.arange(view.n)
        for a in idx:
            if not mask[L[b, F[a, b]]].all() or not mask[R[F[b, a], b]].all():
                return False
    return True


def _subset_masks(n):
    for bits in range(1 << n):
        yield np.array([(bits >> k) & 1 for k in range(n)], dtype=bool)


def filters(view: ResiduatedView, normal=False) -> SetFamily:
    """All filters (or normal filters), by checking every subset."""
    out = [frozenset(np.nonzero(m)[0].tolist()) for m in _subset_masks(view.n)
           if _is_filter_mask(view, m, normal)]
    return SetFamily(out, range(view.n))


def normal_filters(view: ResiduatedView) -> SetFamily:
    return filters(view, normal=True)


def is_filter(view: ResiduatedView, F, normal=False) -> bool:
    mask = np.zeros(view.n, dtype=bool)
    mask[list(F)] = True
    return _is_filter_mask(view, mask, normal)


def _require_integral(view):
    if not view.integral:
        raise rep.PreconditionError(
            f"{view.alg.label()} is not integral; the filter/congruence correspondence is not provided")


def theta_from_filter(view: ResiduatedView, F) -> Congruence:
    """``{(a, b) : a\\b and b\\a in F}`` as a congruence."""
    _require_integral(view)
    F = frozenset(F)
    inside = np.zeros(view.n, dtype=bool)
    inside[list(F)] = True
    rel = inside[view.lres] & inside[view.lres.T]
    theta = Congruence.from_pairs(view.n, zip(*np.nonzero(rel)))
    back = np.array([[theta.related(a, b) for b in range(view.n)] for a in range(view.n)])
    if not (back == rel).all():
        raise ValueError(f"relation of {fmt_set(F)} is not an equivalence")
    if not is_compatible(view.alg, theta):
        raise ValueError(f"relation of {fmt_set(F)} is not compatible")
    return theta


def filter_from_theta(view: ResiduatedView, theta: Congruence) -> frozenset[int]:
    _require_integral(view)
    return point_class(view.alg, theta, view.one)


def check_filter_congruence_iso(view: ResiduatedView, con=None) -> rep.AuditReport:
    """Normal filters and congruences correspond via θ_F and the 1-class."""
    name = "filter-congruence-iso"
    label = view.alg.label()
    if not view.integral:
        return rep.AuditReport(name, rep.SKIP, label, notes=["non-integral view"])
    con = con or all_congruences(view.alg)
    nf = normal_filters(view)
    notes = ["normal filters read with conjugates b\\(ab) and (ba)/b"]
    if view.operators:
        ops = [view.alg.tables[s] for s in view.operators]
        nf = SetFamily([F for F in nf if all(_closed_under(t, F) for t in ops)], range(view.n))
        notes.append("restricted to filters closed under " + ",".join(view.operators))
    for F in nf:
        try:
            theta = theta_from_filter(view, F)
        except ValueError as exc:
            return rep.failed(name, label, {"filter": fmt_set(F), "reason": str(exc)}, notes=notes)
        if theta not in con or filter_from_theta(view, theta) != F:
            return rep.failed(name, label, {"filter": fmt_set(F), "theta": str(theta),
                                            "round_trip": fmt_set(filter_from_theta(view, theta))}, notes=notes)
    for theta in con:
        F = filter_from_theta(view, theta)
        if F not in nf:
            return rep.failed(name, label, {"theta": str(theta), "class": fmt_set(F),
                                            "reason": "class is not a normal filter"}, notes=notes)
        if theta_from_filter(view, F) != theta:
            return rep.failed(name, label, {"theta": str(theta), "reason": "theta_F differs"}, notes=notes)
    for F, G in itertools.product(nf, repeat=2):
        if (F <= G) != theta_from_filter(view, F).leq(theta_from_filter(view, G)):
            return rep.failed(name, label, {"F": fmt_set(F), "G": fmt_set(G), "reason": "order"}, notes=notes)
    if view.commutative and not view.operators and filters(view) != nf:
        return rep.failed(name, label, {"reason": "commutative view with a non-normal filter"}, notes=notes)
    return rep.passed(name, label, vacuous=view.n == 1, notes=notes,
                      details={"filters": len(nf), "congruences": len(con)})


# -- normal operators -----------------------------------------------------------

def _slices(table: np.ndarray):
    """Unary slices ``(position, params, h)`` of an operation table."""
    k = table.ndim
    n = table.shape[0] if k else 0
    for pos in range(k):
        moved = np.moveaxis(table, pos, -1)
        for params in itertools.product(range(n), repeat=k - 1):
            yield pos, params, moved[params]


def check_normal_operator(view: ResiduatedView, symbol: str) -> rep.AuditReport:
    """h(1) = 1 and h(a -> b) <= h(a) -> h(b) for every unary slice h."""
    name = f"normal-operator:{symbol}"
    label = view.alg.label()
    if not (view.integral and view.commutative):
        return rep.AuditReport(name, rep.ERROR, label, notes=["needs a commutative integral view"])
    table = view.alg.tables[symbol]
    imp, leq, one = view.lres, view.leq, view.one
    a, b = np.meshgrid(np.arange(view.n), np.arange(view.n), indexing="ij")
    for pos, params, h in _slices(table):
        where = {"position": pos + 1, "params": list(params)}
        if h[one] != one:
            return rep.failed(name, label, {**where, "law": "h(1)=1", "h(1)": int(h[one])})
        bad = ~leq[h[imp[a, b]], imp[h[a], h[b]]]
        hit = _first(bad)
        if hit is not None:
            x, y = hit
            return rep.failed(name, label, {**where, "law": "h(a->b) <= h(a)->h(b)", "a": x, "b": y,
                                            "lhs": int(h[imp[x, y]]), "rhs": int(imp[h[x], h[y]])})
        mono = leq & ~leq[h[a], h[b]]
        hit = _first(mono)
        if hit is not None:
            return rep.failed(name, label, {**where, "law": "monotone", "a": hit[0], "b": hit[1]})
    return rep.passed(name, label, vacuous=view.n == 1)


def _closed_under(table, F) -> bool:
    F = sorted(F)
    if table.ndim == 0:
        return True
    vals = table[np.ix_(*([F] * table.ndim))]
    return set(np.unique(vals).tolist()) <= set(F)


def operator_filters(view: ResiduatedView) -> SetFamily:
    """Reduct filters closed under every operator."""
    base = filters(view)
    ops = [view.alg.tables[s] for s in view.operators]
    return SetFamily([F for F in base if all(_closed_under(t, F) for t in ops)], range(view.n))


def check_operator_filters(view: ResiduatedView, con=None) -> rep.AuditReport:
    """Operator-closed reduct filters are exactly the 1-classes of congruences of the expansion."""
    name = "operator-filters"
    label = view.alg.label()
    for sym in view.operators:
        r = check_normal_operator(view, sym)
        if not r.ok:
            return rep.AuditReport(name, rep.ERROR, label, {"precondition": r.theorem, **(r.witness or {})})
    con = con or all_congruences(view.alg)
    classes = SetFamily([point_class(view.alg, c, view.one) for c in con], range(view.n))
    ofs = operator_filters(view)
    if classes != ofs:
        diff = set(ofs.members) ^ set(classes.members)
        bad = min(diff, key=lambda s: (len(s), sorted(s)))
        return rep.failed(name, label, {"set": fmt_set(bad), "operator_filter": bad in ofs,
                                        "congruence_class": bad in classes})
    return rep.passed(name, label, vacuous=view.n == 1,
                      details={"operator_filters": len(ofs), "reduct_filters": len(filters(view))})


def generate_operator_filter(view: ResiduatedView, X) -> frozenset[int]:
    """Least operator-closed filter containing ``X`` (fixpoint closure)."""
    n = view.n
    S = set(X) | set(view.positive) | {view.one}
    ops = [view.alg.tables[s] for s in view.operators]
    while True:
        new = set(S)
        new |= {int(b) for a in S for b in np.nonzero(view.leq[a])[0]}
        new |= {int(view.meet[a, b]) for a in S for b in S}
        new |= {b for a in S for b in range(n) if int(view.lres[a, b]) in S or int(view.rres[b, a]) in S}
        for t in ops:
            if t.ndim:
                idx = sorted(S)
                new |= set(np.unique(t[np.ix_(*([idx] * t.ndim))]).tolist())
        if new == S:
            return frozenset(S)
        S = new


def operator_polynomials(view: ResiduatedView, max_depth=4) -> list[tuple[int, ...]]:
    """Unary polynomials built from x with the operators only (other slots constants)."""
    n = view.n
    ident = tuple(range(n))
    found = {ident: 0}
    order = [ident]
    frontier = [ident]
    ops = [view.alg.tables[s] for s in view.operators]
    for _ in range(max_depth):
        nxt = []
        for p in frontier:
            parr = np.asarray(p)
            for table in ops:
                for pos, params, h in _slices(table):
                    q = tuple(int(v) for v in h[parr])
                    if q not in found:
                        found[q] = 1
                        order.append(q)
                        nxt.append(q)
        frontier = nxt
        if not frontier:
            break
    return order


def polynomial_filter(view: ResiduatedView, X, max_depth=4) -> frozenset[int]:
    """Elements above some product of (p(b) ^ 1) with b in X and p a polynomial."""
    polys = operator_polynomials(view, max_depth)
    base = {int(view.meet[p[b], view.one]) for p in polys for b in X}
    prods = {view.one}
    while True:
        nxt = prods | {int(view.fuse[a, b]) for a in prods for b in base}
        if nxt == prods:
            break
        prods = nxt
    return frozenset(c for c in range(view.n) if any(view.leq[w, c] for w in prods))


def audit_generation_lemma(view: ResiduatedView, X, poly_depth=4) -> rep.AuditReport:
    name = "generation-lemma"
    label = view.alg.label()
    fix = generate_operator_filter(view, X)
    poly = polynomial_filter(view, X, poly_depth)
    if not poly <= fix:
        return rep.failed(name, label, {"X": fmt_set(X), "unsound": fmt_set(poly - fix)})
    if poly != fix:
        return rep.failed(name, label, {"X": fmt_set(X), "fixpoint": fmt_set(fix), "polynomial": fmt_set(poly),
                                        "poly_depth": poly_depth})
    return rep.passed(name, label, vacuous=view.n == 1)


def filter_join(view: ResiduatedView, F, G) -> frozenset[int]:
    """``{c : ab <= c for some a in F, b in G}``."""
    prods = {int(view.fuse[a, b]) for a in F for b in G}
    return frozenset(c for c in range(view.n) if any(view.leq[w, c] for w in prods))


def check_filter_join(view: ResiduatedView) -> rep.AuditReport:
    name = "filter-join"
    label = view.alg.label()
    fam = operator_filters(view) if view.operators else filters(view)
    for F, G in itertools.product(fam, repeat=2):
        formula = filter_join(view, F, G)
        lattice = fam.join(F, G)
        if formula != lattice:
            return rep.failed(name, label, {"F": fmt_set(F), "G": fmt_set(G), "formula": fmt_set(formula),
                                            "lattice_join": fmt_set(lattice) if lattice is not None else None})
    return rep.passed(name, label, vacuous=view.n == 1)


# -- ideals at zero ----------------------------------------------------------------

def zero_subtractive_term(view: ResiduatedView):
    """``(y -> 0) x``"""
    zero = App(view.bindings["zero"])
    return view.term("fuse", view.term("lres", Var("y1"), zero), Var("x1"))


def zero_difference_terms(view: ResiduatedView):
    """``(x -> 0) y`` and ``(y -> 0) x``."""
    zero = App(view.bindings["zero"])
    x, y = Var("x1"), Var("y1")
    return [view.term("fuse", view.term("lres", x, zero), y),
            view.term("fuse", view.term("lres", y, zero), x)]


def zero_ideal_suite(view: ResiduatedView, gamma=None) -> rep.AuditReport:
    """Subtractivity at 0, the upper-congruence formula at 0, and 0-regularity findings."""
    name = "zero-ideals"
    label = view.alg.label()
    if not view.is_flew:
        return rep.AuditReport(name, rep.ERROR, label, notes=["needs an FL_ew view"])
    if view.operators:
        return rep.AuditReport(name, rep.SKIP, label, notes=["operators present; stated for plain FL_ew"])
    alg0 = view.alg.with_point(view.bindings["zero"])
    s = zero_subtractive_term(view)
    d = zero_difference_terms(view)
    con = all_congruences(alg0)
    parts = [subtractive_identities(alg0, s), check_congruential_witness(alg0, d, gamma, con)]
    out = rep.combine(name, alg0.label(), parts)
    out.witness = dict(out.witness or {}, s=str(s), d=[str(t) for t in d])
    regular = check_zero_regular(alg0, con)
    out.details["point_regular"] = regular.ok
    if not regular.ok:
        out.details["regularity_failure"] = regular.witness
        out.notes.append("not 0-regular: {theta} and {phi} share 0-class {point_class}".format(**regular.witness))
    out.vacuous = view.n == 1
    return out

"""Quasi-FL_w-algebras: q-lattices with a residuated q-monoid.

The quasiorder is ``a <= b`` iff ``a v b = b v b``. Read literally the defining
display gives the converse relation, under which 0 could not be the bottom of
any FL_w-algebra; see the ledger.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import report as rep
from .algebra import AlgebraError, FiniteAlgebra, make_algebra
from .congruence import Congruence, all_congruences, point_class, quotient
from .lattice import SetFamily, fmt_set
from .residuated import ResiduatedView, check_residuated_axioms, normal_filters

QUASI_BINDINGS = {
    "join": "join", "meet": "meet", "fuse": "mul",
    "lres": "ldiv", "rres": "rdiv", "one": "c1", "zero": "c0",
}
ROLES = ("join", "meet", "fuse", "lres", "rres", "one", "zero")
DEFAULT_SEED = 20240611
MAX_EXHAUSTIVE = 3


@dataclass(frozen=True, eq=False)
class QuasiView:
    alg: FiniteAlgebra
    bindings: dict

    @classmethod
    def of(cls, alg: FiniteAlgebra, bindings=None) -> QuasiView:
        b = dict(alg.bindings if bindings is None else bindings)
        missing = [r for r in ROLES if r not in b]
        if missing:
            raise AlgebraError(f"{alg.label()}: missing bindings {missing}")
        return cls(alg, b)

    @property
    def n(self):
        return self.alg.size

    def _t(self, role):
        return self.alg.tables[self.bindings[role]]

    @cached_property
    def join(self):
        return self._t("join")

    @cached_property
    def meet(self):
        return self._t("meet")

    @cached_property
    def fuse(self):
        return self._t("fuse")

    @cached_property
    def lres(self):
        return self._t("lres")

    @cached_property
    def rres(self):
        if self.bindings["rres"] == self.bindings["lres"]:
            return self.lres.T
        return self._t("rres")

    @cached_property
    def one(self) -> int:
        return self.alg.constant(self.bindings["one"])

    @cached_property
    def zero(self) -> int:
        return self.alg.constant(self.bindings["zero"])

    @cached_property
    def leq(self) -> np.ndarray:
        J = self.join
        return J == np.diag(J)[None, :]

    @cached_property
    def reg(self) -> np.ndarray:
        """``a . 1`` for each a."""
        return self.fuse[:, self.one]

    @cached_property
    def regular(self) -> tuple[int, ...]:
        return tuple(int(a) for a in range(self.n) if self.reg[a] == a)

    def up(self, S) -> frozenset[int]:
        S = list(S)
        if not S:
            return frozenset()
        return frozenset(int(b) for b in np.nonzero(self.leq[S].any(axis=0))[0])


def _first(mask):
    idx = np.argwhere(mask)
    return tuple(int(i) for i in idx[0]) if len(idx) else None


def quasi_laws(view: QuasiView):
    """``(law, violation mask, equation)`` for every defining condition."""
    n = view.n
    J, M, F, L, R = view.join, view.meet, view.fuse, view.lres, view.rres
    e, z = view.one, view.zero
    leq = view.leq
    i = np.arange(n)
    a, b = np.meshgrid(i, i, indexing="ij")
    a3, b3, c3 = np.meshgrid(i, i, i, indexing="ij")
    dJ, dM = J[i, i], M[i, i]
    return [
        ("join commutative", J != J.T, "a v b = b v a"),
        ("meet commutative", M != M.T, "a ^ b = b ^ a"),
        ("join associative", J[J[a3, b3], c3] != J[a3, J[b3, c3]], "(a v b) v c = a v (b v c)"),
        ("meet associative", M[M[a3, b3], c3] != M[a3, M[b3, c3]], "(a ^ b) ^ c = a ^ (b ^ c)"),
        ("q-lattice 1", (J[a, M[b, a]] != dJ[a]) | (dJ[a] != dM[a]) | (dM[a] != M[a, J[b, a]]),
         "a v (b ^ a) = a v a = a ^ a = a ^ (b v a)"),
        ("q-lattice 2", (J[a, b] != J[a, dJ[b]]) | (M[a, b] != M[a, dM[b]]),
         "a v b = a v (b v b), a ^ b = a ^ (b ^ b)"),
        ("bounds", ~leq[z, i] | ~leq[i, e], "0 <= a <= 1"),
        ("fuse associative", F[F[a3, b3], c3] != F[a3, F[b3, c3]], "(ab)c = a(bc)"),
        ("q-monoid 1", F[i, e] != F[e, i], "a1 = 1a"),
        ("q-monoid 2", F[F[a, b], e] != F[a, b], "ab1 = ab"),
        ("q-monoid 3", np.array([F[e, e] != e]), "11 = 1"),
        ("left residuation", leq[F[a3, b3], c3] != leq[b3, L[a3, c3]], "ab <= c iff b <= a\\c"),
        ("right residuation", leq[F[a3, b3], c3] != leq[a3, R[c3, b3]], "ab <= c iff a <= c/b"),
        ("zero meet", np.array([M[z, z] != z]), "0 ^ 0 = 0"),
        ("unit meet", F[i, e] != dM, "a1 = a ^ a"),
        ("regular residuals", (F[L[b, a], e] != L[b, a]) | (F[R[a, b], e] != R[a, b]),
         "(b\\a)1 = b\\a, (a/b)1 = a/b"),
    ]


def check_quasi_axioms(alg: FiniteAlgebra, bindings=None) -> rep.AuditReport:
    name = "quasi-axioms"
    view = QuasiView.of(alg, bindings)
    for law, bad, eq in quasi_laws(view):
        hit = _first(bad)
        if hit is not None:
            return rep.failed(name, alg.label(), {"law": law, "equation": eq,
                                                  "at": dict(zip("abc", hit))})
    return rep.passed(name, alg.label(), vacuous=view.n == 1,
                      details={"regular": list(view.regular)})


def is_quasi_model(alg, bindings=None) -> bool:
    return check_quasi_axioms(alg, bindings).ok


# -- regular elements -----------------------------------------------------------

@dataclass
class RegularCore:
    elements: tuple[int, ...]
    algebra: FiniteAlgebra
    report: rep.AuditReport

    def embed(self, i: int) -> int:
        return self.elements[i]

    def index(self, a: int) -> int:
        return self.elements.index(a)


def _subalgebra(alg: FiniteAlgebra, elements) -> FiniteAlgebra | None:
    elements = list(elements)
    pos = {a: i for i, a in enumerate(elements)}
    ops = {}
    for sym, arity, table in alg.operations():
        sub = table[np.ix_(*([elements] * arity))] if arity else table
        vals = np.unique(sub).tolist()
        if any(v not in pos for v in vals):
            return None
        ops[sym] = (arity, np.vectorize(pos.__getitem__, otypes=[np.int64])(sub) if arity else pos[int(sub)])
    return make_algebra(f"R({alg.name})", len(elements), alg.signature.point, ops, dict(alg.bindings))


def regular_core(view: QuasiView) -> RegularCore:
    """``R_A`` with its induced algebra, audited."""
    name = "regular-core"
    label = view.alg.label()
    fixed = view.regular
    images = tuple(sorted(set(int(v) for v in view.reg)))
    if fixed != images:
        r = rep.failed(name, label, {"fixed": list(fixed), "images": list(images)})
        return RegularCore(fixed, None, r)
    sub = _subalgebra(view.alg, fixed)
    if sub is None:
        r = rep.failed(name, label, {"reason": "not closed under the operations", "R": list(fixed)})
        return RegularCore(fixed, None, r)
    ax = check_residuated_axioms(sub)
    if not ax.ok:
        r = rep.failed(name, label, {"reason": "induced algebra not residuated", **(ax.witness or {})})
    elif not ax.details["flags"]["FL_w"]:
        r = rep.failed(name, label, {"reason": "induced algebra not FL_w"})
    else:
        r = rep.passed(name, label, vacuous=view.n == 1, details={"R": list(fixed)})
    return RegularCore(fixed, sub, r)


def is_regular_congruence(view: QuasiView, theta: Congruence) -> bool:
    reg = view.reg
    return all(theta.related(a, b) for a in range(view.n) for b in range(view.n)
               if theta.related(int(reg[a]), int(reg[b])))


def regular_congruences(view: QuasiView, con=None) -> list[Congruence]:
    con = con or all_congruences(view.alg)
    return [t for t in con if is_regular_congruence(view, t)]


def check_regular_sublattice(view: QuasiView, con=None) -> rep.AuditReport:
    name = "regular-sublattice"
    con = con or all_congruences(view.alg)
    rc = regular_congruences(view, con)
    members = set(rc)
    for t, u in itertools.combinations_with_replacement(rc, 2):
        for op, v in (("join", con.join(t, u)), ("meet", con.meet(t, u))):
            if v not in members:
                return rep.failed(name, view.alg.label(), {"theta": str(t), "phi": str(u), op: str(v)})
    return rep.passed(name, view.alg.label(), vacuous=view.n == 1, details={"regular": len(rc)})


def quasi_normal_filters(view: QuasiView) -> SetFamily:
    """Subsets with 1, upward closed in the quasiorder, and a\\b in F iff b/a in F."""
    n = view.n
    out = []
    L, R = view.lres, view.rres
    for bits in range(1 << n):
        mask = np.array([(bits >> k) & 1 for k in range(n)], dtype=bool)
        if not mask[view.one]:
            continue
        if (mask[:, None] & view.leq & ~mask[None, :]).any():
            continue
        # L[a, b] = a\b ; R[b, a] = b/a
        if (mask[L] != mask[R.T]).any():
            continue
        out.append(frozenset(np.nonzero(mask)[0].tolist()))
    return SetFamily(out, range(n))


def theta_of(view: QuasiView, F) -> Congruence | None:
    """``{(a, b) : a\\b, b\\a in F}`` if that is an equivalence, else None."""
    inside = np.zeros(view.n, dtype=bool)
    inside[list(F)] = True
    rel = inside[view.lres] & inside[view.lres.T]
    theta = Congruence.from_pairs(view.n, zip(*np.nonzero(rel)))
    back = np.array([[theta.related(a, b) for b in range(view.n)] for a in range(view.n)])
    return theta if (back == rel).all() else None


def _quotient_is_flw(view, theta):
    q, _ = quotient(view.alg, theta)
    r = check_residuated_axioms(q)
    return r.ok and r.details["flags"]["FL_w"]


def theorem_audit_61(view: QuasiView, con=None, core=None) -> rep.AuditReport:
    """The five conditions on θ agree for every congruence."""
    name = "sec6-1"
    label = view.alg.label()
    con = con or all_congruences(view.alg)
    core = core or regular_core(view)
    if not core.report.ok:
        return rep.AuditReport(name, rep.ERROR, label, core.report.witness)
    rview = ResiduatedView.of(core.algebra)
    core_nf = normal_filters(rview)
    R = core.elements
    rows = []
    for theta in con:
        top = point_class(view.alg, theta, view.one)
        restricted = frozenset(core.index(a) for a in top & set(R))
        items = [
            is_regular_congruence(view, theta),
            _quotient_is_flw(view, theta),
            restricted in core_nf,
            any(top == view.up(R[i] for i in G) for G in core_nf),
            theta_of(view, top) == theta,
        ]
        rows.append((theta, items))
    for theta, items in rows:
        if len(set(items)) > 1:
            return rep.failed(name, label, {"theta": str(theta), "items": dict(zip("12345", items))},
                              details={"rows": [(str(t), v) for t, v in rows]})
    return rep.passed(name, label, vacuous=view.n == 1, details={"rows": [(str(t), v) for t, v in rows]})


def _order_iso(xs, ys, f, leq_x, leq_y):
    """Whether ``f`` is a bijection xs -> ys preserving and reflecting order."""
    img = [f(x) for x in xs]
    if sorted(map(str, img)) != sorted(map(str, ys)) or len(set(map(str, img))) != len(xs):
        return False
    return all(leq_x(a, b) == leq_y(f(a), f(b)) for a in xs for b in xs)


def theorem_audit_62(view: QuasiView, con=None, core=None) -> rep.AuditReport:
    """Normal filters versus regular congruences, and the chain of isomorphisms."""
    name = "sec6-2"
    label = view.alg.label()
    notes = ["normal filters taken literally: 1, upward closure, a\\b in F iff b/a in F"]
    con = con or all_congruences(view.alg)
    core = core or regular_core(view)
    if not core.report.ok:
        return rep.AuditReport(name, rep.ERROR, label, core.report.witness)
    rc = regular_congruences(view, con)
    nf = quasi_normal_filters(view)
    classes = {point_class(view.alg, t, view.one): t for t in rc}
    for F in nf:
        if F not in classes:
            return rep.failed(name, label, {"item": 1, "filter": fmt_set(F),
                                            "reason": "normal filter is not the 1-class of a regular congruence"},
                              notes=notes)
    for F in classes:
        if F not in nf:
            return rep.failed(name, label, {"item": 1, "filter": fmt_set(F),
                                            "reason": "1-class of a regular congruence is not a normal filter"},
                              notes=notes)
    thetas = {F: theta_of(view, F) for F in nf}
    for t in rc:
        if not any(th == t for th in thetas.values()):
            return rep.failed(name, label, {"item": 2, "theta": str(t), "reason": "not of the form theta_F"},
                              notes=notes)
    for F, th in thetas.items():
        if th is None or th not in rc:
            return rep.failed(name, label, {"item": 2, "filter": fmt_set(F),
                                            "theta_F": str(th) if th else None,
                                            "reason": "theta_F is not a regular congruence"}, notes=notes)
    nfl = list(nf)
    if not _order_iso(rc, nfl, lambda t: point_class(view.alg, t, view.one),
                      lambda a, b: a.leq(b), lambda a, b: a <= b):
        return rep.failed(name, label, {"item": 3, "reason": "theta -> 1/theta is not an order isomorphism"},
                          notes=notes)
    sub = check_regular_sublattice(view, con)
    if not sub.ok:
        return rep.failed(name, label, {"item": 4, **sub.witness}, notes=notes)
    R = core.elements
    rview = ResiduatedView.of(core.algebra)
    rcon = list(all_congruences(core.algebra))
    rnf = list(normal_filters(rview))

    def restrict(t):
        return Congruence.from_pairs(len(R), [(core.index(a), core.index(b)) for a in R for b in R
                                              if t.related(a, b)])

    maps = [
        ("RCon(A) -> Con(R_A)", rc, rcon, restrict, lambda a, b: a.leq(b), lambda a, b: a.leq(b)),
        ("Con(R_A) -> NFil(R_A)", rcon, rnf, lambda t: t.block(rview.one), lambda a, b: a.leq(b),
         lambda a, b: a <= b),
        ("NFil(A) -> NFil(R_A)", nfl, rnf, lambda F: frozenset(core.index(a) for a in F if a in R),
         lambda a, b: a <= b, lambda a, b: a <= b),
    ]
    for label_map, xs, ys, f, lx, ly in maps:
        if not _order_iso(xs, ys, f, lx, ly):
            return rep.failed(name, label, {"item": 5, "map": label_map, "sizes": [len(xs), len(ys)]},
                              notes=notes)
    return rep.passed(name, label, vacuous=view.n == 1, notes=notes,
                      details={"NFil": len(nf), "RCon": len(rc), "ConR": len(rcon), "NFilR": len(rnf)})


# -- enumeration ----------------------------------------------------------------------

def _assoc_mask(tables: np.ndarray) -> np.ndarray:
    """Row mask of associative tables in a stack of shape (k, n, n)."""
    k, n, _ = tables.shape
    idx = np.arange(k)[:, None, None, None]
    i = np.arange(n)
    a, b, c = np.meshgrid(i, i, i, indexing="ij")
    ab = tables[idx, a[None], b[None]]
    lhs = tables[idx, ab, c[None]]
    bc = tables[idx, b[None], c[None]]
    rhs = tables[idx, a[None], bc]
    return (lhs == rhs).reshape(k, -1).all(axis=1)


def _all_tables(n, symmetric=False) -> np.ndarray:
    if symmetric:
        cells = [(i, j) for i in range(n) for j in range(i, n)]
    else:
        cells = [(i, j) for i in range(n) for j in range(n)]
    vals = np.array(list(itertools.product(range(n), repeat=len(cells))), dtype=np.int64).reshape(-1, len(cells))
    out = np.zeros((len(vals), n, n), dtype=np.int64)
    for c, (i, j) in enumerate(cells):
        out[:, i, j] = vals[:, c]
        out[:, j, i] = vals[:, c] if symmetric else out[:, j, i]
    return out


def _semilattice_like(n) -> np.ndarray:
    t = _all_tables(n, symmetric=True)
    return t[_assoc_mask(t)]


def _qlattice_pairs(n):
    cands = _semilattice_like(n)
    i = np.arange(n)
    a, b = np.meshgrid(i, i, indexing="ij")
    for J in cands:
        dJ = J[i, i]
        if (J[a, b] != J[a, dJ[b]]).any():
            continue
        for M in cands:
            dM = M[i, i]
            if (dJ != dM).any() or (M[a, b] != M[a, dM[b]]).any():
                continue
            if (J[a, M[b, a]] != dJ[a]).any() or (M[a, J[b, a]] != dM[a]).any():
                continue
            yield J, M


def _residual_candidates(F, leq, e, n):
    """Per-cell candidate values for both residuals, or None if some cell has none."""
    reg = F[:, e]
    ok_val = reg == np.arange(n)
    lc, rc = {}, {}
    for a in range(n):
        for c in range(n):
            want = leq[F[a, :], c]  # over b: ab <= c
            lc[a, c] = [v for v in range(n) if ok_val[v] and (leq[:, v] == want).all()]
            if not lc[a, c]:
                return None
    for c in range(n):
        for b in range(n):
            want = leq[F[:, b], c]  # over a: ab <= c
            rc[c, b] = [v for v in range(n) if ok_val[v] and (leq[:, v] == want).all()]
            if not rc[c, b]:
                return None
    return lc, rc


def _build(n, J, M, F, L, R, z, e, name) -> FiniteAlgebra:
    return make_algebra(name, n, "c1", {
        "join": (2, J), "meet": (2, M), "mul": (2, F), "ldiv": (2, L), "rdiv": (2, R),
        "c0": (0, int(z)), "c1": (0, int(e)),
    }, QUASI_BINDINGS)


def canonical_key(alg: FiniteAlgebra) -> tuple:
    """Least table encoding over all relabellings of the universe."""
    n = alg.size
    best = None
    for perm in itertools.permutations(range(n)):
        p = np.asarray(perm)
        inv = np.argsort(p)
        key = []
        for sym, arity, table in alg.operations():
            if arity == 0:
                key.append(int(p[int(table)]))
            else:
                key.extend(p[table[np.ix_(*([inv] * arity))]].ravel().tolist())
        key = tuple(key)
        if best is None or key < best:
            best = key
    return best


def relabel_canonical(alg: FiniteAlgebra, name: str) -> FiniteAlgebra:
    n = alg.size
    best = None
    for perm in itertools.permutations(range(n)):
        p = np.asarray(perm)
        inv = np.argsort(p)
        ops = {}
        key = []
        for sym, arity, table in alg.operations():
            if arity == 0:
                ops[sym] = (0, int(p[int(table)]))
                key.append(ops[sym][1])
            else:
                t = p[table[np.ix_(*([inv] * arity))]]
                ops[sym] = (arity, t)
                key.extend(t.ravel().tolist())
        if best is None or tuple(key) < best[0]:
            best = (tuple(key), ops)
    return make_algebra(name, n, alg.signature.point, best[1], dict(alg.bindings))


def _dedup(models, size):
    seen = {}
    for m in models:
        k = canonical_key(m)
        if k not in seen:
            seen[k] = m
    out = []
    for i, k in enumerate(sorted(seen)):
        out.append(relabel_canonical(seen[k], f"q{size}_{i:03d}"))
    return out


def enumerate_quasi_exhaustive(size: int) -> list[FiniteAlgebra]:
    """Every quasi-FL_w-algebra on ``size`` elements, one per isomorphism class."""
    if not 1 <= size <= MAX_EXHAUSTIVE:
        raise ValueError(f"exhaustive enumeration supports sizes 1..{MAX_EXHAUSTIVE}, got {size}")
    n = size
    i = np.arange(n)
    a, b = np.meshgrid(i, i, indexing="ij")
    fuses = _all_tables(n)
    fuses = fuses[_assoc_mask(fuses)]
    found = []
    for J, M in _qlattice_pairs(n):
        leq = J == J[i, i][None, :]
        for z, e in itertools.product(range(n), repeat=2):
            if not (leq[z, :].all() and leq[:, e].all()) or M[z, z] != z:
                continue
            reg = M[i, i]
            ok = (fuses[:, :, e] == fuses[:, e, :]).all(axis=1)
            ok &= (fuses[:, :, e] == reg[None, :]).all(axis=1)
            ok &= fuses[:, e, e] == e
            for F in fuses[ok]:
                if (F[F[a, b], e] != F[a, b]).any():
                    continue
                cands = _residual_candidates(F, leq, e, n)
                if cands is None:
                    continue
                lc, rc = cands
                lcells, rcells = sorted(lc), sorted(rc)
                for lv in itertools.product(*(lc[c] for c in lcells)):
                    L = np.zeros((n, n), dtype=np.int64)
                    for (x, y), v in zip(lcells, lv):
                        L[x, y] = v
                    for rv in itertools.product(*(rc[c] for c in rcells)):
                        R = np.zeros((n, n), dtype=np.int64)
                        for (x, y), v in zip(rcells, rv):
                            R[x, y] = v
                        alg = _build(n, J, M, F, L, R, z, e, "cand")
                        if is_quasi_model(alg):
                            found.append(alg)
    return _dedup(found, size)


def extend_core(core: FiniteAlgebra, images, name="ext") -> FiniteAlgebra:
    """Adjoin non-regular elements mapped by a·1 onto ``images`` of an FL_w core."""
    view = ResiduatedView.of(core)
    k = core.size
    r = np.array(list(range(k)) + list(images), dtype=np.int64)
    n = len(r)
    lift = lambda t: t[np.ix_(r, r)]
    return _build(n, lift(view.join), lift(view.meet), lift(view.fuse), lift(view.lres),
                  lift(view.rres).astype(np.int64), view.zero, view.one, name)


def _as_quasi_signature(alg: FiniteAlgebra) -> FiniteAlgebra:
    v = ResiduatedView.of(alg)
    return _build(alg.size, v.join, v.meet, v.fuse, v.lres, v.rres, v.zero, v.one, alg.name)


def seed_from_env(default=DEFAULT_SEED) -> int:
    raw = os.environ.get("IDEALKIT_SEED")
    return int(raw) if raw not in (None, "") else default


def sample_quasi_models(size: int, seed: int | None = None, draws=24, cores=None) -> list[FiniteAlgebra]:
    """Seeded sample of models of ``size``: FL_w cores with random non-regular extensions."""
    from . import corpus

    rng = np.random.default_rng(seed_from_env() if seed is None else seed)
    if cores is None:
        cores = []
        for k in range(1, min(size, MAX_EXHAUSTIVE) + 1):
            cores += [m for m in enumerate_quasi_exhaustive(k) if len(QuasiView.of(m).regular) == k]
        cores += [_as_quasi_signature(m) for m in (corpus.l4(), corpus.chain_flew(
            "g4", 4, min, lambda a, b: 3 if a <= b else b)) if m.size <= size]
    found = []
    for _ in range(draws):
        core = cores[int(rng.integers(len(cores)))]
        extra = size - core.size
        if extra < 0:
            continue
        images = rng.integers(core.size, size=extra).tolist()
        alg = extend_core(core, images)
        if is_quasi_model(alg):
            found.append(alg)
    return _dedup(found, size)


def enumerate_quasi_models(size: int, seed: int | None = None, draws=24) -> list[FiniteAlgebra]:
    if size <= MAX_EXHAUSTIVE:
        return enumerate_quasi_exhaustive(size)
    if size == 4:
        return sample_quasi_models(size, seed, draws)
    raise ValueError(f"size {size} exceeds the supported bound 4")


def audit_model(alg: FiniteAlgebra) -> list[rep.AuditReport]:
    view = QuasiView.of(alg)
    con = all_congruences(alg)
    core = regular_core(view)
    return [check_quasi_axioms(alg), core.report, check_regular_sublattice(view, con),
            theorem_audit_61(view, con, core), theorem_audit_62(view, con, core)]

"""Ideals of finite algebras defined by sets of ideal terms.

An ideal term is a term whose variables are split into parameters
(``x1, x2, ...``) and slots (``y1, y2, ...``, at least one). A set ``I`` is a
Γ-ideal when every term of Γ, with arbitrary parameters and slots taken from
``I``, lands back in ``I``. Ideals always contain the designated point.
"""

from __future__ import annotations

import itertools
import weakref
from dataclasses import dataclass, field
from functools import cached_property, reduce

import numpy as np

from . import report as rep
from .algebra import FiniteAlgebra
from .congruence import (
    Congruence, CongruenceLattice, all_congruences, compose_at_point, join, meet,
    point_class, quotient,
)
from .lattice import FiniteLattice, fmt_set, hasse_covers
from .terms import (
    App, Presentation, Term, TermError, TermPool, Var, eval_columns, free_vars, grid,
    load_terms, satisfies_identity, satisfies_quasi_identity, substitute, term_function,
    var_key,
)

X, Y = Var("x1"), Var("y1")

DEFAULT_DEPTH = 2
DEFAULT_NX = 1
DEFAULT_NY = 2


@dataclass(frozen=True)
class IdealTerm:
    term: Term
    x_vars: tuple[str, ...]
    y_vars: tuple[str, ...]

    def __post_init__(self):
        if not self.y_vars:
            raise TermError("an ideal term needs at least one slot variable")
        if any(not v.startswith("x") for v in self.x_vars) or any(not v.startswith("y") for v in self.y_vars):
            raise TermError("parameters must be x-variables and slots y-variables")
        extra = free_vars(self.term) - set(self.x_vars) - set(self.y_vars)
        if extra:
            raise TermError(f"free variables {sorted(extra)} not declared")

    @classmethod
    def from_term(cls, term: Term) -> IdealTerm:
        names = sorted(free_vars(term), key=var_key)
        xs = tuple(v for v in names if v.startswith("x"))
        ys = tuple(v for v in names if v.startswith("y")) or ("y1",)
        return cls(term, xs, ys)

    def __str__(self):
        return str(self.term)


class GammaSet:
    """An ordered set of ideal terms with cached evaluation tables.

    ``table(alg)`` has shape ``(len(self), n**nx, n**ny)`` over the union of
    parameter variables and slot variables of all terms.
    """

    def __init__(self, terms, label=""):
        self.terms = tuple(t if isinstance(t, IdealTerm) else IdealTerm.from_term(t) for t in terms)
        self.label = label
        xs = set().union(*(t.x_vars for t in self.terms)) if self.terms else set()
        ys = set().union(*(t.y_vars for t in self.terms)) if self.terms else {"y1"}
        self.x_vars = tuple(sorted(xs, key=var_key))
        self.y_vars = tuple(sorted(ys, key=var_key))
        self._tables = weakref.WeakKeyDictionary()

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __getitem__(self, i):
        return self.terms[i]

    @classmethod
    def from_file(cls, path) -> GammaSet:
        return cls(load_terms(path), label=str(path))

    def table(self, alg: FiniteAlgebra) -> np.ndarray:
        hit = self._tables.get(alg)
        if hit is not None:
            return hit
        n = alg.size
        names = list(self.x_vars) + list(self.y_vars)
        pts = grid(n, len(names))
        cols = {v: pts[:, i] for i, v in enumerate(names)}
        out = np.empty((len(self.terms), len(pts)), dtype=np.int64)
        for i, t in enumerate(self.terms):
            out[i] = np.broadcast_to(eval_columns(alg, t.term, cols), (len(pts),))
        out = out.reshape(len(self.terms), n ** len(self.x_vars), n ** len(self.y_vars))
        self._tables[alg] = out
        return out

    def _prime(self, alg, table):
        self._tables[alg] = table


def _slot_columns(n: int, ny: int, members) -> np.ndarray:
    ygrid = grid(n, ny)
    mask = np.zeros(n, dtype=bool)
    mask[list(members)] = True
    return np.nonzero(mask[ygrid].all(axis=1))[0]


def one_step(alg: FiniteAlgebra, gamma: GammaSet, members) -> frozenset[int]:
    """``{p(a, b) : p in Γ, a in A, b from members}``."""
    members = set(members)
    if not members or not len(gamma):
        return frozenset()
    tab = gamma.table(alg)
    cols = _slot_columns(alg.size, len(gamma.y_vars), members)
    return frozenset(np.unique(tab[:, :, cols]).tolist())


def one_step_ideal(alg: FiniteAlgebra, gamma: GammaSet, X) -> frozenset[int]:
    """The single-application generation formula, applied to ``X`` plus the point."""
    return one_step(alg, gamma, set(X) | {alg.point})


def generate_ideal(alg: FiniteAlgebra, gamma: GammaSet, X=()) -> frozenset[int]:
    """Least Γ-ideal containing ``X`` and the point, by fixpoint iteration."""
    current = frozenset(X) | {alg.point}
    if any(not 0 <= x < alg.size for x in current):
        raise ValueError(f"elements of {sorted(current)} outside universe")
    while True:
        nxt = current | one_step(alg, gamma, current)
        if nxt == current:
            return current
        current = nxt


def is_gamma_ideal(alg: FiniteAlgebra, gamma: GammaSet, members) -> rep.AuditReport:
    members = frozenset(members)
    name = "gamma-ideal"
    if alg.point not in members:
        return rep.failed(name, alg.label(), {"reason": "point not in subset", "subset": fmt_set(members)})
    if not len(gamma):
        return rep.passed(name, alg.label())
    n = alg.size
    tab = gamma.table(alg)
    cols = _slot_columns(n, len(gamma.y_vars), members)
    vals = tab[:, :, cols]
    inside = np.zeros(n, dtype=bool)
    inside[list(members)] = True
    bad = np.argwhere(~inside[vals])
    if len(bad):
        ti, xi, yi = (int(v) for v in bad[0])
        a = grid(n, len(gamma.x_vars))[xi].tolist()
        b = grid(n, len(gamma.y_vars))[cols[yi]].tolist()
        return rep.failed(name, alg.label(), {
            "term": str(gamma[ti]),
            "params": dict(zip(gamma.x_vars, a)),
            "slots": dict(zip(gamma.y_vars, b)),
            "value": int(vals[ti, xi, yi]),
            "subset": fmt_set(members),
        })
    return rep.passed(name, alg.label(), vacuous=n == 1)


class IdealLattice:
    """All Γ-ideals, sorted by size then elements."""

    def __init__(self, alg: FiniteAlgebra, gamma: GammaSet, members):
        self.alg = alg
        self.gamma = gamma
        self.members: list[frozenset[int]] = sorted(set(members), key=lambda s: (len(s), sorted(s)))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, s):
        return frozenset(s) in set(self.members)

    def join(self, a, b) -> frozenset[int]:
        return generate_ideal(self.alg, self.gamma, set(a) | set(b))

    def meet(self, a, b) -> frozenset[int]:
        return frozenset(a) & frozenset(b)

    @cached_property
    def order(self) -> np.ndarray:
        return np.array([[a <= b for b in self.members] for a in self.members], dtype=bool)

    def covers(self):
        return hasse_covers(self.order)

    def as_lattice(self) -> FiniteLattice:
        return FiniteLattice(self.order, [fmt_set(m) for m in self.members])


def ideal_lattice(alg: FiniteAlgebra, gamma: GammaSet) -> IdealLattice:
    """Id^Γ(A) as the join-closure of the principal ideals."""
    bottom = generate_ideal(alg, gamma)
    principals = []
    for a in alg.universe:
        p = generate_ideal(alg, gamma, {a})
        if p not in principals:
            principals.append(p)
    found = {bottom}
    frontier = [bottom]
    while frontier:
        nxt = []
        for s in frontier:
            for p in principals:
                if p <= s:
                    continue
                j = generate_ideal(alg, gamma, s | p)
                if j not in found:
                    found.add(j)
                    nxt.append(j)
        frontier = nxt
    return IdealLattice(alg, gamma, found)


def brute_force_ideals(alg: FiniteAlgebra, gamma: GammaSet) -> set[frozenset[int]]:
    others = [a for a in alg.universe if a != alg.point]
    out = set()
    for r in range(len(others) + 1):
        for combo in itertools.combinations(others, r):
            s = frozenset(combo) | {alg.point}
            if is_gamma_ideal(alg, gamma, s).ok:
                out.add(s)
    return out


# -- ideal terms and witnesses ----------------------------------------------

def _segments(pool: TermPool):
    mat = pool.matrix
    for g, alg in enumerate(pool.variety):
        yield alg, mat[:, pool.offsets[g]:pool.offsets[g + 1]]


def enumerate_ideal_terms(variety, n_x=DEFAULT_NX, n_y=DEFAULT_NY, max_depth=DEFAULT_DEPTH) -> GammaSet:
    """Behaviourally distinct terms with ``p(x, point, ..., point) = point`` on every generator."""
    if n_y < 1:
        raise ValueError("ideal terms need at least one slot variable")
    variety = Presentation(variety)
    xs = [f"x{i}" for i in range(1, n_x + 1)]
    ys = [f"y{i}" for i in range(1, n_y + 1)]
    pool = TermPool(variety, xs + ys).build(max_depth)
    keep = np.ones(len(pool.terms), dtype=bool)
    shaped = []
    for alg, seg in _segments(pool):
        n, p = alg.size, alg.point
        tab = seg.reshape(len(pool.terms), n ** n_x, n ** n_y)
        at_point = int(np.ravel_multi_index((p,) * n_y, (n,) * n_y)) if n_y else 0
        keep &= (tab[:, :, at_point] == p).all(axis=1)
        shaped.append((alg, tab))
    idx = np.nonzero(keep)[0]
    gamma = GammaSet([IdealTerm(pool.terms[i], tuple(xs), tuple(ys)) for i in idx],
                     label=f"ideal terms nx={n_x} ny={n_y} depth<={max_depth}")
    for alg, tab in shaped:
        gamma._prime(alg, np.ascontiguousarray(tab[idx]))
    return gamma


_GAMMA_CACHE: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def default_gamma(alg: FiniteAlgebra, max_depth=DEFAULT_DEPTH, n_x=DEFAULT_NX, n_y=DEFAULT_NY) -> GammaSet:
    """Ideal terms of the variety generated by ``alg`` (cached per algebra)."""
    per_alg = _GAMMA_CACHE.setdefault(alg, {})
    key = (max_depth, n_x, n_y)
    if key not in per_alg:
        per_alg[key] = enumerate_ideal_terms(alg, n_x, n_y, max_depth)
    return per_alg[key]


def find_subtractive_witness(variety, max_depth=3) -> Term | None:
    """First binary term ``s(x1, y1)`` with s(x,x) = point and s(x,point) = x, or None."""
    variety = Presentation(variety)
    pool = TermPool(variety, ["x1", "y1"]).build(max_depth)
    ok = np.ones(len(pool.terms), dtype=bool)
    for alg, seg in _segments(pool):
        n, p = alg.size, alg.point
        tab = seg.reshape(-1, n, n)
        diag = np.arange(n)
        ok &= (tab[:, diag, diag] == p).all(axis=1)
        ok &= (tab[:, diag, p] == diag).all(axis=1)
    hits = np.nonzero(ok)[0]
    return pool.terms[int(hits[0])] if len(hits) else None


def subtractive_identities(alg: FiniteAlgebra, s: Term) -> rep.AuditReport:
    pt = App(alg.signature.point)
    a = satisfies_identity(alg, substitute(s, {"y1": X}), pt, "s(x,x)=point")
    if not a.ok:
        return a
    return satisfies_identity(alg, substitute(s, {"y1": pt}), X, "s(x,point)=x")


# -- congruence intervals ---------------------------------------------------

@dataclass
class CongruenceInterval:
    ideal: frozenset[int]
    lower: Congruence
    upper: Congruence
    members: list[Congruence] = field(default_factory=list)
    lower_has_class: bool = True
    upper_has_class: bool = True
    convex: bool = True


def congruence_interval(alg: FiniteAlgebra, ideal, con: CongruenceLattice | None = None):
    """Meet and join of ``{θ : point/θ = ideal}``; None when that set is empty."""
    ideal = frozenset(ideal)
    con = con or all_congruences(alg)
    members = [c for c in con if point_class(alg, c) == ideal]
    if not members:
        return None
    lower = reduce(meet, members)
    upper = reduce(lambda a, b: join(alg, a, b), members)
    between = [c for c in con if lower.leq(c) and c.leq(upper)]
    return CongruenceInterval(
        ideal, lower, upper, members,
        lower_has_class=point_class(alg, lower) == ideal,
        upper_has_class=point_class(alg, upper) == ideal,
        convex=set(between) == set(members),
    )


def check_interval_convexity(alg, gamma=None, con=None) -> rep.AuditReport:
    """Every θ between I^δ and I^ε has point-class I, for every normal ideal."""
    gamma = gamma or default_gamma(alg)
    con = con or all_congruences(alg)
    name = "interval-convexity"
    for ideal in ideal_lattice(alg, gamma):
        iv = congruence_interval(alg, ideal, con)
        if iv is None:
            continue
        if not (iv.lower_has_class and iv.upper_has_class and iv.convex):
            return rep.failed(name, alg.label(), {
                "ideal": fmt_set(ideal), "lower": str(iv.lower), "upper": str(iv.upper),
                "lower_has_class": iv.lower_has_class, "upper_has_class": iv.upper_has_class,
            })
    return rep.passed(name, alg.label(), vacuous=alg.size == 1)


# -- subtractivity ----------------------------------------------------------

def check_subtractive_equivalents(alg: FiniteAlgebra, s: Term, gamma=None, con=None) -> rep.AuditReport:
    """Permutability at the point and the point-class homomorphism onto the ideals."""
    name = "subtractive-equivalents"
    pre = subtractive_identities(alg, s)
    if not pre.ok:
        return rep.AuditReport(name, rep.ERROR, alg.label(),
                               {"precondition": pre.theorem, **(pre.witness or {})},
                               notes=[f"{s} is not a subtractive term here"])
    gamma = gamma or default_gamma(alg)
    con = con or all_congruences(alg)
    ideals = ideal_lattice(alg, gamma)
    pc = {c: point_class(alg, c) for c in con}
    for a, b in itertools.product(con, repeat=2):
        j = join(alg, a, b)
        comp = compose_at_point(alg, a, b)
        if pc[j] != comp:
            return rep.failed(name, alg.label(), {
                "theta": str(a), "phi": str(b),
                "class_of_join": fmt_set(pc[j]), "class_of_composite": fmt_set(comp),
            })
        if pc[j] != ideals.join(pc[a], pc[b]):
            return rep.failed(name, alg.label(), {
                "theta": str(a), "phi": str(b), "law": "joins",
                "class_of_join": fmt_set(pc[j]), "join_of_classes": fmt_set(ideals.join(pc[a], pc[b])),
            })
        m = meet(a, b)
        if pc[m] != pc[a] & pc[b]:
            return rep.failed(name, alg.label(), {
                "theta": str(a), "phi": str(b), "law": "meets",
                "class_of_meet": fmt_set(pc[m]), "meet_of_classes": fmt_set(pc[a] & pc[b]),
            })
    image = set(pc.values())
    missing = [m for m in ideals if m not in image]
    if missing:
        return rep.failed(name, alg.label(), {"law": "onto", "ideal": fmt_set(missing[0])})
    if pc[con.bottom] != ideals.members[0] or pc[con.top] != frozenset(alg.universe):
        return rep.failed(name, alg.label(), {"law": "bounds"})
    return rep.passed(name, alg.label(), vacuous=alg.size == 1,
                      details={"witness_term": str(s), "congruences": len(con), "ideals": len(ideals)})


def check_normal_ideals(alg, gamma=None, con=None) -> rep.AuditReport:
    """Every Γ-ideal is the point-class of some congruence."""
    gamma = gamma or default_gamma(alg)
    con = con or all_congruences(alg)
    classes = {point_class(alg, c) for c in con}
    for ideal in ideal_lattice(alg, gamma):
        if ideal not in classes:
            return rep.failed("normal-ideals", alg.label(), {"ideal": fmt_set(ideal)})
    return rep.passed("normal-ideals", alg.label(), vacuous=alg.size == 1)


def check_point_classes_are_ideals(alg, gamma=None, con=None) -> rep.AuditReport:
    gamma = gamma or default_gamma(alg)
    con = con or all_congruences(alg)
    for c in con:
        r = is_gamma_ideal(alg, gamma, point_class(alg, c))
        if not r.ok:
            return rep.failed("point-classes-are-ideals", alg.label(), {"congruence": str(c), **r.witness})
    return rep.passed("point-classes-are-ideals", alg.label(), vacuous=alg.size == 1)


# -- congruential witnesses --------------------------------------------------

def _binary_tables(alg, terms):
    return [term_function(alg, t, ["x1", "y1"]) for t in terms]


def witness_relation(alg: FiniteAlgebra, d, ideal) -> set[tuple[int, int]]:
    """``{(a, b) : d_i(a, b) in ideal for every i}``."""
    inside = np.zeros(alg.size, dtype=bool)
    inside[list(ideal)] = True
    ok = np.ones((alg.size, alg.size), dtype=bool)
    for tab in _binary_tables(alg, d):
        ok &= inside[tab]
    return {(int(a), int(b)) for a, b in zip(*np.nonzero(ok))}


def _check_diagonal(alg, d, name):
    pt = App(alg.signature.point)
    for t in d:
        r = satisfies_identity(alg, substitute(t, {"y1": X}), pt, f"{t}(x,x)=point")
        if not r.ok:
            return rep.AuditReport(name, rep.ERROR, alg.label(), {"precondition": r.theorem, **r.witness})
    return None


def check_congruential_witness(alg: FiniteAlgebra, d, gamma=None, con=None) -> rep.AuditReport:
    """For each normal ideal I, the d-relation of I equals I^ε."""
    name = "congruential-witness"
    d = list(d)
    err = _check_diagonal(alg, d, name)
    if err is not None:
        return err
    gamma = gamma or default_gamma(alg)
    con = con or all_congruences(alg)
    checked = 0
    for ideal in ideal_lattice(alg, gamma):
        iv = congruence_interval(alg, ideal, con)
        if iv is None:
            continue
        checked += 1
        formula = witness_relation(alg, d, ideal)
        upper = iv.upper.pairs()
        if formula != upper:
            pair = min(formula ^ upper)
            return rep.failed(name, alg.label(), {
                "ideal": fmt_set(ideal), "pair": list(pair),
                "in_formula": pair in formula, "in_upper": pair in upper,
                "values": [int(tab[pair]) for tab in _binary_tables(alg, d)],
            })
    return rep.passed(name, alg.label(), vacuous=alg.size == 1,
                      details={"d": [str(t) for t in d], "ideals_checked": checked})


def check_epsilon_chains(alg: FiniteAlgebra, gamma=None, con=None) -> rep.AuditReport:
    """Upper-congruence map commutes with unions of chains (pairwise comparable ideals)."""
    name = "epsilon-chains"
    gamma = gamma or default_gamma(alg)
    con = con or all_congruences(alg)
    ideals = ideal_lattice(alg, gamma)
    eps = {}
    for ideal in ideals:
        iv = congruence_interval(alg, ideal, con)
        if iv is not None:
            eps[ideal] = iv.upper.pairs()
    non_directed = 0
    for a, b in itertools.combinations(eps, 2):
        union = a | b
        if a <= b or b <= a:
            big = max(a, b, key=len)
            if eps[a] | eps[b] != eps[big]:
                return rep.failed(name, alg.label(), {"smaller": fmt_set(min(a, b, key=len)), "larger": fmt_set(big)})
        else:
            j = ideals.join(a, b)
            if j in eps and eps[a] | eps[b] != eps[j]:
                non_directed += 1
    notes = ["family unions are read as directed unions; only chains are audited"]
    if non_directed:
        notes.append(f"{non_directed} incomparable pair(s) where the plain union differs")
    return rep.passed(name, alg.label(), vacuous=alg.size == 1, notes=notes)


def _positional(term_vars_count, mapping_values):
    return {f"x{i + 1}": v for i, v in enumerate(mapping_values[:term_vars_count])}


def check_maincon3(alg: FiniteAlgebra, d, q: Term, r=None) -> rep.AuditReport:
    """The four well-formed equation schemes of the term condition.

    ``q`` uses the positional variables ``x1..x(n+3)``; each ``r[(f, i)]``
    (i counted from 1) uses ``x1..x((2+n)k)`` for a k-ary symbol f.
    """
    name = "maincon-terms"
    d = list(d)
    n = len(d)
    pt = App(alg.signature.point)
    qvars = {v for v in free_vars(q)}
    allowed = {f"x{i}" for i in range(1, n + 4)}
    if not qvars <= allowed:
        return rep.AuditReport(name, rep.ERROR, alg.label(),
                               {"arity": f"q must use x1..x{n + 3}", "found": sorted(qvars, key=var_key)})
    parts = []
    for t in d:
        parts.append(satisfies_identity(alg, substitute(t, {"y1": X}), pt, f"d:{t}(x,x)=point"))
    q_zero = substitute(q, _positional(n + 3, [X, Y] + [pt] * (n + 1)))
    parts.append(satisfies_identity(alg, q_zero, pt, "q(x,y,0,...,0)=point"))
    q_rec = substitute(q, _positional(n + 3, [X, Y, Y] + d))
    parts.append(satisfies_identity(alg, q_rec, X, "q(x,y,y,d(x,y))=x"))
    arities = alg.signature.arities
    for (sym, i), term in sorted((r or {}).items()):
        k = arities.get(sym)
        if k is None or not 1 <= i <= n:
            return rep.AuditReport(name, rep.ERROR, alg.label(), {"arity": f"bad r index ({sym},{i})"})
        total = (2 + n) * k
        if not free_vars(term) <= {f"x{j}" for j in range(1, total + 1)}:
            return rep.AuditReport(name, rep.ERROR, alg.label(), {"arity": f"r[{sym},{i}] must use x1..x{total}"})
        values = [Var(f"x{j}") for j in range(1, k + 1)] + [Var(f"y{j}") for j in range(1, k + 1)]
        values += [pt] * (n * k)
        parts.append(satisfies_identity(alg, substitute(term, _positional(total, values)), pt,
                                        f"r[{sym},{i}](x,y,0,...,0)=point"))
    out = rep.combine(name, alg.label(), parts,
                      notes=["fifth scheme has no right-hand side in its source; not checked"])
    out.vacuous = alg.size == 1
    return out


def find_maincon_q(alg: FiniteAlgebra, d, max_depth=3) -> Term | None:
    """Bounded search for q; behaviour is compared only on the points the two q-equations use."""
    d = list(d)
    n = alg.size
    k = len(d) + 3
    dt = _binary_tables(alg, d)
    pts = []
    for a, b in itertools.product(range(n), repeat=2):
        pts.append([a, b] + [alg.point] * (k - 2))
    for a, b in itertools.product(range(n), repeat=2):
        pts.append([a, b, b] + [int(t[a, b]) for t in dt])
    pts = np.asarray(pts, dtype=np.int64)
    target = np.concatenate([np.full(n * n, alg.point), pts[n * n:, 0]])
    pool = TermPool(alg, [f"x{i}" for i in range(1, k + 1)], points=[pts]).build(max_depth)
    hits = np.nonzero((pool.matrix == target).all(axis=1))[0]
    return pool.terms[int(hits[0])] if len(hits) else None


# -- regularity ------------------------------------------------------------

def check_zero_regular(alg: FiniteAlgebra, con=None) -> rep.AuditReport:
    """Distinct congruences have distinct point-classes."""
    con = con or all_congruences(alg)
    seen = {}
    for c in con:
        pc = point_class(alg, c)
        if pc in seen:
            return rep.failed("point-regular", alg.label(), {
                "theta": str(seen[pc]), "phi": str(c), "point_class": fmt_set(pc),
            })
        seen[pc] = c
    return rep.passed("point-regular", alg.label(), vacuous=alg.size == 1)


def find_regularity_terms(alg: FiniteAlgebra, max_depth=3, max_n=2):
    """Smallest tuple of binary terms with d(x,x)=point whose joint zero set is the diagonal."""
    n, p = alg.size, alg.point
    pool = TermPool(alg, ["x1", "y1"]).build(max_depth)
    tab = pool.matrix.reshape(-1, n, n)
    diag = np.arange(n)
    cand = np.nonzero((tab[:, diag, diag] == p).all(axis=1))[0]
    zero_sets = {}
    for i in cand:
        z = (tab[i] == p).tobytes()
        zero_sets.setdefault(z, int(i))
    reps = sorted(zero_sets.values())
    zs = [tab[i] == p for i in reps]
    eye = np.eye(n, dtype=bool)
    for size in range(1, max_n + 1):
        for combo in itertools.combinations(range(len(reps)), size):
            acc = reduce(np.logical_and, (zs[c] for c in combo))
            if (acc == eye).all():
                return [pool.terms[reps[c]] for c in combo]
    return None


def check_ideal_determined(alg: FiniteAlgebra, max_depth=3, max_n=2, gamma=None, con=None) -> rep.AuditReport:
    name = "ideal-determined"
    s = find_subtractive_witness(alg, max_depth)
    if s is None:
        return rep.failed(name, alg.label(), {"reason": f"no subtractive term within depth {max_depth}"},
                          vacuous=alg.size == 1)
    d = find_regularity_terms(alg, max_depth, max_n)
    if d is None:
        return rep.failed(name, alg.label(), {
            "reason": f"no regularity terms within depth {max_depth} and n <= {max_n}",
            "s": str(s),
        })
    pt = App(alg.signature.point)
    qi = satisfies_quasi_identity(alg, [(t, pt) for t in d], (X, Y))
    if not qi.ok:
        return rep.failed(name, alg.label(), {"reason": "quasi-identity", **qi.witness})
    gamma = gamma or default_gamma(alg)
    con = con or all_congruences(alg)
    classes = [point_class(alg, c) for c in con]
    ideals = ideal_lattice(alg, gamma).members
    bijective = len(set(classes)) == len(classes) and set(classes) == set(ideals)
    if not bijective:
        return rep.failed(name, alg.label(), {"reason": "point-class map is not a bijection onto ideals",
                                              "s": str(s), "d": [str(t) for t in d]})
    return rep.passed(name, alg.label(), vacuous=alg.size == 1,
                      witness={"s": str(s), "d": [str(t) for t in d]})


# -- special ideals ----------------------------------------------------------

def is_t_special(alg: FiniteAlgebra, ideal, T) -> rep.AuditReport:
    ideal = frozenset(ideal)
    inside = np.zeros(alg.size, dtype=bool)
    inside[list(ideal)] = True
    for t in T:
        names = sorted(free_vars(t), key=var_key)
        vals = np.broadcast_to(term_function(alg, t, names), (alg.size,) * len(names))
        bad = np.argwhere(~inside[vals])
        if len(bad):
            a = [int(v) for v in bad[0]]
            return rep.failed("t-special", alg.label(), {
                "term": str(t), "assignment": dict(zip(names, a)),
                "value": int(vals[tuple(a)]), "ideal": fmt_set(ideal),
            })
    return rep.passed("t-special", alg.label(), vacuous=alg.size == 1)


def quotient_satisfies(alg: FiniteAlgebra, theta: Congruence, T) -> rep.AuditReport:
    q, _ = quotient(alg, theta)
    pt = App(alg.signature.point)
    for t in T:
        r = satisfies_identity(q, t, pt, f"{t}=point")
        if not r.ok:
            return r
    return rep.passed("quotient-satisfies", q.label())


def check_lemma_special(alg: FiniteAlgebra, d, T, ideal=None, gamma=None, con=None) -> rep.AuditReport:
    """T-special ideals are exactly those whose largest congruence lands in the T-subvariety."""
    name = "special"
    T = list(T)
    gamma = gamma or default_gamma(alg)
    con = con or all_congruences(alg)
    pre = check_congruential_witness(alg, d, gamma, con)
    if not pre.ok:
        return rep.AuditReport(name, rep.ERROR, alg.label(),
                               {"precondition": "congruential witness", **(pre.witness or {})})
    targets = [frozenset(ideal)] if ideal is not None else ideal_lattice(alg, gamma).members
    rows = []
    for I in targets:
        iv = congruence_interval(alg, I, con)
        if iv is None:
            return rep.AuditReport(name, rep.ERROR, alg.label(), {"not_normal": fmt_set(I)})
        left = is_t_special(alg, I, T)
        right = quotient_satisfies(alg, iv.upper, T)
        rows.append((fmt_set(I), left.ok, right.ok))
        if left.ok != right.ok:
            return rep.failed(name, alg.label(), {
                "ideal": fmt_set(I), "t_special": left.ok, "quotient_in_subvariety": right.ok,
                "detail": (left.witness or right.witness),
            })
    return rep.passed(name, alg.label(), vacuous=alg.size == 1 or not T, details={"rows": rows})


def t_from_axioms(d, equations) -> list[Term]:
    """``[d_i(p, q) for each p = q, for each i]`` with duplicates removed."""
    out = []
    for p, q in equations:
        for t in d:
            made = substitute(t, {"x1": p, "y1": q})
            if made not in out:
                out.append(made)
    return out


def check_t_from_axioms(alg: FiniteAlgebra, d, equations, con=None) -> rep.AuditReport:
    """On ``alg`` and each of its quotients: T holds (= point) iff the equations hold.

    Only algebras satisfying the d-quasi-identity are judged; others are noted.
    """
    name = "t-from-axioms"
    d = list(d)
    T = t_from_axioms(d, equations)
    pt = App(alg.signature.point)
    con = con or all_congruences(alg)
    skipped = 0
    for theta in con:
        q, _ = quotient(alg, theta)
        if not satisfies_quasi_identity(q, [(t, pt) for t in d], (X, Y)).ok:
            skipped += 1
            continue
        t_holds = all(satisfies_identity(q, t, pt).ok for t in T)
        j_holds = all(satisfies_identity(q, p, r).ok for p, r in equations)
        if t_holds != j_holds:
            return rep.failed(name, alg.label(), {"quotient_by": str(theta), "T_holds": t_holds, "J_holds": j_holds})
    notes = [f"{skipped} quotient(s) outside the d-regular hypothesis"] if skipped else []
    return rep.passed(name, alg.label(), vacuous=alg.size == 1, notes=notes,
                      details={"T": [str(t) for t in T]})


def find_congruential_witness(alg: FiniteAlgebra, max_depth=2, max_n=2, gamma=None, con=None):
    """First tuple (by size, then enumeration order) of binary terms that is a congruential witness."""
    n, p = alg.size, alg.point
    gamma = gamma or default_gamma(alg)
    con = con or all_congruences(alg)
    targets = []
    for ideal in ideal_lattice(alg, gamma):
        iv = congruence_interval(alg, ideal, con)
        if iv is not None:
            upper = np.zeros((n, n), dtype=bool)
            for a, b in iv.upper.pairs():
                upper[a, b] = True
            inside = np.zeros(n, dtype=bool)
            inside[list(ideal)] = True
            targets.append((inside, upper))
    pool = TermPool(alg, ["x1", "y1"]).build(max_depth)
    tab = pool.matrix.reshape(-1, n, n)
    diag = np.arange(n)
    cand = [int(i) for i in np.nonzero((tab[:, diag, diag] == p).all(axis=1))[0]]
    masks = {i: [inside[tab[i]] for inside, _ in targets] for i in cand}
    for size in range(1, max_n + 1):
        for combo in itertools.combinations(cand, size):
            if all((reduce(np.logical_and, (masks[c][k] for c in combo)) == upper).all()
                   for k, (_, upper) in enumerate(targets)):
                return [pool.terms[c] for c in combo]
    return None

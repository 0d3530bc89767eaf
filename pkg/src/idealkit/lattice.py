"""Finite lattices given by their order relation."""

from __future__ import annotations

import itertools

import numpy as np

from . import report as rep


class LatticeError(ValueError):
    pass


class FiniteLattice:
    """Elements ``0..m-1`` with ``leq[i, j]`` meaning i <= j."""

    def __init__(self, leq, labels=None):
        self.leq = np.asarray(leq, dtype=bool)
        m = len(self.leq)
        self.labels = list(labels) if labels is not None else [str(i) for i in range(m)]
        self.join_table = np.empty((m, m), dtype=np.int64)
        self.meet_table = np.empty((m, m), dtype=np.int64)
        for i, j in itertools.product(range(m), repeat=2):
            self.join_table[i, j] = self._extremum(self.leq[i] & self.leq[j], least=True, pair=(i, j))
            self.meet_table[i, j] = self._extremum(self.leq[:, i] & self.leq[:, j], least=False, pair=(i, j))

    def _extremum(self, mask, least, pair):
        cands = np.nonzero(mask)[0]
        for c in cands:
            if least and all(self.leq[c, d] for d in cands):
                return c
            if not least and all(self.leq[d, c] for d in cands):
                return c
        kind = "join" if least else "meet"
        raise LatticeError(f"no {kind} for {self.labels[pair[0]]}, {self.labels[pair[1]]}")

    def __len__(self):
        return len(self.leq)

    def join(self, i, j) -> int:
        return int(self.join_table[i, j])

    def meet(self, i, j) -> int:
        return int(self.meet_table[i, j])

    @classmethod
    def from_sets(cls, members, labels=None):
        members = list(members)
        leq = [[a <= b for b in members] for a in members]
        return cls(leq, labels or [fmt_set(a) for a in members])


def fmt_set(s) -> str:
    return "{" + ",".join(str(x) for x in sorted(s)) + "}"


def pentagon() -> FiniteLattice:
    """N5: 0 < a < c < 1, 0 < b < 1, b incomparable to a and c."""
    names = ["0", "a", "b", "c", "1"]
    below = {("0", x) for x in names} | {(x, "1") for x in names} | {(x, x) for x in names} | {("a", "c")}
    leq = [[(p, q) in below for q in names] for p in names]
    return FiniteLattice(leq, names)


def check_modularity(lat: FiniteLattice, theorem="modularity", algebra="") -> rep.AuditReport:
    """x <= z implies x v (y ^ z) = (x v y) ^ z, over all triples."""
    m = len(lat)
    for x, y, z in itertools.product(range(m), repeat=3):
        if not lat.leq[x, z]:
            continue
        lhs = lat.join(x, lat.meet(y, z))
        rhs = lat.meet(lat.join(x, y), z)
        if lhs != rhs:
            return rep.failed(theorem, algebra, {
                "x": lat.labels[x], "y": lat.labels[y], "z": lat.labels[z],
                "x v (y ^ z)": lat.labels[lhs], "(x v y) ^ z": lat.labels[rhs],
            })
    return rep.passed(theorem, algebra, vacuous=m == 1)


def check_lattice_axioms(lat: FiniteLattice, theorem="lattice-axioms", algebra="") -> rep.AuditReport:
    m = len(lat)
    J, M = lat.join, lat.meet
    for a, b in itertools.product(range(m), repeat=2):
        if J(a, b) != J(b, a) or M(a, b) != M(b, a):
            return rep.failed(theorem, algebra, {"law": "commutativity", "a": a, "b": b})
        if J(a, M(a, b)) != a or M(a, J(a, b)) != a:
            return rep.failed(theorem, algebra, {"law": "absorption", "a": a, "b": b})
    for a in range(m):
        if J(a, a) != a or M(a, a) != a:
            return rep.failed(theorem, algebra, {"law": "idempotence", "a": a})
    for a, b, c in itertools.product(range(m), repeat=3):
        if J(a, J(b, c)) != J(J(a, b), c) or M(a, M(b, c)) != M(M(a, b), c):
            return rep.failed(theorem, algebra, {"law": "associativity", "a": a, "b": b, "c": c})
    return rep.passed(theorem, algebra, vacuous=m == 1)


def hasse_covers(leq) -> list[tuple[int, int]]:
    leq = np.asarray(leq, dtype=bool)
    m = len(leq)
    out = []
    for i in range(m):
        for j in range(m):
            if i != j and leq[i, j] and not any(
                    k not in (i, j) and leq[i, k] and leq[k, j] for k in range(m)):
                out.append((i, j))
    return out


class SetFamily:
    """A family of subsets closed under intersection, ordered by inclusion."""

    def __init__(self, members, universe):
        self.universe = frozenset(universe)
        self.members: list[frozenset[int]] = sorted({frozenset(m) for m in members},
                                                    key=lambda s: (len(s), sorted(s)))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, s):
        return frozenset(s) in set(self.members)

    def __eq__(self, other):
        return isinstance(other, SetFamily) and self.members == other.members

    def least_containing(self, s):
        s = frozenset(s)
        over = [m for m in self.members if s <= m]
        if not over:
            return None
        out = frozenset.intersection(*over)
        return out if out in self else None

    def join(self, a, b):
        return self.least_containing(set(a) | set(b))

    def meet(self, a, b):
        return frozenset(a) & frozenset(b)

    @property
    def order(self):
        return np.array([[a <= b for b in self.members] for a in self.members], dtype=bool)

    def covers(self):
        return hasse_covers(self.order)

    def as_lattice(self) -> FiniteLattice:
        return FiniteLattice(self.order, [fmt_set(m) for m in self.members])

    def closed_under_intersection(self) -> bool:
        return all((a & b) in self for a, b in itertools.combinations(self.members, 2))

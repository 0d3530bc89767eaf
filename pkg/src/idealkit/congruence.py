"""Congruences of finite algebras.

A congruence is stored as ``block_of``: entry ``i`` is the least element of
the block containing ``i``. Two congruences are equal iff their arrays are.
"""

from __future__ import annotations

import itertools
import weakref
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import FiniteAlgebra, make_algebra
from .lattice import FiniteLattice, hasse_covers


@dataclass(frozen=True)
class Congruence:
    block_of: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.block_of)

    def related(self, a: int, b: int) -> bool:
        return self.block_of[a] == self.block_of[b]

    def block(self, a: int) -> frozenset[int]:
        r = self.block_of[a]
        return frozenset(i for i, b in enumerate(self.block_of) if b == r)

    def blocks(self) -> list[tuple[int, ...]]:
        out = {}
        for i, r in enumerate(self.block_of):
            out.setdefault(r, []).append(i)
        return [tuple(out[r]) for r in sorted(out)]

    def pairs(self) -> set[tuple[int, int]]:
        n = self.size
        return {(a, b) for a in range(n) for b in range(n) if self.block_of[a] == self.block_of[b]}

    def leq(self, other: Congruence) -> bool:
        return all(other.block_of[a] == other.block_of[r] for a, r in enumerate(self.block_of))

    def __str__(self):
        return "{" + ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks()) + "}"

    @staticmethod
    def from_blocks(n: int, blocks) -> Congruence:
        block_of = list(range(n))
        for b in blocks:
            b = sorted(b)
            for x in b:
                block_of[x] = b[0]
        return Congruence(tuple(block_of))

    @staticmethod
    def from_pairs(n: int, pairs) -> Congruence:
        uf = _UnionFind(n)
        for a, b in pairs:
            uf.union(a, b)
        return uf.congruence()

    @staticmethod
    def identity(n: int) -> Congruence:
        return Congruence(tuple(range(n)))

    @staticmethod
    def total(n: int) -> Congruence:
        return Congruence((0,) * n)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def congruence(self) -> Congruence:
        return Congruence(tuple(self.find(i) for i in range(len(self.parent))))


def _translations(alg: FiniteAlgebra):
    """Basic translations as arrays ``t`` with ``t[u]`` the image of ``u``."""
    out = []
    n = alg.size
    for _sym, arity, table in alg.operations():
        for pos in range(arity):
            moved = np.moveaxis(table, pos, -1).reshape(-1, n)
            out.append(moved)
    if not out:
        return np.zeros((0, n), dtype=np.int64)
    trans = np.unique(np.concatenate(out), axis=0)
    return trans


def generated_congruence(alg: FiniteAlgebra, pairs, seed: Congruence | None = None) -> Congruence:
    """Least congruence containing ``pairs`` (and ``seed``), by fixpoint closure."""
    n = alg.size
    trans = _cached_translations(alg)
    uf = _UnionFind(n)
    queue = []
    if seed is not None:
        for a, r in enumerate(seed.block_of):
            if uf.union(a, r):
                queue.append((a, r))
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"elements ({a},{b}) outside universe 0..{n - 1}")
        if uf.union(a, b):
            queue.append((a, b))
    while queue:
        a, b = queue.pop()
        for u, v in zip(trans[:, a].tolist(), trans[:, b].tolist()):
            if uf.union(u, v):
                queue.append((u, v))
    return uf.congruence()


_TRANS_CACHE: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def _cached_translations(alg):
    trans = _TRANS_CACHE.get(alg)
    if trans is None:
        trans = _TRANS_CACHE[alg] = _translations(alg)
    return trans


def principal_congruence(alg: FiniteAlgebra, a: int, b: int) -> Congruence:
    return generated_congruence(alg, [(a, b)])


def join(alg: FiniteAlgebra, theta: Congruence, phi: Congruence) -> Congruence:
    return generated_congruence(alg, [(a, r) for a, r in enumerate(phi.block_of) if a != r], seed=theta)


def meet(theta: Congruence, phi: Congruence) -> Congruence:
    first = {}
    out = []
    for i, key in enumerate(zip(theta.block_of, phi.block_of)):
        out.append(first.setdefault(key, i))
    return Congruence(tuple(out))


def is_compatible(alg: FiniteAlgebra, theta: Congruence) -> bool:
    return compatibility_violation(alg, theta) is None


def compatibility_violation(alg: FiniteAlgebra, theta: Congruence):
    """First (translation, a, b) with a θ b but images unrelated, else None."""
    lab = np.asarray(theta.block_of)
    trans = _cached_translations(alg)
    for a, b in itertools.combinations(range(alg.size), 2):
        if lab[a] != lab[b]:
            continue
        bad = np.nonzero(lab[trans[:, a]] != lab[trans[:, b]])[0]
        if len(bad):
            t = trans[bad[0]]
            return {"pair": [a, b], "images": [int(t[a]), int(t[b])]}
    return None


def point_class(alg: FiniteAlgebra, theta: Congruence, point: int | None = None) -> frozenset[int]:
    return theta.block(alg.point if point is None else point)


def compose_at_point(alg: FiniteAlgebra, theta: Congruence, phi: Congruence,
                     point: int | None = None) -> frozenset[int]:
    """The point-class of the relational product θ∘φ."""
    p = alg.point if point is None else point
    mids = theta.block(p)
    return frozenset(c for c in range(alg.size) if any(phi.related(u, c) for u in mids))


class CongruenceLattice:
    """All congruences of an algebra, sorted by (number of blocks desc, block_of)."""

    def __init__(self, alg: FiniteAlgebra, members):
        self.alg = alg
        self.members: list[Congruence] = sorted(set(members), key=lambda c: (-len(set(c.block_of)), c.block_of))
        self.index = {c: i for i, c in enumerate(self.members)}

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, c):
        return c in self.index

    @property
    def bottom(self) -> Congruence:
        return Congruence.identity(self.alg.size)

    @property
    def top(self) -> Congruence:
        return Congruence.total(self.alg.size)

    def join(self, a: Congruence, b: Congruence) -> Congruence:
        return join(self.alg, a, b)

    def meet(self, a: Congruence, b: Congruence) -> Congruence:
        return meet(a, b)

    @cached_property
    def order(self) -> np.ndarray:
        m = len(self.members)
        out = np.zeros((m, m), dtype=bool)
        for i, a in enumerate(self.members):
            for j, b in enumerate(self.members):
                out[i, j] = a.leq(b)
        return out

    def covers(self) -> list[tuple[int, int]]:
        return hasse_covers(self.order)

    def as_lattice(self) -> FiniteLattice:
        return FiniteLattice(self.order, [str(c) for c in self.members])

    def point_classes(self):
        return [point_class(self.alg, c) for c in self.members]


def all_congruences(alg: FiniteAlgebra) -> CongruenceLattice:
    """Con A as the join-closure of the principal congruences."""
    n = alg.size
    principals = []
    for a, b in itertools.combinations(range(n), 2):
        c = principal_congruence(alg, a, b)
        if c not in principals:
            principals.append(c)
    found = {Congruence.identity(n)}
    frontier = list(found)
    while frontier:
        nxt = []
        for c in frontier:
            for p in principals:
                if p.leq(c):
                    continue
                j = join(alg, c, p)
                if j not in found:
                    found.add(j)
                    nxt.append(j)
        frontier = nxt
    return CongruenceLattice(alg, found)


def set_partitions(n: int):
    """All partitions of 0..n-1 as block_of arrays (restricted growth strings)."""
    def rec(i, rgs, count):
        if i == n:
            yield rgs
            return
        for b in range(count + 1):
            yield from rec(i + 1, rgs + [b], max(count, b + 1))

    for rgs in rec(0, [], 0):
        first = {}
        yield Congruence(tuple(first.setdefault(b, i) for i, b in enumerate(rgs)))


def brute_force_congruences(alg: FiniteAlgebra) -> set[Congruence]:
    """Every partition checked for compatibility argument-tuple by argument-tuple."""
    out = set()
    n = alg.size
    for theta in set_partitions(n):
        ok = True
        for _sym, arity, table in alg.operations():
            if not ok:
                break
            for u in itertools.product(range(n), repeat=arity):
                for v in itertools.product(range(n), repeat=arity):
                    if all(theta.related(x, y) for x, y in zip(u, v)) and not theta.related(
                            int(table[u]), int(table[v])):
                        ok = False
                        break
                if not ok:
                    break
        if ok:
            out.add(theta)
    return out


def quotient(alg: FiniteAlgebra, theta: Congruence):
    """``(A/θ, surjection)``; blocks are numbered in order of their least member."""
    viol = compatibility_violation(alg, theta)
    if viol is not None:
        raise ValueError(f"partition {theta} is not compatible with {alg.label()}: {viol}")
    reps = sorted(set(theta.block_of))
    rank = {r: i for i, r in enumerate(reps)}
    surj = tuple(rank[r] for r in theta.block_of)
    ops = {}
    for sym, arity, table in alg.operations():
        if arity == 0:
            ops[sym] = (0, surj[int(table)])
        else:
            sub = table[np.ix_(*([reps] * arity))]
            ops[sym] = (arity, np.vectorize(lambda v: surj[v], otypes=[np.int64])(sub))
    q = make_algebra(f"{alg.name}/{theta}", len(reps), alg.signature.point, ops, dict(alg.bindings))
    return q, surj

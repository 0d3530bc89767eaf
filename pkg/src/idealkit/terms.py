"""Terms over a signature: parsing, evaluation, substitution, enumeration."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

import numpy as np

from . import report as rep
from .algebra import AlgebraError, FiniteAlgebra, Signature, check_same_signature


class TermError(ValueError):
    pass


VAR_RE = re.compile(r"^[xy][0-9]+$")


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    symbol: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.symbol
        return f"{self.symbol}({','.join(str(a) for a in self.args)})"


Term = Var | App


def is_variable_name(name: str) -> bool:
    return bool(VAR_RE.match(name))


def app(symbol, *args) -> App:
    return App(symbol, tuple(args))


def var_key(name: str):
    """Sort key: x-variables before y-variables, then by index."""
    return (name[0], int(name[1:]))


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:([(),])|([^\s(),]+))")


def parse_term(text: str) -> Term:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise TermError(f"cannot tokenize {text!r} at offset {pos}")
        tokens.append(m.group(1) or m.group(2))
        pos = m.end()
    if not tokens:
        raise TermError("empty term")

    def parse(i):
        if i >= len(tokens):
            raise TermError(f"unexpected end of {text!r}")
        tok = tokens[i]
        if tok in "(),":
            raise TermError(f"unexpected {tok!r} in {text!r}")
        if i + 1 < len(tokens) and tokens[i + 1] == "(":
            args = []
            i += 2
            while True:
                sub, i = parse(i)
                args.append(sub)
                if i >= len(tokens):
                    raise TermError(f"unclosed application in {text!r}")
                if tokens[i] == ")":
                    return App(tok, tuple(args)), i + 1
                if tokens[i] != ",":
                    raise TermError(f"expected ',' or ')' in {text!r}")
                i += 1
        if is_variable_name(tok):
            return Var(tok), i + 1
        return App(tok), i + 1

    term, end = parse(0)
    if end != len(tokens):
        raise TermError(f"trailing input in {text!r}")
    return term


def parse_equation(text: str) -> tuple[Term, Term]:
    if "=" not in text:
        raise TermError(f"equation {text!r} has no '='")
    lhs, rhs = text.split("=", 1)
    return parse_term(lhs), parse_term(rhs)


def load_terms(path) -> list[Term]:
    """One term per line; blank lines and ``#`` comments ignored."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                out.append(parse_term(line))
            except TermError as exc:
                raise TermError(f"{path}:{lineno}: {exc}") from exc
    return out


# -- structure -------------------------------------------------------------

def free_vars(term: Term) -> set[str]:
    if isinstance(term, Var):
        return {term.name}
    out = set()
    for a in term.args:
        out |= free_vars(a)
    return out


def sorted_vars(*terms) -> list[str]:
    names = set()
    for t in terms:
        names |= free_vars(t)
    return sorted(names, key=var_key)


def depth(term: Term) -> int:
    if isinstance(term, Var) or not term.args:
        return 0
    return 1 + max(depth(a) for a in term.args)


def substitute(term: Term, mapping: dict) -> Term:
    """Simultaneous substitution of terms for variables."""
    if isinstance(term, Var):
        return mapping.get(term.name, term)
    if not term.args:
        return term
    return App(term.symbol, tuple(substitute(a, mapping) for a in term.args))


def check_term(sig: Signature, term: Term) -> None:
    if isinstance(term, Var):
        return
    arity = sig.arities.get(term.symbol)
    if arity is None:
        raise TermError(f"unknown symbol {term.symbol!r}")
    if arity != len(term.args):
        raise TermError(f"{term.symbol!r} has arity {arity}, applied to {len(term.args)} arguments")
    for a in term.args:
        check_term(sig, a)


# -- evaluation ------------------------------------------------------------

def eval_term(alg: FiniteAlgebra, term: Term, assignment: dict) -> int:
    if isinstance(term, Var):
        try:
            return int(assignment[term.name])
        except KeyError:
            raise TermError(f"unbound variable {term.name!r}") from None
    table = alg.tables.get(term.symbol)
    if table is None:
        raise TermError(f"unknown symbol {term.symbol!r}")
    if table.ndim != len(term.args):
        raise TermError(f"{term.symbol!r} has arity {table.ndim}, applied to {len(term.args)} arguments")
    vals = tuple(eval_term(alg, a, assignment) for a in term.args)
    return int(table[vals])


def eval_columns(alg: FiniteAlgebra, term: Term, columns: dict) -> np.ndarray:
    """Evaluate ``term`` pointwise; ``columns`` maps variable names to equal-shape int arrays."""
    shape = next(iter(columns.values())).shape if columns else ()
    cache = {}

    def ev(t):
        if isinstance(t, Var):
            try:
                return columns[t.name]
            except KeyError:
                raise TermError(f"unbound variable {t.name!r}") from None
        hit = cache.get(t)
        if hit is not None:
            return hit
        table = alg.tables.get(t.symbol)
        if table is None:
            raise TermError(f"unknown symbol {t.symbol!r}")
        if table.ndim != len(t.args):
            raise TermError(f"{t.symbol!r} has arity {table.ndim}, applied to {len(t.args)} arguments")
        if not t.args:
            out = np.full(shape, int(table), dtype=np.int64)
        else:
            out = table[tuple(ev(a) for a in t.args)]
        cache[t] = out
        return out

    return ev(term)


def grid(n: int, k: int) -> np.ndarray:
    """All k-tuples over 0..n-1 in lexicographic order, shape (n**k, k)."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices((n,) * k, dtype=np.int64).reshape(k, -1).T


def term_function(alg: FiniteAlgebra, term: Term, variables) -> np.ndarray:
    """The induced operation as an array with one axis per variable."""
    variables = list(variables)
    pts = grid(alg.size, len(variables))
    cols = {v: pts[:, i] for i, v in enumerate(variables)}
    vals = eval_columns(alg, term, cols)
    return np.asarray(vals).reshape((alg.size,) * len(variables))


def assignments(n: int, variables):
    variables = list(variables)
    for combo in itertools.product(range(n), repeat=len(variables)):
        yield dict(zip(variables, combo))


# -- enumeration -----------------------------------------------------------

class Presentation(tuple):
    """Generators of a variety: a non-empty tuple of algebras with one signature."""

    def __new__(cls, algebras):
        if isinstance(algebras, FiniteAlgebra):
            algebras = (algebras,)
        algebras = tuple(algebras)
        check_same_signature(algebras)
        return super().__new__(cls, algebras)

    @property
    def signature(self) -> Signature:
        return self[0].signature


_CHUNK = 1 << 21


class TermPool:
    """Depth-bounded term enumeration deduplicated by induced behaviour.

    Behaviour is recorded on a fixed set of evaluation points per generator
    (all assignments by default). Two terms agreeing on every point of every
    generator are kept once, the first in enumeration order: by depth, then
    symbol order, then argument tuples in lexicographic pool order.
    """

    def __init__(self, variety, variables, points=None, dedup=True):
        self.variety = Presentation(variety)
        self.sig = self.variety.signature
        self.variables = list(variables)
        self.dedup = dedup
        k = len(self.variables)
        if points is None:
            points = [grid(a.size, k) for a in self.variety]
        self.points = [np.asarray(p, dtype=np.int64).reshape(-1, k) for p in points]
        self.sizes = [a.size for a in self.variety]
        self.offsets = np.cumsum([0] + [len(p) for p in self.points])
        self.width = int(self.offsets[-1])
        self._chunk_plan()
        self.terms: list[Term] = []
        self.depths: list[int] = []
        self._rows: list[np.ndarray] = []
        self._seen = set()
        self.built_depth = -1

    def _chunk_plan(self):
        # mixed-radix integer codes, split into int64-sized chunks
        self._radix = np.concatenate(
            [np.full(len(p), n, dtype=np.int64) for p, n in zip(self.points, self.sizes)]
        ) if self.width else np.zeros(0, dtype=np.int64)
        bounds = [0]
        acc = 1
        for i, r in enumerate(self._radix):
            if acc * int(r) >= (1 << 62):
                bounds.append(i)
                acc = 1
            acc *= int(r)
        bounds.append(self.width)
        self._bounds = bounds
        self._weights = []
        for lo, hi in zip(bounds, bounds[1:]):
            w = np.ones(hi - lo, dtype=np.int64)
            for j in range(1, hi - lo):
                w[j] = w[j - 1] * self._radix[lo + j - 1]
            self._weights.append(w)

    def _codes(self, rows: np.ndarray):
        cols = [rows[:, lo:hi] @ w for (lo, hi), w in zip(zip(self._bounds, self._bounds[1:]), self._weights)]
        if len(cols) == 1:
            return cols[0]
        return np.stack(cols, axis=1)

    @property
    def matrix(self) -> np.ndarray:
        if not self._rows:
            return np.zeros((0, self.width), dtype=np.int64)
        return np.stack(self._rows)

    def _offer(self, terms_fn, rows, depth_value):
        """Add candidate rows (in order); ``terms_fn(i)`` builds the i-th term lazily."""
        if len(rows) == 0:
            return
        if not self.dedup:
            for i in range(len(rows)):
                self.terms.append(terms_fn(i))
                self.depths.append(depth_value)
                self._rows.append(rows[i])
            return
        codes = self._codes(rows)
        if codes.ndim == 1:
            uniq, first = np.unique(codes, return_index=True)
            keys = uniq.tolist()
        else:
            uniq, first = np.unique(codes, axis=0, return_index=True)
            keys = [tuple(r) for r in uniq.tolist()]
        order = np.argsort(first, kind="stable")
        seen = self._seen
        for o in order:
            key = keys[o]
            if key in seen:
                continue
            seen.add(key)
            i = int(first[o])
            self.terms.append(terms_fn(i))
            self.depths.append(depth_value)
            self._rows.append(rows[i])

    def _segment_apply(self, table_list, arg_rows):
        """Apply one symbol's tables generator-wise; arg_rows: list of (m, width) arrays."""
        out = np.empty(arg_rows[0].shape, dtype=np.int64)
        for g, table in enumerate(table_list):
            lo, hi = self.offsets[g], self.offsets[g + 1]
            out[:, lo:hi] = table[tuple(a[:, lo:hi] for a in arg_rows)]
        return out

    def build(self, max_depth: int) -> TermPool:
        if max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if self.built_depth < 0:
            atoms = [Var(v) for v in self.variables] + [App(c) for c in self.sig.constants()]
            rows = np.empty((len(atoms), self.width), dtype=np.int64)
            for i, atom in enumerate(atoms):
                for g, alg in enumerate(self.variety):
                    lo, hi = self.offsets[g], self.offsets[g + 1]
                    if isinstance(atom, Var):
                        rows[i, lo:hi] = self.points[g][:, self.variables.index(atom.name)]
                    else:
                        rows[i, lo:hi] = alg.constant(atom.symbol)
            self._offer(lambda i: atoms[i], rows, 0)
            self.built_depth = 0
        while self.built_depth < max_depth:
            self._grow()
        return self

    def _grow(self):
        d = self.built_depth + 1
        mat = self.matrix
        terms = list(self.terms)
        depths = np.asarray(self.depths)
        n = len(terms)
        frontier = int(np.searchsorted(depths, d - 1))  # pool is depth-sorted
        for sym, arity in self.sig.symbols:
            if arity == 0:
                continue
            tables = [alg.tables[sym] for alg in self.variety]
            if arity == 1:
                idx = np.arange(frontier, n)
                self._offer(lambda i, idx=idx, sym=sym: App(sym, (terms[idx[i]],)),
                            self._segment_apply(tables, [mat[idx]]), d)
                continue
            # all but the last argument enumerated explicitly; last vectorised
            for prefix in itertools.product(range(n), repeat=arity - 1):
                fresh = any(p >= frontier for p in prefix)
                last = np.arange(n) if fresh else np.arange(frontier, n)
                if len(last) == 0:
                    continue
                for start in range(0, len(last), max(1, _CHUNK // max(1, self.width))):
                    part = last[start:start + max(1, _CHUNK // max(1, self.width))]
                    args = [np.broadcast_to(mat[p], (len(part), self.width)) for p in prefix] + [mat[part]]
                    rows = self._segment_apply(tables, args)
                    self._offer(
                        lambda i, prefix=prefix, part=part, sym=sym:
                            App(sym, tuple(terms[p] for p in prefix) + (terms[part[i]],)),
                        rows, d)
        self.built_depth = d


def enumerate_terms(sig: Signature, variables, max_depth, over=None) -> list[Term]:
    """Terms in ``variables`` up to ``max_depth``.

    With ``over`` (a generator algebra or tuple of them) terms inducing the
    same operation on every generator are kept once. Without it the result
    is every syntactic term, which grows very quickly.
    """
    if over is None:
        return _syntactic_terms(sig, list(variables), max_depth)
    pool = TermPool(over, variables)
    if pool.sig.symbols != sig.symbols:
        raise AlgebraError("generators do not share the requested signature")
    return pool.build(max_depth).terms


def _syntactic_terms(sig, variables, max_depth):
    levels = [[Var(v) for v in variables] + [App(c) for c in sig.constants()]]
    for d in range(1, max_depth + 1):
        upto = [t for lvl in levels for t in lvl]
        fresh = set(levels[-1])
        new = []
        for sym, arity in sig.symbols:
            if arity == 0:
                continue
            for args in itertools.product(upto, repeat=arity):
                if any(a in fresh for a in args):
                    new.append(App(sym, args))
        levels.append(new)
    return [t for lvl in levels for t in lvl]


# -- identities ------------------------------------------------------------

def satisfies_identity(variety, lhs: Term, rhs: Term, name="identity"):
    """Exhaustive check of ``lhs = rhs`` on every generator."""
    variety = Presentation(variety)
    for t in (lhs, rhs):
        check_term(variety.signature, t)
    names = sorted_vars(lhs, rhs)
    for gi, alg in enumerate(variety):
        pts = grid(alg.size, len(names))
        cols = {v: pts[:, i] for i, v in enumerate(names)}
        left = np.broadcast_to(eval_columns(alg, lhs, cols), (len(pts),))
        right = np.broadcast_to(eval_columns(alg, rhs, cols), (len(pts),))
        bad = np.nonzero(left != right)[0]
        if len(bad):
            i = int(bad[0])
            return rep.failed(name, alg.label(), {
                "generator": gi,
                "assignment": {v: int(pts[i, j]) for j, v in enumerate(names)},
                "equation": f"{lhs} = {rhs}",
                "values": [int(left[i]), int(right[i])],
            })
    return rep.passed(name, ",".join(a.label() for a in variety),
                      vacuous=all(a.size == 1 for a in variety))


def satisfies_quasi_identity(variety, premises, conclusion, name="quasi-identity"):
    variety = Presentation(variety)
    lhs, rhs = conclusion
    all_terms = [lhs, rhs] + [t for pair in premises for t in pair]
    for t in all_terms:
        check_term(variety.signature, t)
    names = sorted_vars(*all_terms)
    for gi, alg in enumerate(variety):
        pts = grid(alg.size, len(names))
        cols = {v: pts[:, i] for i, v in enumerate(names)}
        ok = np.ones(len(pts), dtype=bool)
        for p, q in premises:
            ok &= np.broadcast_to(eval_columns(alg, p, cols) == eval_columns(alg, q, cols), (len(pts),))
        concl = np.broadcast_to(eval_columns(alg, lhs, cols) == eval_columns(alg, rhs, cols), (len(pts),))
        bad = np.nonzero(ok & ~concl)[0]
        if len(bad):
            i = int(bad[0])
            return rep.failed(name, alg.label(), {
                "generator": gi,
                "assignment": {v: int(pts[i, j]) for j, v in enumerate(names)},
                "conclusion": f"{lhs} = {rhs}",
            })
    return rep.passed(name, ",".join(a.label() for a in variety),
                      vacuous=all(a.size == 1 for a in variety))


__all__ = [
    "AlgebraError", "App", "Presentation", "Term", "TermError", "TermPool", "Var", "app",
    "check_term", "depth", "enumerate_terms", "eval_columns", "eval_term", "free_vars", "grid",
    "is_variable_name", "load_terms", "parse_equation", "parse_term", "satisfies_identity",
    "satisfies_quasi_identity", "sorted_vars", "substitute", "term_function",
]

"""Finite algebras given by explicit operation tables."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class AlgebraError(ValueError):
    """Malformed algebra, signature or input file."""


@dataclass(frozen=True)
class Signature:
    symbols: tuple[tuple[str, int], ...]
    point: str

    def __post_init__(self):
        names = [name for name, _ in self.symbols]
        if len(set(names)) != len(names):
            raise AlgebraError(f"duplicate operation symbols in {names}")
        for name, arity in self.symbols:
            if arity < 0:
                raise AlgebraError(f"negative arity for {name!r}")
            if _looks_like_variable(name):
                raise AlgebraError(f"symbol {name!r} clashes with variable names")
        if self.arities.get(self.point) != 0:
            raise AlgebraError(f"point {self.point!r} is not a constant of the signature")

    @property
    def arities(self) -> dict[str, int]:
        return dict(self.symbols)

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.symbols]

    def constants(self) -> list[str]:
        return [name for name, arity in self.symbols if arity == 0]

    def with_point(self, point: str) -> Signature:
        return Signature(self.symbols, point)


def _looks_like_variable(name: str) -> bool:
    return len(name) > 1 and name[0] in "xy" and name[1:].isdigit()


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    """An algebra on the universe ``0..size-1``.

    ``tables`` maps each symbol to a numpy array with one axis per argument;
    constants are 0-dimensional arrays. ``bindings`` optionally names the
    roles (join, meet, fuse, ...) used by the residuated and quasi views.
    """

    signature: Signature
    size: int
    tables: dict[str, np.ndarray]
    name: str = ""
    bindings: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.size < 1:
            raise AlgebraError("universe must be non-empty")
        arities = self.signature.arities
        if set(self.tables) != set(arities):
            missing = set(arities) - set(self.tables)
            extra = set(self.tables) - set(arities)
            raise AlgebraError(f"table/symbol mismatch: missing {sorted(missing)}, extra {sorted(extra)}")
        for sym, arity in arities.items():
            table = np.asarray(self.tables[sym], dtype=np.int64)
            if table.shape != (self.size,) * arity:
                raise AlgebraError(
                    f"table for {sym!r} has shape {table.shape}, expected {(self.size,) * arity}"
                )
            if table.size and (table.min() < 0 or table.max() >= self.size):
                bad = np.argwhere((table < 0) | (table >= self.size))[0]
                raise AlgebraError(
                    f"table for {sym!r}: entry at {tuple(int(i) for i in bad)} out of range 0..{self.size - 1}"
                )
            table.flags.writeable = False
            self.tables[sym] = table
        for role, sym in self.bindings.items():
            if sym not in arities:
                raise AlgebraError(f"binding {role!r} names unknown symbol {sym!r}")

    @property
    def point(self) -> int:
        return int(self.tables[self.signature.point])

    @property
    def universe(self) -> range:
        return range(self.size)

    def op(self, sym: str, *args: int) -> int:
        return int(self.tables[sym][tuple(args)])

    def constant(self, sym: str) -> int:
        return int(self.tables[sym])

    def operations(self):
        """(symbol, arity, table) in signature order."""
        for sym, arity in self.signature.symbols:
            yield sym, arity, self.tables[sym]

    def with_point(self, point: str) -> FiniteAlgebra:
        """Same algebra with a different designated constant."""
        return FiniteAlgebra(self.signature.with_point(point), self.size, dict(self.tables),
                             self.name, dict(self.bindings))

    def label(self) -> str:
        return f"{self.name or 'algebra'}@{self.signature.point}"

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "size": self.size,
            "point": self.signature.point,
            "operations": [
                {"symbol": sym, "arity": arity, "table": self.tables[sym].tolist()}
                for sym, arity in self.signature.symbols
            ],
        }
        if self.bindings:
            out["bindings"] = dict(self.bindings)
        return out


def from_dict(data: dict, point: str | None = None) -> FiniteAlgebra:
    try:
        size = int(data["size"])
        ops = data["operations"]
        symbols = tuple((str(op["symbol"]), int(op["arity"])) for op in ops)
        tables = {str(op["symbol"]): np.asarray(op["table"], dtype=np.int64) for op in ops}
        sig = Signature(symbols, point or str(data["point"]))
    except (KeyError, TypeError) as exc:
        raise AlgebraError(f"malformed algebra description: missing or bad field {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, AlgebraError):
            raise
        raise AlgebraError(f"malformed operation table: {exc}") from exc
    return FiniteAlgebra(sig, size, tables, str(data.get("name", "")), dict(data.get("bindings", {})))


def load_algebra(path, point: str | None = None) -> FiniteAlgebra:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise AlgebraError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise AlgebraError(f"{path}: {exc.strerror}") from exc
    try:
        alg = from_dict(data, point)
    except AlgebraError as exc:
        raise AlgebraError(f"{path}: {exc}") from exc
    if not alg.name:
        alg = FiniteAlgebra(alg.signature, alg.size, dict(alg.tables), path.stem, dict(alg.bindings))
    return alg


def dump_algebra(alg: FiniteAlgebra, path) -> None:
    Path(path).write_text(json.dumps(alg.to_dict(), indent=None) + "\n", encoding="utf-8")


def make_algebra(name, size, point, ops, bindings=None) -> FiniteAlgebra:
    """Build an algebra from ``{symbol: (arity, table_or_callable)}``.

    A callable table is evaluated on every argument tuple.
    """
    symbols = []
    tables = {}
    for sym, (arity, spec) in ops.items():
        symbols.append((sym, arity))
        if callable(spec):
            table = np.zeros((size,) * arity, dtype=np.int64)
            for idx in np.ndindex(*table.shape):
                table[idx] = spec(*idx)
        else:
            table = np.asarray(spec, dtype=np.int64)
        tables[sym] = table
    return FiniteAlgebra(Signature(tuple(symbols), point), size, tables, name, dict(bindings or {}))


def check_same_signature(algebras) -> Signature:
    algebras = list(algebras)
    if not algebras:
        raise AlgebraError("a variety presentation needs at least one generator")
    first = algebras[0].signature
    for alg in algebras[1:]:
        if alg.signature.symbols != first.symbols or alg.signature.point != first.point:
            raise AlgebraError(f"signature mismatch between {algebras[0].label()} and {alg.label()}")
    return first

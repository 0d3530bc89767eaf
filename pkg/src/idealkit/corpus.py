"""The bundled algebras.

Residuated algebras use the symbols ``join meet mul imp c0 c1``; ``imp`` is
bound to both residuals (commutative case).
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .algebra import FiniteAlgebra, load_algebra, make_algebra

FLEW_BINDINGS = {
    "join": "join", "meet": "meet", "fuse": "mul",
    "lres": "imp", "rres": "imp", "one": "c1", "zero": "c0",
}

CORPUS_NAMES = ("b2", "g3", "l3", "z4", "sl3", "set2")


def chain_flew(name, size, mul, imp, point="c1", extra=None) -> FiniteAlgebra:
    """An FL_ew chain ``0 < 1 < ... < size-1`` with given fuse and implication."""
    ops = {
        "join": (2, lambda a, b: max(a, b)),
        "meet": (2, lambda a, b: min(a, b)),
        "mul": (2, mul),
        "imp": (2, imp),
        "c0": (0, 0),
        "c1": (0, size - 1),
    }
    ops.update(extra or {})
    return make_algebra(name, size, point, ops, FLEW_BINDINGS)


def b2(point="c1"):
    return chain_flew("b2", 2, min, lambda a, b: 1 if a <= b else b, point)


def g3(point="c1", extra=None, name="g3"):
    return chain_flew(name, 3, min, lambda a, b: 2 if a <= b else b, point, extra)


def l3(point="c1"):
    return chain_flew("l3", 3, lambda a, b: max(0, a + b - 2), lambda a, b: min(2, 2 - a + b), point)


def l4(point="c1"):
    return chain_flew("l4", 4, lambda a, b: max(0, a + b - 3), lambda a, b: min(3, 3 - a + b), point)


def onepoint(point="c1"):
    return chain_flew("onepoint", 1, lambda a, b: 0, lambda a, b: 0, point)


def z4():
    return make_algebra("z4", 4, "zero", {
        "add": (2, lambda a, b: (a + b) % 4),
        "neg": (1, lambda a: (-a) % 4),
        "zero": (0, 0),
    })


def sl3():
    """The 3-element meet-semilattice chain pointed at its bottom."""
    return make_algebra("sl3", 3, "c0", {"meet": (2, min), "c0": (0, 0)})


def set2():
    return make_algebra("set2", 2, "c0", {"c0": (0, 0)})


def g3_delta():
    """G3 with the operator keeping the top and sending everything else to 0."""
    return g3(extra={"delta": (1, lambda a: 2 if a == 2 else 0)}, name="g3delta")


def g3_nn():
    """G3 with double negation as an operator."""
    neg = lambda a: 2 if a == 0 else 0
    return g3(extra={"nn": (1, lambda a: neg(neg(a)))}, name="g3nn")


def g3_id():
    return g3(extra={"ident": (1, lambda a: a)}, name="g3id")


BUILDERS = {
    "b2": b2, "g3": g3, "l3": l3, "l4": l4, "z4": z4, "sl3": sl3, "set2": set2,
    "onepoint": onepoint, "g3delta": g3_delta, "g3nn": g3_nn, "g3id": g3_id,
}


def data_dir() -> Path:
    return Path(str(resources.files("idealkit") / "data"))


def bundled(name: str, point: str | None = None) -> FiniteAlgebra:
    """Load a bundled algebra file by stem, e.g. ``bundled("g3")``."""
    return load_algebra(data_dir() / f"{name}.json", point)


def corpus(names=CORPUS_NAMES):
    return [bundled(n) for n in names]


OPERATOR_NAMES = ("g3delta", "g3nn", "g3id")

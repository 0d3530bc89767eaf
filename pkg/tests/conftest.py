import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from idealkit import corpus
from idealkit.algebra import make_algebra

FIXTURES = __import__("pathlib").Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def g3():
    return corpus.bundled("g3")


@pytest.fixture(scope="session")
def l3():
    return corpus.bundled("l3")


@pytest.fixture(scope="session")
def b2():
    return corpus.bundled("b2")


@pytest.fixture(scope="session")
def z4():
    return corpus.bundled("z4")


@pytest.fixture(scope="session")
def sl3():
    return corpus.bundled("sl3")


@pytest.fixture(scope="session")
def set2():
    return corpus.bundled("set2")


def all_corpus(points=True):
    """Bundled corpus, residuated members also pointed at 0."""
    out = [corpus.bundled(n) for n in corpus.CORPUS_NAMES]
    if points:
        out += [corpus.bundled(n, "c0") for n in ("b2", "g3", "l3")]
    return out


@st.composite
def small_algebras(draw, max_size=3, unary=True, binary=True):
    """Random pointed algebras with a constant, optionally a unary and a binary symbol."""
    n = draw(st.integers(1, max_size))
    elem = st.integers(0, n - 1)
    ops = {"e": (0, draw(elem))}
    if unary:
        ops["u"] = (1, np.array(draw(st.lists(elem, min_size=n, max_size=n))))
    if binary:
        flat = draw(st.lists(elem, min_size=n * n, max_size=n * n))
        ops["b"] = (2, np.array(flat).reshape(n, n))
    return make_algebra("rnd", n, "e", ops)

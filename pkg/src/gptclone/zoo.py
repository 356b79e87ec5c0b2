"""Named example models: small test spaces, their state spaces and a few maps."""
from __future__ import annotations

from typing import Callable

from .exact import outer
from .model import AffineMap, StateSpace, TestSpace, map_from_vertex_images, simplex_space, state_space_from_test_space
from .quantum import DensityMatrix


def delta3_test_space() -> TestSpace:
    return TestSpace(("x", "y", "z"), [("x", "y", "z")])


def square_test_space() -> TestSpace:
    return TestSpace(("a0", "a1", "b0", "b1"), [("a0", "a1"), ("b0", "b1")])


def firefly_test_space() -> TestSpace:
    """Three three-outcome tests arranged in a loop, adjacent tests sharing one outcome."""
    return TestSpace(("a", "x", "b", "y", "c", "z"), [("a", "x", "b"), ("b", "y", "c"), ("c", "z", "a")])


def birkhoff_test_space(n: int = 3) -> TestSpace:
    """Rows and columns of an n x n array of outcomes."""
    cells = [f"r{i}c{j}" for i in range(n) for j in range(n)]
    rows = [tuple(f"r{i}c{j}" for j in range(n)) for i in range(n)]
    cols = [tuple(f"r{i}c{j}" for i in range(n)) for j in range(n)]
    return TestSpace(tuple(cells), rows + cols)


def delta2() -> StateSpace:
    return simplex_space(2, labels=("e0", "e1"), name="delta2")


def delta3() -> StateSpace:
    return state_space_from_test_space(delta3_test_space(), name="delta3")


def square() -> StateSpace:
    return state_space_from_test_space(square_test_space(), name="square")


def firefly() -> StateSpace:
    return state_space_from_test_space(firefly_test_space(), name="firefly")


def birkhoff(n: int = 3) -> StateSpace:
    return state_space_from_test_space(birkhoff_test_space(n), name=f"birkhoff{n}")


def qubit_states() -> dict[str, DensityMatrix]:
    """Computational and diagonal basis states of a qubit."""
    h = 2 ** -0.5
    return {
        "zero": DensityMatrix.diagonal([1, 0]),
        "one": DensityMatrix.diagonal([0, 1]),
        "plus": DensityMatrix.pure([h, h]),
        "minus": DensityMatrix.pure([h, -h]),
    }


def kappa_map(s: StateSpace, t: StateSpace) -> AffineMap:
    """Classical cloning of a simplex: each vertex goes to its own product with itself."""
    return map_from_vertex_images(s, t, [outer(v, v) for v in s.vertices])


def swap_broadcast_map(s: StateSpace, t: StateSpace) -> AffineMap:
    """On a segment: alpha_1 -> alpha_1 (x) alpha_2 and alpha_2 -> alpha_2 (x) alpha_1."""
    v = s.vertices
    if len(v) != 2:
        raise ValueError("defined on a two-vertex simplex")
    return map_from_vertex_images(s, t, [outer(v[0], v[1]), outer(v[1], v[0])])


STATE_SPACES: dict[str, Callable[[], StateSpace]] = {
    "delta2": delta2,
    "delta3": delta3,
    "square": square,
    "firefly": firefly,
    "birkhoff3": birkhoff,
}

# the five worked example models, in their natural order; the quantum one is numerical
EXAMPLES = ("delta3", "square", "qubit", "firefly", "birkhoff3")

TEST_SPACES: dict[str, Callable[[], TestSpace]] = {
    "delta3": delta3_test_space,
    "square": square_test_space,
    "firefly": firefly_test_space,
    "birkhoff3": birkhoff_test_space,
}


def get(name: str) -> StateSpace:
    try:
        return STATE_SPACES[name]()
    except KeyError:
        raise KeyError(f"unknown model {name!r}; choose from {sorted(STATE_SPACES)}") from None


__all__ = [
    "EXAMPLES",
    "STATE_SPACES",
    "TEST_SPACES",
    "birkhoff",
    "birkhoff_test_space",
    "delta2",
    "delta3",
    "delta3_test_space",
    "firefly",
    "firefly_test_space",
    "get",
    "kappa_map",
    "qubit_states",
    "square",
    "square_test_space",
    "swap_broadcast_map",
]

"""State spaces, effects, observables and affine maps over exact polytopes.

Every state space lives in a coordinate space Q^n together with a *linear*
unit functional ``u`` that equals 1 on every state.  Affine functionals on
the state space are therefore linear functionals on the span ``V`` of the
states, and they are stored modulo the annihilator of ``V`` in a canonical
reduced form (pivot columns of the annihilator's RREF set to zero).  Affine
maps are stored the same way: a matrix acting on source coordinates whose
rows are reduced modulo the source annihilator.

Test-space models use the raw outcome probabilities as coordinates; plain
polytopes given without a unit are homogenized to ``(1, x)`` with ``u = e0``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .exact import (
    Matrix,
    ONE,
    ZERO,
    Vector,
    add,
    combination,
    dot,
    is_zero,
    nullspace_basis,
    outer,
    primitive,
    rref,
    scale,
    solve_affine,
    sub,
    unit_vector,
    vec,
    vectors_rank,
)
from .polytope import Cone, Polytope, eq, ge, lp_feasible

logger = logging.getLogger(__name__)


class ModelError(ValueError):
    """Invalid model data (an invariant of a state space, effect or map fails)."""


class EmptyStateSpaceError(ModelError):
    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


# ---------------------------------------------------------------------------
# test spaces


@dataclass(frozen=True)
class TestSpace:
    outcomes: tuple
    tests: tuple

    __test__ = False  # keep pytest from collecting this class

    def __init__(self, outcomes: Sequence[str] | None, tests: Sequence[Sequence[str]]):
        tests = tuple(tuple(str(x) for x in t) for t in tests)
        if outcomes is None:
            seen: dict = {}
            for t in tests:
                for x in t:
                    seen.setdefault(x, None)
            outcomes = tuple(seen)
        outcomes = tuple(str(x) for x in outcomes)
        if len(set(outcomes)) != len(outcomes):
            raise ModelError("duplicate outcome names")
        if not tests:
            raise ModelError("a test space needs at least one test")
        known = set(outcomes)
        used = set()
        for k, t in enumerate(tests):
            if not t:
                raise ModelError(f"test {k} is empty")
            if len(set(t)) != len(t):
                raise ModelError(f"test {k} repeats an outcome")
            for x in t:
                if x not in known:
                    raise ModelError(f"test {k} uses unknown outcome {x!r}")
            used.update(t)
        missing = [x for x in outcomes if x not in used]
        if missing:
            raise ModelError(f"outcomes {missing} belong to no test")
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "tests", tests)

    def index(self, outcome: str) -> int:
        return self.outcomes.index(outcome)

    def indicator(self, outcomes: Sequence[str]) -> Vector:
        """Coordinate functional summing the probabilities of ``outcomes``."""
        idx = {self.index(x) for x in outcomes}
        return tuple(ONE if i in idx else ZERO for i in range(len(self.outcomes)))


# ---------------------------------------------------------------------------
# state spaces


class StateSpace:
    """A polytope of states together with its unit functional.

    ``geometry`` is a :class:`Polytope` in Q^n; ``unit`` is a linear
    functional with ``unit . v == 1`` on every vertex.
    """

    def __init__(self, geometry: Polytope, unit: Sequence, labels: Sequence[str] | None = None,
                 test_space: TestSpace | None = None, name: str = "", validate: bool = True):
        self.geometry = geometry
        self.unit = vec(unit)
        n = geometry.dim
        if len(self.unit) != n:
            raise ModelError("unit functional has the wrong length")
        self.labels = tuple(labels) if labels is not None else tuple(f"x{i}" for i in range(n))
        if len(self.labels) != n:
            raise ModelError("label count does not match the dimension")
        self.test_space = test_space
        self.name = name
        if validate:
            vs = geometry.vertices
            if not vs:
                raise EmptyStateSpaceError("state space is empty")
            for v in vs:
                if dot(self.unit, v) != 1:
                    raise ModelError(f"unit functional is not 1 on vertex {v}")

    # -- basic data --------------------------------------------------------------

    @property
    def dim(self) -> int:
        """Number of coordinates."""
        return self.geometry.dim

    @property
    def vertices(self) -> tuple:
        return self.geometry.vertices

    def spanning_points(self) -> tuple:
        """Points of the state space whose linear span is the span of all states."""
        return self.vertices

    @cached_property
    def _annihilator(self) -> tuple[list, list]:
        basis = nullspace_basis(Matrix(self.spanning_points(), ncols=self.dim))
        if not basis:
            return [], []
        rows, pivots = rref(Matrix(basis, ncols=self.dim))
        return [tuple(r) for r in rows], pivots

    @property
    def annihilator(self) -> list[Vector]:
        """RREF basis of the functionals vanishing on every state."""
        return self._annihilator[0]

    @cached_property
    def free_columns(self) -> tuple[int, ...]:
        piv = set(self._annihilator[1])
        return tuple(i for i in range(self.dim) if i not in piv)

    @property
    def effect_dim(self) -> int:
        """dim A(Omega): the number of linearly independent affine functionals."""
        return len(self.free_columns)

    @cached_property
    def span_basis(self) -> tuple[list, list]:
        """RREF basis of the span of the states with its pivot columns."""
        rows, pivots = rref(Matrix(self.spanning_points(), ncols=self.dim))
        return [tuple(r) for r in rows], pivots

    def reduce(self, functional: Sequence) -> Vector:
        """Canonical representative of a functional modulo the annihilator."""
        f = list(vec(functional))
        if len(f) != self.dim:
            raise ModelError(f"functional of length {len(f)} on a {self.dim}-dimensional space")
        rows, pivots = self._annihilator
        for k, p in zip(rows, pivots):
            c = f[p]
            if c:
                for j, x in enumerate(k):
                    if x:
                        f[j] -= c * x
        return tuple(f)

    def same_functional(self, f: Sequence, g: Sequence) -> bool:
        return self.reduce(f) == self.reduce(g)

    def contains(self, x: Sequence) -> bool:
        return bool(self.geometry.contains(x))

    def barycenter(self) -> Vector:
        vs = self.vertices
        return tuple(sum(col, ZERO) / len(vs) for col in zip(*vs))

    def is_vertex(self, x: Sequence) -> bool:
        return vec(x) in set(self.vertices)

    def is_simplex(self) -> bool:
        return self.geometry.is_simplex()

    @property
    def unit_effect(self) -> "Effect":
        return Effect(self.reduce(self.unit), self)

    def effect(self, functional: Sequence, check: bool = True) -> "Effect":
        e = Effect(self.reduce(functional), self)
        if check and not e.is_valid():
            raise ModelError(f"functional {tuple(functional)} is not an effect (leaves [0, u])")
        return e

    def coordinate_effect(self, label: str) -> "Effect":
        return self.effect(unit_vector(self.dim, self.labels.index(label)))

    def __repr__(self) -> str:
        tag = f"{self.name!r}, " if self.name else ""
        return f"StateSpace({tag}dim={self.dim}, vertices={len(self.vertices)}, effect_dim={self.effect_dim})"


def state_space_from_test_space(t: TestSpace, name: str = "") -> StateSpace:
    """Probability assignments summing to 1 on every test."""
    n = len(t.outcomes)
    ineqs = []
    for i in range(n):
        ineqs.append((unit_vector(n, i), ZERO))
        ineqs.append((scale(-1, unit_vector(n, i)), -ONE))
    eqs = [(t.indicator(test), ONE) for test in t.tests]
    geom = Polytope.from_inequalities(n, ineqs, eqs)
    if not geom.vertices:
        names = list(t.outcomes)
        cons = [ge({x: 1}, 0) for x in names] + [eq({x: 1 for x in test}, 1) for test in t.tests]
        res = lp_feasible(cons)
        raise EmptyStateSpaceError("test space admits no state", res.certificate)
    return StateSpace(geom, t.indicator(t.tests[0]), labels=t.outcomes, test_space=t, name=name)


def state_space_from_polytope(poly: Polytope, unit: Sequence | None = None,
                              labels: Sequence[str] | None = None, name: str = "") -> StateSpace:
    """Wrap a polytope as a state space.

    Without an explicit unit the coordinates are homogenized to (1, x) and
    the unit is the first coordinate.
    """
    if unit is not None:
        return StateSpace(poly, unit, labels=labels, name=name)
    d = poly.dim
    verts = [(ONE,) + tuple(v) for v in poly.vertices]
    geom = Polytope(d + 1, vertices=verts)
    lab = ("1",) + (tuple(labels) if labels is not None else tuple(f"x{i}" for i in range(d)))
    return StateSpace(geom, unit_vector(d + 1, 0), labels=lab, name=name)


def simplex_space(n: int, labels: Sequence[str] | None = None, name: str = "") -> StateSpace:
    """The classical simplex of probability vectors on n outcomes."""
    labels = tuple(labels) if labels is not None else tuple(f"e{i}" for i in range(n))
    return state_space_from_test_space(TestSpace(labels, [labels]), name=name or f"simplex{n}")


# ---------------------------------------------------------------------------
# effects and observables


@dataclass(frozen=True)
class Effect:
    functional: Vector
    home: StateSpace = field(compare=False, repr=False)

    def __call__(self, state: Sequence) -> Fraction:
        return dot(self.functional, vec(state))

    def values(self) -> tuple:
        return tuple(self(v) for v in self.home.vertices)

    def is_valid(self) -> bool:
        return all(0 <= x <= 1 for x in self.values())

    def __add__(self, other: "Effect") -> "Effect":
        return Effect(self.home.reduce(add(self.functional, other.functional)), self.home)

    def __sub__(self, other: "Effect") -> "Effect":
        return Effect(self.home.reduce(sub(self.functional, other.functional)), self.home)

    def scaled(self, c) -> "Effect":
        return Effect(self.home.reduce(scale(c, self.functional)), self.home)


@dataclass(frozen=True)
class Observable:
    effects: tuple
    home: StateSpace = field(compare=False, repr=False)

    def __post_init__(self):
        if not self.effects:
            raise ModelError("an observable needs at least one effect")
        for e in self.effects:
            if not e.is_valid():
                raise ModelError(f"observable entry {e.functional} is not an effect")
        total = combination([ONE] * len(self.effects), [e.functional for e in self.effects])
        if not self.home.same_functional(total, self.home.unit):
            raise ModelError("observable effects do not sum to the unit")

    @classmethod
    def from_functionals(cls, home: StateSpace, functionals: Sequence[Sequence]) -> "Observable":
        return cls(tuple(Effect(home.reduce(f), home) for f in functionals), home)

    def __len__(self) -> int:
        return len(self.effects)

    def probabilities(self, state: Sequence) -> tuple:
        return tuple(e(state) for e in self.effects)

    def functionals(self) -> tuple:
        return tuple(e.functional for e in self.effects)


def effect_rank(home: StateSpace, functionals: Sequence[Sequence]) -> int:
    """Rank of a functional family as affine functionals on the states."""
    if not functionals:
        return 0
    return vectors_rank([[f[j] for j in home.free_columns] for f in (home.reduce(x) for x in functionals)])


def is_informationally_complete(f: Observable) -> bool:
    return effect_rank(f.home, f.functionals()) == f.home.effect_dim


def effect_cone_extreme_rays(s: StateSpace) -> Cone:
    """Extreme rays of the cone of functionals nonnegative on ``s``.

    These are the facet functionals ``n - o*u`` of the state polytope, or
    just ``u`` when the state space is a single point.
    """
    rays = set()
    target = s.effect_dim - 1
    for n, o in s.geometry.inequalities:
        f = s.reduce(sub(n, scale(o, s.unit)))
        if is_zero(f):
            continue
        # a given H-description may carry redundant rows; keep only facets
        if vectors_rank([v for v in s.vertices if dot(f, v) == 0]) == target:
            rays.add(primitive(f))
    if not rays:
        rays.add(primitive(s.reduce(s.unit)))
    return Cone(s.dim, tuple(sorted(rays)))


def minimal_ic_observable(s: StateSpace) -> Observable:
    """A basis of A(Omega) consisting of effects that sum to the unit.

    Start from coordinate functionals completing ``u`` to a basis, replace
    the last one by ``u`` minus the others so the family sums to ``u``, and
    shift-rescale every member by the most negative vertex value.
    """
    n = s.effect_dim
    u = s.reduce(s.unit)
    if n == 1:
        return Observable((Effect(u, s),), s)
    basis: list[Vector] = []
    for j in range(s.dim):
        cand = s.reduce(unit_vector(s.dim, j))
        if effect_rank(s, basis + [cand, u]) == len(basis) + 2:
            basis.append(cand)
            if len(basis) == n - 1:
                break
    if len(basis) != n - 1:
        raise ModelError("could not complete the unit to a basis from coordinate functionals")
    last = u
    for b in basis:
        last = sub(last, b)
    basis.append(s.reduce(last))
    c = min(dot(b, v) for b in basis for v in s.vertices)
    denom = 1 - n * c
    effects = [s.reduce(scale(1 / denom, sub(b, scale(c, u)))) for b in basis]
    return Observable.from_functionals(s, effects)


# ---------------------------------------------------------------------------
# affine maps


class AffineMap:
    """A unit- and state-preserving affine map, as a matrix on coordinates."""

    def __init__(self, source: StateSpace, target: StateSpace, matrix, check: bool = True):
        m = matrix if isinstance(matrix, Matrix) else Matrix(matrix, ncols=source.dim)
        if m.shape != (target.dim, source.dim):
            raise ModelError(f"map matrix has shape {m.shape}, expected {(target.dim, source.dim)}")
        self.source = source
        self.target = target
        self.matrix = Matrix([source.reduce(r) for r in m.rows], ncols=source.dim)
        if check:
            self.validate()

    def __call__(self, x: Sequence) -> Vector:
        return self.matrix.apply(vec(x))

    def validate(self) -> None:
        for v in self.source.vertices:
            w = self(v)
            if dot(self.target.unit, w) != 1:
                raise ModelError(f"map does not preserve the unit at vertex {v}")
            if not self.target.contains(w):
                raise ModelError(f"map sends vertex {v} outside the target state space")

    def compose(self, inner: "AffineMap", check: bool = False) -> "AffineMap":
        """``self`` after ``inner``."""
        return AffineMap(inner.source, self.target, self.matrix @ inner.matrix, check=check)

    def __matmul__(self, inner: "AffineMap") -> "AffineMap":
        return self.compose(inner)

    def __eq__(self, other) -> bool:
        return (isinstance(other, AffineMap) and self.source is other.source
                and self.target is other.target and self.matrix == other.matrix)

    def __hash__(self) -> int:
        return hash(self.matrix.rows)

    def image_vertices(self) -> tuple:
        return tuple(self(v) for v in self.source.vertices)

    def is_injective(self) -> bool:
        """Injective on the states (equivalently on their span)."""
        basis, _ = self.source.span_basis
        return vectors_rank([self(b) for b in basis]) == len(basis)

    def is_identity(self) -> bool:
        return all(self(v) == v for v in self.source.vertices)

    def __repr__(self) -> str:
        return f"AffineMap({self.source.dim} -> {self.target.dim})"


def identity_map(s: StateSpace) -> AffineMap:
    return AffineMap(s, s, Matrix.identity(s.dim), check=False)


def constant_map(source: StateSpace, target: StateSpace, state: Sequence) -> AffineMap:
    """omega -> state, written as state * u^T."""
    state = vec(state)
    if not target.contains(state):
        raise ModelError("constant value is not a state of the target")
    return AffineMap(source, target, Matrix([scale(x, source.unit) for x in state], ncols=source.dim), check=False)


def map_from_vertex_images(source: StateSpace, target: StateSpace, images: Sequence[Sequence]) -> AffineMap:
    """The affine map determined by images of the source vertices.

    The vertices must be linearly independent (a simplex), otherwise the
    images need not define an affine map.
    """
    vs = source.vertices
    if len(images) != len(vs):
        raise ModelError("need exactly one image per source vertex")
    if vectors_rank(vs) != len(vs):
        raise ModelError("source vertices are not affinely independent; use an explicit matrix")
    # solve L v_k = w_k row by row: each row r satisfies r . v_k = w_k[row]
    V = Matrix(vs, ncols=source.dim)
    rows = []
    for i in range(target.dim):
        sol = solve_affine(V, [vec(w)[i] for w in images])
        rows.append(sol.particular)
    return AffineMap(source, target, Matrix(rows, ncols=source.dim))


def dual_map(f: Observable) -> AffineMap:
    """omega -> (F_x(omega))_x into the simplex on the observable's outcomes."""
    k = len(f)
    target = simplex_space(k, labels=[f"F{i}" for i in range(k)])
    return AffineMap(f.home, target, Matrix(list(f.functionals()), ncols=f.home.dim))


def measure_and_prepare(f: Observable, prepared: Sequence[Sequence], target: StateSpace) -> AffineMap:
    """omega -> sum_i a_i(omega) delta_i."""
    if len(prepared) != len(f):
        raise ModelError(f"{len(prepared)} prepared states for {len(f)} effects")
    prepared = [vec(p) for p in prepared]
    for p in prepared:
        if not target.contains(p):
            raise ModelError(f"prepared state {p} is not in the target")
    m = Matrix.zero(target.dim, f.home.dim)
    for e, p in zip(f.effects, prepared):
        m = m + Matrix([scale(x, e.functional) for x in p], ncols=f.home.dim)
    return AffineMap(f.home, target, m, check=False)


def pull_back(m: AffineMap, f: Observable) -> Observable:
    """Effects a_i composed with the map: the row vector a_i times the matrix."""
    if f.home is not m.target:
        raise ModelError("observable does not live on the map's target")
    cols = m.matrix.columns
    return Observable.from_functionals(m.source, [tuple(dot(a, c) for c in cols) for a in f.functionals()])


def outer_state(a: Sequence, b: Sequence) -> Vector:
    return outer(vec(a), vec(b))


def barycentric(vertices: Sequence[Sequence], x: Sequence) -> Vector | None:
    """Unique coefficients t with sum t_i v_i = x, or None if x is outside the span.

    The vertices must be linearly independent.
    """
    if not vertices:
        return None
    sol = solve_affine(Matrix.from_columns([vec(v) for v in vertices]), vec(x))
    if sol is None:
        return None
    if sol.nullspace:
        raise ModelError("vertices are linearly dependent")
    return sol.particular


__all__ = [
    "AffineMap",
    "Effect",
    "EmptyStateSpaceError",
    "ModelError",
    "Observable",
    "StateSpace",
    "TestSpace",
    "barycentric",
    "constant_map",
    "dual_map",
    "effect_cone_extreme_rays",
    "effect_rank",
    "identity_map",
    "is_informationally_complete",
    "map_from_vertex_images",
    "measure_and_prepare",
    "minimal_ic_observable",
    "pull_back",
    "simplex_space",
    "state_space_from_polytope",
    "state_space_from_test_space",
]

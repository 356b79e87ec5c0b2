"""Maximal and minimal tensor products, marginals, conditionals and entanglement.

A bipartite state is stored on the row-major grid of factor coordinates:
entry ``i * n2 + j`` pairs coordinate ``i`` of the first factor with
coordinate ``j`` of the second, so product states are flattened outer
products and the unit is ``u (x) u'``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact import ONE, ZERO, Matrix, Vector, dot, outer, unit_vector, vec, vectors_rank
from .model import AffineMap, Effect, ModelError, StateSpace, effect_cone_extreme_rays
from .polytope import Polytope, lp_feasible, membership_constraints

logger = logging.getLogger(__name__)

MAXIMAL = "maximal"
MINIMAL = "minimal"
INTERMEDIATE = "intermediate"


class UndefinedConditionalError(ZeroDivisionError):
    """Conditioning on an effect of probability zero."""


class TensorSpace(StateSpace):
    """A composite of two state spaces on the flattened coordinate grid."""

    def __init__(self, geometry: Polytope, factors: tuple, kind: str, name: str = ""):
        a, b = factors
        labels = tuple(f"{x}&{y}" for x in a.labels for y in b.labels)
        # vertices are enumerated lazily: the span is known from the product states
        super().__init__(geometry, outer(a.unit, b.unit), labels=labels, name=name, validate=False)
        self.factors = (a, b)
        self.kind = kind

    def spanning_points(self) -> tuple:
        a, b = self.factors
        return tuple(outer(v, w) for v in a.spanning_points() for w in b.spanning_points())

    def contains(self, x: Sequence) -> bool:
        if self.kind == MINIMAL and "_hrep" not in self.geometry.__dict__:
            return not separable_decomposition(x, self).entangled
        return bool(self.geometry.contains(x))

    @property
    def shape(self) -> tuple[int, int]:
        return self.factors[0].dim, self.factors[1].dim

    def grid(self, point: Sequence) -> list[list[Fraction]]:
        n, m = self.shape
        p = vec(point)
        return [list(p[i * m:(i + 1) * m]) for i in range(n)]

    def marginal1(self, point: Sequence) -> Vector:
        u2 = self.factors[1].unit
        return tuple(dot(row, u2) for row in self.grid(point))

    def marginal2(self, point: Sequence) -> Vector:
        u1 = self.factors[0].unit
        g = self.grid(point)
        return tuple(sum((u1[i] * g[i][j] for i in range(len(g)) if u1[i]), ZERO) for j in range(self.shape[1]))

    def pair_value(self, point: Sequence, f: Sequence, g: Sequence) -> Fraction:
        """omega(f, g) for functionals f on the first and g on the second factor."""
        return dot(outer(vec(f), vec(g)), vec(point))

    def is_symmetric_square(self) -> bool:
        return self.factors[0] is self.factors[1]

    def __repr__(self) -> str:
        return (f"TensorSpace({self.kind}, shape={self.shape}, vertices={len(self.vertices)}, "
                f"affine_dim={self.geometry.affine_dim})")


@dataclass(frozen=True)
class BipartiteState:
    point: Vector
    space: TensorSpace = field(compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "point", vec(self.point))
        if len(self.point) != self.space.dim:
            raise ModelError("bipartite state has the wrong number of coordinates")


def max_tensor_hrep(a: StateSpace, b: StateSpace) -> tuple[list, list]:
    """Inequalities and equalities of the maximal product on the n*m grid."""
    n, m = a.dim, b.dim
    ra = effect_cone_extreme_rays(a).extreme_rays
    rb = effect_cone_extreme_rays(b).extreme_rays
    ineqs = [(outer(r, s), ZERO) for r in ra for s in rb]
    eqs = [(outer(a.unit, b.unit), ONE)]
    for k in a.annihilator:
        eqs.extend((outer(k, unit_vector(m, j)), ZERO) for j in range(m))
    for k in b.annihilator:
        eqs.extend((outer(unit_vector(n, i), k), ZERO) for i in range(n))
    logger.debug("max tensor: %d positivity rows, %d equalities", len(ineqs), len(eqs))
    return ineqs, eqs


def max_tensor(a: StateSpace, b: StateSpace, name: str = "") -> TensorSpace:
    """Normalized functionals positive on every pair of extreme effect rays."""
    ineqs, eqs = max_tensor_hrep(a, b)
    geom = Polytope.from_inequalities(a.dim * b.dim, ineqs, eqs)
    return TensorSpace(geom, (a, b), MAXIMAL, name=name)


def min_tensor(a: StateSpace, b: StateSpace, name: str = "") -> TensorSpace:
    """Convex hull of product states (products of vertices are all extreme)."""
    verts = [outer(v, w) for v in a.vertices for w in b.vertices]
    geom = Polytope(a.dim * b.dim, vertices=verts, extreme=True)
    return TensorSpace(geom, (a, b), MINIMAL, name=name)


def intermediate_tensor(a: StateSpace, b: StateSpace, geometry: Polytope, name: str = "") -> TensorSpace:
    """A user-supplied composite, validated to sit between the minimal and maximal products."""
    if geometry.dim != a.dim * b.dim:
        raise ModelError("intermediate product has the wrong coordinate count")
    for v in a.vertices:
        for w in b.vertices:
            if not geometry.contains(outer(v, w)):
                raise ModelError(f"product state {outer(v, w)} is missing from the supplied composite")
    big = max_tensor(a, b)
    for x in geometry.vertices:
        if not big.geometry.contains(x):
            raise ModelError(f"vertex {x} lies outside the maximal product")
    return TensorSpace(geometry, (a, b), INTERMEDIATE, name=name)


def tensor_power(s: StateSpace, k: int, kind: str = MAXIMAL) -> StateSpace:
    """Left-associated k-fold product (((s (x) s) (x) s) ...)."""
    if k < 1:
        raise ValueError("tensor power needs k >= 1")
    build = max_tensor if kind == MAXIMAL else min_tensor
    out = s
    for _ in range(k - 1):
        out = build(out, s)
    return out


def product_state(alpha: Sequence, beta: Sequence, space: TensorSpace) -> BipartiteState:
    a, b = space.factors
    alpha, beta = vec(alpha), vec(beta)
    if not a.contains(alpha):
        raise ModelError("first factor state is not in its state space")
    if not b.contains(beta):
        raise ModelError("second factor state is not in its state space")
    return BipartiteState(outer(alpha, beta), space)


def marginals(omega: BipartiteState) -> tuple[Vector, Vector]:
    t = omega.space
    return t.marginal1(omega.point), t.marginal2(omega.point)


def conditional(omega: BipartiteState, effect: Effect | Sequence, side: int = 1) -> Vector:
    """Conditional state of the other factor given ``effect`` on factor ``side``.

    ``side=1`` returns omega_{2,a}; ``side=2`` returns omega_{1,b}.
    """
    t = omega.space
    f = effect.functional if isinstance(effect, Effect) else vec(effect)
    g = t.grid(omega.point)
    n, m = t.shape
    if side == 1:
        p = dot(f, t.marginal1(omega.point))
        if p == 0:
            raise UndefinedConditionalError("effect has probability zero in the first marginal")
        return tuple(sum((f[i] * g[i][j] for i in range(n) if f[i]), ZERO) / p for j in range(m))
    if side == 2:
        p = dot(f, t.marginal2(omega.point))
        if p == 0:
            raise UndefinedConditionalError("effect has probability zero in the second marginal")
        return tuple(dot(g[i], f) / p for i in range(n))
    raise ValueError("side must be 1 or 2")


def swap(omega: BipartiteState) -> BipartiteState:
    t = omega.space
    a, b = t.factors
    if a is not b and (a.dim != b.dim or a.vertices != b.vertices):
        raise ModelError("swap needs identical factors")
    n, m = t.shape
    g = t.grid(omega.point)
    return BipartiteState(tuple(g[i][j] for j in range(m) for i in range(n)), t)


def swap_matrix(n: int) -> Matrix:
    """Permutation matrix of the transpose on the n x n grid."""
    N = n * n
    rows = []
    for i in range(n):
        for j in range(n):
            rows.append(unit_vector(N, j * n + i))
    return Matrix(rows, ncols=N)


def kron(A: Matrix, B: Matrix) -> Matrix:
    rows = []
    for ra in A.rows:
        for rb in B.rows:
            rows.append(tuple(x * y for x in ra for y in rb))
    return Matrix(rows, ncols=A.ncols * B.ncols)


def tensor_map(phi: AffineMap, psi: AffineMap, source: TensorSpace, target: TensorSpace,
               check: bool = True) -> AffineMap:
    """phi (x) psi acting on the coordinate grid, validated on the source vertices."""
    return AffineMap(source, target, kron(phi.matrix, psi.matrix), check=check)


@dataclass(frozen=True)
class SeparabilityResult:
    """Either convex weights over product vertices, or a separating inequality."""

    entangled: bool
    weights: dict | None = None  # product-vertex index -> weight
    separating: tuple | None = None  # (normal, offset): normal . x >= offset on separable states
    certificate: object = None

    def __bool__(self) -> bool:
        return self.entangled


def separable_decomposition(point: Sequence, t_min: TensorSpace) -> SeparabilityResult:
    point = vec(point)
    verts = t_min.vertices
    exprs = [({}, x) for x in point]
    cons = membership_constraints(t_min.geometry, exprs, "w", use_vertices=True)
    res = lp_feasible(cons)
    if res.feasible:
        weights = {k: res.witness[("w", k)] for k in range(len(verts)) if res.witness.get(("w", k))}
        return SeparabilityResult(False, weights=weights, certificate=res)
    # coordinate rows read -sum_k p_k lambda_k = -point; their multipliers h give
    # h . p_k >= y_sum for every product vertex and h . point < y_sum
    y = res.certificate
    nv = len(verts)
    y_sum = y.get(nv, ZERO)
    normal = tuple(y.get(nv + 1 + i, ZERO) for i in range(len(point)))
    sep = (normal, y_sum)
    return SeparabilityResult(True, separating=sep, certificate=res)


def is_entangled(omega: BipartiteState, t_min: TensorSpace | None = None) -> SeparabilityResult:
    t = omega.space
    if t_min is None:
        t_min = t if t.kind == MINIMAL else min_tensor(*t.factors)
    if t_min.factors[0].vertices != t.factors[0].vertices or t_min.factors[1].vertices != t.factors[1].vertices:
        raise ModelError("minimal product does not match the state's factors")
    return separable_decomposition(omega.point, t_min)


@dataclass
class PureMarginalReport:
    checked: int = 0
    pure_marginal: int = 0
    vacuous: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_pure_marginal_lemma(t: TensorSpace) -> PureMarginalReport:
    """A vertex with an extreme marginal must equal the product of its marginals."""
    a, b = t.factors
    va, vb = set(a.vertices), set(b.vertices)
    rep = PureMarginalReport()
    for v in t.vertices:
        rep.checked += 1
        w1, w2 = t.marginal1(v), t.marginal2(v)
        if w1 in va or w2 in vb:
            rep.pure_marginal += 1
            if outer(w1, w2) != v:
                rep.violations.append(v)
        else:
            rep.vacuous += 1
    return rep


@dataclass
class MonogamyReport:
    pair_state: Vector
    slice_vertices: tuple
    expected: tuple
    non_product: list

    @property
    def ok(self) -> bool:
        return not self.non_product and self.slice_vertices == self.expected


def monogamy_slice(pair_space: StateSpace, third: StateSpace, pair_state: Sequence) -> MonogamyReport:
    """Extreme points of ``pair_space (x) third`` (maximal) whose first marginal is fixed.

    Only the affine slice is enumerated, never the full three-party product.
    When ``pair_state`` is extreme in ``pair_space`` every point of the slice
    is ``pair_state (x) omega3``.
    """
    pair_state = vec(pair_state)
    n, m = pair_space.dim, third.dim
    ineqs, eqs = max_tensor_hrep(pair_space, third)
    for i in range(n):
        row = [ZERO] * (n * m)
        for j in range(m):
            row[i * m + j] = third.unit[j]
        eqs.append((tuple(row), pair_state[i]))
    verts = Polytope.from_inequalities(n * m, ineqs, eqs).vertices
    non_product = []
    for v in verts:
        g = [v[i * m:(i + 1) * m] for i in range(n)]
        w3 = tuple(sum((pair_space.unit[i] * g[i][j] for i in range(n)), ZERO) for j in range(m))
        if outer(pair_state, w3) != v:
            non_product.append(v)
    expected = tuple(sorted(outer(pair_state, w) for w in third.vertices))
    return MonogamyReport(pair_state, verts, expected, non_product)


def affine_dims_agree(a: StateSpace, b: StateSpace) -> tuple[int, int]:
    return max_tensor(a, b).geometry.affine_dim, min_tensor(a, b).geometry.affine_dim


def product_rank(t: TensorSpace) -> int:
    return vectors_rank(list(t.vertices))

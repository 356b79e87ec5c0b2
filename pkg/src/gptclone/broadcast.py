"""Broadcasting: marginal maps, fixed-point sets, compressions and the broadcast simplex.

For an affine ``B`` from a state space into its tensor square, a state is
broadcast when both marginal maps fix it.  :func:`broadcast_set` runs the
full reduction: symmetrize ``B``, take the fixed set ``Gamma'`` of the
symmetrized marginal, distinguish its vertices, build the restriction map
and the two stochastic matrices on ``Gamma'``'s vertices, and compute the
exact broadcast set ``Gamma`` as an affine section of ``Gamma'``.  Every
structural claim along the way is checked and recorded.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from .clone import Decision, DistinguishingObservable, find_distinguishing_observable, image_constraints
from .exact import (
    ONE,
    ZERO,
    Matrix,
    Vector,
    combination,
    inverse,
    nullspace_basis,
    outer,
    rref,
    scale,
    solve_affine,
    sub,
    vec,
)
from .model import AffineMap, Observable, StateSpace, barycentric
from .polytope import Polytope, eq, lp_feasible
from .stochastic import IntersectionResult, StochasticMatrix, intersect_fixed_spaces
from .tensor import TensorSpace, kron, max_tensor, swap_matrix

logger = logging.getLogger(__name__)

HALF = ONE / 2


class TheoremViolation(AssertionError):
    """A structural guarantee failed on a concrete instance."""

    def __init__(self, failed: Sequence[str], analysis=None):
        super().__init__("failed checks: " + ", ".join(failed))
        self.failed = tuple(failed)
        self.analysis = analysis


def _square_target(B: AffineMap) -> tuple[StateSpace, TensorSpace]:
    t = B.target
    if not isinstance(t, TensorSpace):
        raise TypeError("map must land in a tensor product")
    a, b = t.factors
    s = B.source
    if a.dim != s.dim or b.dim != s.dim or a.vertices != s.vertices or b.vertices != s.vertices:
        raise ValueError("map must land in the tensor square of its source")
    return s, t


def marginal_matrices(s: StateSpace) -> tuple[Matrix, Matrix]:
    """Matrices taking grid coordinates to the first and second marginals."""
    n = s.dim
    m1 = [[ZERO] * (n * n) for _ in range(n)]
    m2 = [[ZERO] * (n * n) for _ in range(n)]
    for i in range(n):
        for j in range(n):
            m1[i][i * n + j] = s.unit[j]
            m2[j][i * n + j] = s.unit[i]
    return Matrix(m1, ncols=n * n), Matrix(m2, ncols=n * n)


def marginal_maps(B: AffineMap) -> tuple[AffineMap, AffineMap]:
    s, _ = _square_target(B)
    m1, m2 = marginal_matrices(s)
    return AffineMap(s, s, m1 @ B.matrix), AffineMap(s, s, m2 @ B.matrix)


def symmetrize(B: AffineMap) -> AffineMap:
    """(B + swap o B) / 2."""
    s, t = _square_target(B)
    sw = swap_matrix(s.dim) @ B.matrix
    return AffineMap(s, t, (B.matrix + sw) * HALF)


def fixed_point_polytope(A: AffineMap) -> Polytope:
    """The states fixed by an affine self-map (possibly empty)."""
    s = A.source
    n = s.dim
    eqs = list(s.geometry.equalities)
    I = Matrix.identity(n)
    for r in (A.matrix - I).rows:
        if any(r):
            eqs.append((r, ZERO))
    return Polytope.from_inequalities(n, s.geometry.inequalities, eqs)


def cesaro_compression(A: AffineMap) -> AffineMap:
    """Projection onto the fixed points of ``A`` along the range of ``I - A``.

    Computed on the span of the states, where ``A`` is power bounded, so the
    projection coincides with the limit of the averages of the powers of A.
    """
    s = A.source
    basis, pivots = s.span_basis
    r = len(basis)
    # matrix of A in the span basis: column k holds the pivot coordinates of A b_k
    images = [A(b) for b in basis]
    AV = Matrix([[images[k][p] for k in range(r)] for p in pivots], ncols=r)
    D = Matrix.identity(r) - AV
    K = nullspace_basis(D)
    R = [tuple(row) for row in rref(D.T)[0]] if any(any(x) for x in D.rows) else []
    if len(K) + len(R) != r:
        raise ArithmeticError("fixed space and range of I - A do not complement each other")
    C = Matrix.from_columns(list(K) + list(R), nrows=r) if r else Matrix((), ncols=0)
    Cinv = inverse(C)
    keep = Matrix([[ONE if (i == j and i < len(K)) else ZERO for j in range(r)] for i in range(r)], ncols=r)
    PV = C @ keep @ Cinv
    Bm = Matrix.from_columns(basis, nrows=s.dim)
    S = Matrix([[ONE if c == p else ZERO for c in range(s.dim)] for p in pivots], ncols=s.dim)
    return AffineMap(s, s, Bm @ PV @ S)


def _polytope_from_points(dim: int, points: Sequence[Sequence]) -> Polytope:
    return Polytope(dim, vertices=list(points)) if points else Polytope.empty(dim)


@dataclass
class BroadcastAnalysis:
    input_map: AffineMap
    symmetrized: AffineMap
    marginal_maps: tuple  # (B1, B2)
    symmetric_marginal: AffineMap  # B'_1
    gamma_prime: Polytope
    distinguishing: DistinguishingObservable | None
    merged_observable: Observable | None
    restriction: AffineMap | None
    stochastics: tuple  # (M1, M2), columns indexed by the vertices of Gamma'
    stochastic_result: IntersectionResult | None
    stochastic_candidate: Polytope  # states fixed by M1 and M2 mapped back through Gamma'
    gamma: Polytope
    compression: AffineMap | None
    vertex_coordinate_gamma: Polytope | None = None  # vertex-coordinate route when the state space is a simplex
    oracle_gamma: Polytope | None = None
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]


def _section_of_simplex(alphas: Sequence[Vector], B1: AffineMap, dim: int) -> Polytope:
    """States sum t_i alpha_i (t in the simplex) with B1 fixing them."""
    k = len(alphas)
    ineqs = [(tuple(ONE if j == i else ZERO for j in range(k)), ZERO) for i in range(k)]
    eqs = [((ONE,) * k, ONE)]
    diffs = [sub(B1(a), a) for a in alphas]
    for c in range(dim):
        row = tuple(d[c] for d in diffs)
        if any(row):
            eqs.append((row, ZERO))
    section = Polytope.from_inequalities(k, ineqs, eqs)
    pts = [combination(list(t), list(alphas)) for t in section.vertices]
    return _polytope_from_points(dim, pts)


def _vertex_coordinate_route(s: StateSpace, B1: AffineMap, B2: AffineMap) -> Polytope:
    """On a simplex both marginal maps are stochastic in vertex coordinates."""
    vs = s.vertices

    def stoch(A: AffineMap) -> StochasticMatrix:
        cols = [barycentric(vs, A(v)) for v in vs]
        return StochasticMatrix([[cols[j][i] for j in range(len(vs))] for i in range(len(vs))])

    res = intersect_fixed_spaces(stoch(B1), stoch(B2))
    pts = [combination(list(v), list(vs)) for v in res.basis]
    return _polytope_from_points(s.dim, pts)


def broadcast_oracle(B: AffineMap) -> Polytope:
    """Fixed set of B1 intersected with that of B2, by direct linear algebra."""
    B1, B2 = marginal_maps(B)
    s = B.source
    I = Matrix.identity(s.dim)
    eqs = list(s.geometry.equalities)
    for A in (B1, B2):
        eqs.extend((r, ZERO) for r in (A.matrix - I).rows if any(r))
    return Polytope.from_inequalities(s.dim, s.geometry.inequalities, eqs)


def _jointly_distinguishable(points: Sequence[Vector], s: StateSpace) -> bool:
    if not points:
        return True
    return find_distinguishing_observable(points, s).feasible


def broadcast_set(B: AffineMap, strict: bool = True, oracle: bool = True) -> BroadcastAnalysis:
    """Exact set of states broadcast by ``B``, with every intermediate object.

    With ``strict`` any failed structural check raises :class:`TheoremViolation`.
    """
    s, t = _square_target(B)
    B1, B2 = marginal_maps(B)
    Bs = symmetrize(B)
    Bs1 = AffineMap(s, s, (B1.matrix + B2.matrix) * HALF)
    gp = fixed_point_polytope(Bs1)
    alphas = list(gp.vertices)
    checks: dict = {}
    dist = merged = restr = P = None
    stoch = ()
    sres = None
    if not alphas:
        # cannot happen for maps of a compact convex set into itself; kept as a guard
        empty = Polytope.empty(s.dim)
        gamma = candidate = empty
        checks["gamma_prime_nonempty"] = False
    else:
        checks["gamma_prime_simplex"] = gp.is_simplex()
        d = find_distinguishing_observable(alphas, s)
        checks["gamma_prime_distinguishable"] = d.feasible
        if d.feasible:
            dist = d.value
            eff = [e.functional for e in dist.observable.effects]
            merged_f = [s.reduce(combination([ONE, ONE], [eff[0], eff[1]]))] + eff[2:]
            merged = Observable.from_functionals(s, merged_f)
            rm = Matrix.zero(s.dim, s.dim)
            for f, a in zip(merged_f, alphas):
                rm = rm + Matrix([scale(x, f) for x in a], ncols=s.dim)
            restr = AffineMap(s, s, rm)

            def column_matrix(A: AffineMap) -> StochasticMatrix:
                cols = [[dot_f(f, A(a)) for f in merged_f] for a in alphas]
                k = len(alphas)
                return StochasticMatrix([[cols[j][i] for j in range(k)] for i in range(k)])

            M1, M2 = column_matrix(B1), column_matrix(B2)
            stoch = (M1, M2)
            sres = intersect_fixed_spaces(M1, M2)
            candidate = _polytope_from_points(s.dim, [combination(list(v), alphas) for v in sres.basis])
            gamma = _section_of_simplex(alphas, B1, s.dim)
        else:
            candidate = gamma = broadcast_oracle(B)
        # compression onto Gamma' and the embedding of Gamma' (x) Gamma'
        P = cesaro_compression(Bs1)
        checks["compression_idempotent"] = (P.matrix @ P.matrix) == P.matrix
        checks["compression_range"] = all(gp.contains(P(v)) for v in s.vertices) and all(P(a) == a for a in alphas)
        if checks.get("gamma_prime_simplex"):
            PP = kron(P.matrix, P.matrix)
            checks["symmetric_map_clones_gamma_prime"] = all(PP.apply(Bs(a)) == outer(a, a) for a in alphas)
            prods = [outer(a, b) for a in alphas for b in alphas]
            emb = True
            for a in alphas:
                sol = solve_affine(Matrix.from_columns(prods), PP.apply(B(a)))
                if sol is None or sol.nullspace or any(c < 0 for c in sol.particular):
                    emb = False
            checks["compressed_map_into_gamma_prime_square"] = emb
    gv = list(gamma.vertices)
    checks["gamma_fixed_by_both"] = all(B1(x) == x and B2(x) == x for x in gv)
    checks["gamma_in_gamma_prime"] = all(gp.contains(x) for x in gv)
    checks["gamma_in_stochastic_candidate"] = all(candidate.contains(x) for x in gv)
    checks["gamma_simplex"] = gamma.is_simplex()
    checks["gamma_distinguishable"] = _jointly_distinguishable(gv, s)
    orc = None
    if oracle:
        orc = broadcast_oracle(B)
        checks["gamma_matches_oracle"] = orc.vertices == gamma.vertices
    app = None
    if s.is_simplex():
        app = _vertex_coordinate_route(s, B1, B2)
        checks["vertex_coordinate_route_agrees"] = app.vertices == gamma.vertices
    analysis = BroadcastAnalysis(
        input_map=B, symmetrized=Bs, marginal_maps=(B1, B2), symmetric_marginal=Bs1,
        gamma_prime=gp, distinguishing=dist, merged_observable=merged, restriction=restr,
        stochastics=stoch, stochastic_result=sres, stochastic_candidate=candidate, gamma=gamma,
        compression=P, vertex_coordinate_gamma=app, oracle_gamma=orc, checks=checks,
    )
    if strict and not analysis.ok:
        raise TheoremViolation(analysis.failed(), analysis)
    return analysis


def dot_f(f: Sequence, x: Sequence):
    return sum((a * b for a, b in zip(f, x) if a and b), ZERO)


def find_broadcast_map(states: Sequence[Sequence], s: StateSpace, t: TensorSpace | None = None) -> Decision:
    """Decide whether one affine map broadcasts every given state."""
    states = [vec(x) for x in states]
    for x in states:
        if not s.contains(x):
            raise ValueError(f"{x} is not a state of the space")
    t = t if t is not None else max_tensor(s, s)
    cols = s.free_columns
    N = t.dim

    def image(x: Sequence) -> list:
        return [({("b", r, c): x[c] for c in cols if x[c]}, ZERO) for r in range(N)]

    m1, m2 = marginal_matrices(s)
    cons = []
    for alpha in states:
        img = image(alpha)
        for mm in (m1, m2):
            for i, row in enumerate(mm.rows):
                acc: dict = {}
                for r, w in enumerate(row):
                    if w:
                        for name, c in img[r][0].items():
                            acc[name] = acc.get(name, ZERO) + w * c
                cons.append(eq(acc, alpha[i]))
    cons.extend(image_constraints(t, s, image))
    res = lp_feasible(cons)
    if not res.feasible:
        return Decision(False, lp=res)
    rows = []
    for r in range(N):
        row = [ZERO] * s.dim
        for c in cols:
            row[c] = res.witness.get(("b", r, c), ZERO)
        rows.append(tuple(row))
    return Decision(True, AffineMap(s, t, Matrix(rows, ncols=s.dim)), lp=res)

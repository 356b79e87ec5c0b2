"""Random instance generators shared by the property and acceptance suites.

All randomness flows through an explicit ``random.Random`` so every run is
reproducible from its seed.
"""
from __future__ import annotations

import random
from fractions import Fraction as F

from gptclone.exact import combination, outer, scale, sub
from gptclone.model import AffineMap, Observable, StateSpace, measure_and_prepare, state_space_from_polytope
from gptclone.polytope import Polytope
from gptclone.stochastic import StochasticMatrix, fixed_point_basis, random_stochastic_matrix
from gptclone.tensor import TensorSpace


def random_polytope_space(rng: random.Random, max_vertices: int = 6, dim: int = 3, span: int = 4) -> StateSpace:
    """A full-dimensional polytope with at most ``max_vertices`` vertices, homogenized."""
    while True:
        k = rng.randint(dim + 1, max_vertices)
        pts = {tuple(F(rng.randint(-span, span), rng.randint(1, 2)) for _ in range(dim)) for _ in range(k)}
        p = Polytope.from_vertices(list(pts))
        if p.affine_dim == dim:
            return state_space_from_polytope(p)


def random_mixture(rng: random.Random, points, terms: int) -> tuple:
    pick = [rng.choice(points) for _ in range(terms)]
    w = [F(rng.randint(1, 4)) for _ in pick]
    total = sum(w)
    return combination([x / total for x in w], pick)


def random_state_subset(rng: random.Random, s: StateSpace, max_size: int = 4) -> list:
    """Distinct states, mostly vertices, sometimes mixtures of one to three vertices."""
    size = rng.randint(1, max_size)
    out: list = []
    while len(out) < size:
        if rng.random() < 0.7:
            x = rng.choice(s.vertices)
        else:
            x = random_mixture(rng, s.vertices, rng.randint(2, 3))
        if x not in out:
            out.append(x)
    return out


def random_observable(rng: random.Random, s: StateSpace, k: int) -> Observable:
    """Split each test's outcomes at random among k effects, then mix the tests."""
    ts = s.test_space
    lam = [F(rng.randint(0, 3)) for _ in ts.tests]
    if not any(lam):
        lam[0] = F(1)
    total = sum(lam)
    funcs = [[F(0)] * s.dim for _ in range(k)]
    for t, weight in zip(ts.tests, lam):
        for x in t:
            w = [F(rng.randint(0, 2)) for _ in range(k)]
            if not any(w):
                w[rng.randrange(k)] = F(1)
            tw = sum(w)
            idx = ts.index(x)
            for j in range(k):
                funcs[j][idx] += weight / total * w[j] / tw
    return Observable.from_functionals(s, [tuple(f) for f in funcs])


def _face(s: StateSpace, block) -> list:
    """Vertices giving probability one to the outcomes in ``block``."""
    idx = [s.test_space.index(x) for x in block]
    return [v for v in s.vertices if sum(v[i] for i in idx) == 1]


def _prepared_on_face(rng: random.Random, t: TensorSpace, face: list) -> tuple:
    """A bipartite state whose marginals both lie on ``face``."""
    alpha = random_mixture(rng, face, rng.randint(1, min(3, len(face))))
    roll = rng.random()
    if roll < 0.4:
        return outer(alpha, alpha)
    if roll < 0.7:
        # classical correlations over the face: both marginals are (v + w) / 2
        v, w = rng.choice(face), rng.choice(face)
        return combination([F(1, 2), F(1, 2)], [outer(v, v), outer(w, w)])
    # push the two marginals apart inside the face
    beta = rng.choice(face)
    other = sub(scale(2, alpha), beta)
    if all(x >= 0 for x in other) and t.contains(outer(beta, other)):
        return outer(beta, other)
    return outer(alpha, alpha)


def _coarse_grained_map(rng: random.Random, s: StateSpace, t: TensorSpace) -> AffineMap:
    """Measure a random coarse-graining of one test, prepare states on the matching faces."""
    outcomes = list(rng.choice(s.test_space.tests))
    rng.shuffle(outcomes)
    k = rng.randint(1, len(outcomes))
    cuts = sorted(rng.sample(range(1, len(outcomes)), k - 1))
    blocks = [outcomes[i:j] for i, j in zip([0] + cuts, cuts + [len(outcomes)])]
    obs = Observable.from_functionals(s, [s.test_space.indicator(b) for b in blocks])
    prepared = [_prepared_on_face(rng, t, _face(s, b)) for b in blocks]
    return measure_and_prepare(obs, prepared, t)


def random_broadcast_map(rng: random.Random, s: StateSpace, t: TensorSpace) -> AffineMap:
    """A state-preserving affine map from a test-space model into its tensor square.

    Mixes three families so that broadcast sets of every size occur:
    coarse-grained measure and prepare maps whose prepared marginals sit on
    the matching faces, fully random measure and prepare maps, and convex
    mixtures of two maps.
    """
    roll = rng.random()
    if roll < 0.6:
        return _coarse_grained_map(rng, s, t)
    k = rng.randint(1, 4)
    obs = random_observable(rng, s, k)
    pool = list(t.vertices)
    prepared = [random_mixture(rng, pool, rng.randint(1, 2)) for _ in range(k)]
    m = measure_and_prepare(obs, prepared, t)
    if roll < 0.8:
        return m
    other = random_broadcast_map(rng, s, t)
    lam = F(rng.randint(1, 3), 4)
    rows = [tuple(lam * x + (1 - lam) * y for x, y in zip(r1, r2))
            for r1, r2 in zip(m.matrix.rows, other.matrix.rows)]
    return AffineMap(s, t, rows)


def _random_column(rng: random.Random, n: int, support) -> list:
    w = [F(rng.randint(1, 4)) if k in support else F(0) for k in range(n)]
    total = sum(w)
    return [x / total for x in w]


def random_reducible_matrix(rng: random.Random, n: int) -> StochasticMatrix:
    """Several closed blocks with dense columns, plus transient indices leaking into them."""
    idx = list(range(n))
    rng.shuffle(idx)
    blocks = []
    while idx and (not blocks or rng.random() < 0.7):
        size = rng.randint(1, min(3, len(idx)))
        blocks.append({idx.pop() for _ in range(size)})
    cols: list = [None] * n
    for b in blocks:
        for k in b:
            cols[k] = _random_column(rng, n, b)
    for k in idx:
        support = {j for j in range(n) if rng.random() < 0.4} | {k}
        cols[k] = _random_column(rng, n, support)
    return StochasticMatrix([[cols[j][i] for j in range(n)] for i in range(n)])


def engineered_partner(rng: random.Random, M: StochasticMatrix) -> StochasticMatrix:
    """A second matrix sharing part of the fixed structure of ``M``.

    Closed classes of ``M`` are grouped at random; each group's union gets
    rank-one columns equal to a positive combination of the stationary
    vectors in the group (so the combination is a common fixed vector), or,
    now and then, an unrelated positive vector on the same union.  Remaining
    columns are random.
    """
    n = M.n
    fb = fixed_point_basis(M)
    order = list(range(len(fb.vectors)))
    rng.shuffle(order)
    cols: list = [None] * n
    while order:
        group = [order.pop() for _ in range(min(len(order), rng.randint(1, 3)))]
        if rng.random() < 0.2:
            continue
        union = sorted(k for a in group for k in fb.supports[a])
        if rng.random() < 0.2:
            w = _random_column(rng, n, set(union))
        else:
            lam = [F(rng.randint(1, 3)) for _ in group]
            total = sum(lam)
            w = [sum((l / total * fb.vectors[a][k] for l, a in zip(lam, group)), F(0)) for k in range(n)]
        for k in union:
            cols[k] = w
    for k in range(n):
        if cols[k] is None:
            support = {j for j in range(n) if rng.random() < 0.5} or {rng.randrange(n)}
            cols[k] = _random_column(rng, n, support)
    return StochasticMatrix([[cols[j][i] for j in range(n)] for i in range(n)])


def random_stochastic_pair(rng: random.Random, max_n: int = 8) -> tuple:
    """Independent, engineered, or equal pairs of reducible column-stochastic matrices."""
    n = rng.randint(1, max_n)
    if rng.random() < 0.5:
        M1 = random_reducible_matrix(rng, n)
    else:
        M1 = random_stochastic_matrix(n, rng, zero_density=rng.choice([0.5, 0.7, 0.85]))
    roll = rng.random()
    if roll < 0.25:
        return M1, random_stochastic_matrix(n, rng, zero_density=0.7)
    if roll < 0.35:
        return M1, M1
    M2 = engineered_partner(rng, M1)
    return (M1, M2) if rng.random() < 0.5 else (M2, M1)


__all__ = [
    "engineered_partner",
    "random_broadcast_map",
    "random_mixture",
    "random_observable",
    "random_polytope_space",
    "random_reducible_matrix",
    "random_stochastic_pair",
    "random_state_subset",
]

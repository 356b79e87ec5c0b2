"""Fixed points of column-stochastic matrices and of pairs of them.

The transition graph has an edge ``i -> j`` whenever ``M[i][j] > 0``.
Communicating classes are its strongly connected components; a class is
closed when its columns put no mass outside it.  Closed classes carry the
stationary vectors, which are disjointly supported and span ``ker(M - I)``.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import networkx as nx

from .exact import ONE, ZERO, Matrix, Vector, nullspace_basis, same_span, to_rational


class StochasticError(ValueError):
    pass


class StochasticMatrix:
    """Square matrix with nonnegative rational entries and unit column sums."""

    def __init__(self, rows: Sequence[Sequence]):
        m = rows if isinstance(rows, Matrix) else Matrix([[to_rational(x) for x in r] for r in rows])
        n = m.nrows
        if m.ncols != n:
            raise StochasticError(f"stochastic matrix must be square, got {m.shape}")
        for i, r in enumerate(m.rows):
            for j, x in enumerate(r):
                if x < 0:
                    raise StochasticError(f"negative entry {x} at row {i}, column {j}")
        for j in range(n):
            total = sum(m.col(j), ZERO)
            if total != 1:
                raise StochasticError(f"column {j} sums to {total}, not 1")
        self.matrix = m
        self.n = n

    @property
    def rows(self) -> tuple:
        return self.matrix.rows

    def __getitem__(self, ij):
        return self.matrix[ij]

    def apply(self, v: Sequence) -> Vector:
        return self.matrix.apply(v)

    def is_identity(self) -> bool:
        return self.matrix == Matrix.identity(self.n)

    def permuted(self, perm: Sequence[int]) -> "StochasticMatrix":
        """P M P^T for the permutation sending index i to perm[i]."""
        n = self.n
        out = [[ZERO] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                out[perm[i]][perm[j]] = self.matrix[i, j]
        return StochasticMatrix(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, StochasticMatrix) and self.matrix == other.matrix

    def __repr__(self) -> str:
        return f"StochasticMatrix({self.n}x{self.n})"


@dataclass(frozen=True)
class ClassStructure:
    classes: tuple  # tuples of indices, ordered by smallest member
    access: frozenset  # (a, b): class a has access to class b (a != b)
    closed: tuple  # one flag per class

    def closed_classes(self) -> tuple:
        return tuple(c for c, f in zip(self.classes, self.closed) if f)

    def class_of(self, i: int) -> int:
        for k, c in enumerate(self.classes):
            if i in c:
                return k
        raise KeyError(i)


def transition_graph(M: StochasticMatrix) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(range(M.n))
    for i in range(M.n):
        for j in range(M.n):
            if M[i, j] > 0 and i != j:
                g.add_edge(i, j)
    return g


def communicating_classes(M: StochasticMatrix) -> ClassStructure:
    g = transition_graph(M)
    classes = sorted((tuple(sorted(c)) for c in nx.strongly_connected_components(g)), key=lambda c: c[0])
    where = {i: k for k, c in enumerate(classes) for i in c}
    dag = nx.DiGraph()
    dag.add_nodes_from(range(len(classes)))
    for i, j in g.edges:
        if where[i] != where[j]:
            dag.add_edge(where[i], where[j])
    access = frozenset((a, b) for a in dag.nodes for b in nx.descendants(dag, a))
    closed = []
    for c in classes:
        members = set(c)
        closed.append(all(M[i, j] == 0 for j in c for i in range(M.n) if i not in members))
    return ClassStructure(tuple(classes), access, tuple(closed))


def _submatrix(M: StochasticMatrix, idx: Sequence[int]) -> Matrix:
    return Matrix([[M[i, j] for j in idx] for i in idx], ncols=len(idx))


def stationary_distribution(M: StochasticMatrix, cls: Sequence[int]) -> Vector:
    """Normalized fixed vector of M on a closed irreducible class (full length n)."""
    cls = tuple(sorted(cls))
    members = set(cls)
    if any(M[i, j] != 0 for j in cls for i in range(M.n) if i not in members):
        raise StochasticError(f"class {cls} is not closed")
    block = _submatrix(M, cls)
    null = nullspace_basis(block - Matrix.identity(len(cls)))
    if len(null) != 1:
        raise StochasticError(f"class {cls} is not irreducible (fixed space of dimension {len(null)})")
    v = null[0]
    total = sum(v, ZERO)
    v = tuple(x / total for x in v)
    if any(x <= 0 for x in v):
        raise StochasticError("stationary vector is not strictly positive")
    out = [ZERO] * M.n
    for i, x in zip(cls, v):
        out[i] = x
    return tuple(out)


@dataclass(frozen=True)
class FixedBasis:
    vectors: tuple
    supports: tuple

    def __len__(self) -> int:
        return len(self.vectors)


def fixed_point_basis(M: StochasticMatrix, check: bool = True) -> FixedBasis:
    cs = communicating_classes(M)
    closed = cs.closed_classes()
    vectors = tuple(stationary_distribution(M, c) for c in closed)
    if check:
        oracle = nullspace_basis(M.matrix - Matrix.identity(M.n))
        if not same_span(list(vectors), oracle) or len(vectors) != len(oracle):
            raise ArithmeticError("stationary vectors do not span the fixed space")
    return FixedBasis(vectors, tuple(closed))


@dataclass
class IntersectionResult:
    basis: tuple
    supports: tuple
    beta: dict = field(default_factory=dict)  # (I, J) -> mu_J / lambda_I
    gamma: dict = field(default_factory=dict)  # (I, I') -> lambda_I / lambda_I'
    zeroed: tuple = ()  # indices forced to vanish on every common fixed vector
    killed: tuple = ()  # S-classes discarded, with the reason

    def __len__(self) -> int:
        return len(self.basis)


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def intersect_fixed_spaces(M1: StochasticMatrix, M2: StochasticMatrix, root_order: Sequence[int] | None = None,
                           check: bool = True) -> IntersectionResult:
    """Disjointly supported basis of the vectors fixed by both matrices.

    ``root_order`` permutes which first-matrix class serves as each S-class
    representative; the output does not depend on it.
    """
    if M1.n != M2.n:
        raise StochasticError(f"size mismatch {M1.n} != {M2.n}")
    n = M1.n
    F1, F2 = fixed_point_basis(M1), fixed_point_basis(M2)
    sup1 = [set(s) for s in F1.supports]
    sup2 = [set(s) for s in F2.supports]
    Z1 = set(range(n)) - set().union(*sup1) if sup1 else set(range(n))
    Z2 = set(range(n)) - set().union(*sup2) if sup2 else set(range(n))
    nodes = [("I", a) for a in range(len(sup1))] + [("J", b) for b in range(len(sup2))]
    uf = _UnionFind(nodes)
    overlaps = []
    for a, I in enumerate(sup1):
        for b, J in enumerate(sup2):
            if I & J:
                overlaps.append((a, b))
                uf.union(("I", a), ("J", b))
    groups: dict = {}
    for x in nodes:
        groups.setdefault(uf.find(x), []).append(x)

    beta: dict = {}
    gamma: dict = {}
    killed = []
    basis = []
    order = list(root_order) if root_order is not None else list(range(len(sup1)))
    rank_of = {a: k for k, a in enumerate(order)}
    for members in sorted(groups.values(), key=lambda g: sorted(g)):
        Is = sorted(a for t, a in members if t == "I")
        Js = sorted(b for t, b in members if t == "J")
        if any(sup1[a] & Z2 for a in Is) or any(sup2[b] & Z1 for b in Js):
            killed.append((tuple(members), "meets a zero set"))
            continue
        if not Is or not Js:
            killed.append((tuple(members), "no partner class"))
            continue
        ok = True
        local_beta = {}
        for a in Is:
            for b in Js:
                common = sorted(sup1[a] & sup2[b])
                if not common:
                    continue
                v, w = F1.vectors[a], F2.vectors[b]
                k0 = common[0]
                if any(v[k0] * w[l] != v[l] * w[k0] for l in common[1:]):
                    ok = False
                    break
                local_beta[(a, b)] = v[k0] / w[k0]
            if not ok:
                break
        if not ok:
            killed.append((tuple(members), "not proportional on an overlap"))
            continue
        beta.update(local_beta)
        # propagate lambda ratios from the representative through shared J's
        root = min(Is, key=lambda a: rank_of.get(a, a))
        lam = {root: ONE}
        mu: dict = {}
        queue = deque([("I", root)])
        while queue and ok:
            t, x = queue.popleft()
            if t == "I":
                for (a, b), bt in local_beta.items():
                    if a != x:
                        continue
                    val = lam[a] * bt
                    if b in mu:
                        if mu[b] != val:
                            ok = False
                            break
                    else:
                        mu[b] = val
                        queue.append(("J", b))
            else:
                for (a, b), bt in local_beta.items():
                    if b != x:
                        continue
                    val = mu[b] / bt
                    if a in lam:
                        if lam[a] != val:
                            ok = False
                            break
                    else:
                        lam[a] = val
                        queue.append(("I", a))
        # gamma table from pairs sharing a J
        for b in Js:
            sharing = [a for a in Is if (a, b) in local_beta]
            for a in sharing:
                for a2 in sharing:
                    if a != a2:
                        gamma[(a, a2)] = local_beta[(a2, b)] / local_beta[(a, b)]
        if not ok:
            killed.append((tuple(members), "inconsistent ratios"))
            continue
        total = sum(lam.values(), ZERO)
        vec_out = [ZERO] * n
        for a, la in lam.items():
            for k, x in enumerate(F1.vectors[a]):
                if x:
                    vec_out[k] += la * x / total
        basis.append(tuple(vec_out))
    basis.sort(key=lambda v: min(k for k, x in enumerate(v) if x))
    supports = tuple(tuple(k for k, x in enumerate(v) if x) for v in basis)
    result = IntersectionResult(tuple(basis), supports, beta, gamma, tuple(sorted(Z1 | Z2)), tuple(killed))
    if check:
        oracle = common_fixed_oracle(M1, M2)
        if len(oracle) != len(basis) or not same_span(list(basis), oracle):
            raise ArithmeticError("intersection basis does not span the common fixed space")
    return result


def common_fixed_oracle(M1: StochasticMatrix, M2: StochasticMatrix) -> list:
    """ker(M1 - I) intersected with ker(M2 - I): one stacked nullspace computation."""
    I = Matrix.identity(M1.n)
    stacked = Matrix(list((M1.matrix - I).rows) + list((M2.matrix - I).rows), ncols=M1.n)
    return nullspace_basis(stacked)


def gamma_transitivity_violations(res: IntersectionResult) -> list:
    g = res.gamma
    keys = {a for a, _ in g} | {b for _, b in g}
    bad = []
    for a in keys:
        for b in keys:
            for c in keys:
                if (a, b) in g and (b, c) in g and (a, c) in g and g[(a, b)] * g[(b, c)] != g[(a, c)]:
                    bad.append((a, b, c))
    return bad


def random_stochastic_matrix(n: int, rng: random.Random, zero_density: float = 0.5,
                             max_num: int = 5) -> StochasticMatrix:
    """Random rational column-stochastic matrix; ``zero_density`` forces reducibility."""
    cols = []
    for j in range(n):
        while True:
            w = [0 if rng.random() < zero_density else rng.randint(1, max_num) for _ in range(n)]
            if any(w):
                break
        s = sum(w)
        cols.append([Fraction(x, s) for x in w])
    return StochasticMatrix([[cols[j][i] for j in range(n)] for i in range(n)])


def block_diagonal(*blocks: StochasticMatrix) -> StochasticMatrix:
    n = sum(b.n for b in blocks)
    out = [[ZERO] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i in range(b.n):
            for j in range(b.n):
                out[off + i][off + j] = b[i, j]
        off += b.n
    return StochasticMatrix(out)

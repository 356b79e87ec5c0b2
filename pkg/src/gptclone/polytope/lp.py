"""Exact linear feasibility with witnesses and Farkas certificates.

The decision procedure eliminates equalities symbolically, then runs a
phase-one simplex with a single artificial variable on the remaining
inequality system.  Both outcomes come with an exact, checkable proof.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from gmpy2 import mpq

from ..exact import ZERO, to_rational

EQ, GE, LE = "==", ">=", "<="

_ZERO = mpq(0)
_ONE = mpq(1)


def _frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


@dataclass(frozen=True)
class Constraint:
    """``sum coeffs[v] * v  (sense)  rhs`` over named unknowns."""

    coeffs: tuple  # ((name, Fraction), ...)
    sense: str
    rhs: Fraction

    @classmethod
    def make(cls, coeffs: Mapping[Hashable, object] | Iterable, sense: str, rhs=0) -> "Constraint":
        if sense not in (EQ, GE, LE):
            raise ValueError(f"unknown constraint sense {sense!r}")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict = {}
        for name, c in items:
            c = to_rational(c)
            if c:
                acc[name] = acc.get(name, ZERO) + c
        return cls(tuple((k, v) for k, v in acc.items() if v), sense, to_rational(rhs))

    def lhs(self, point: Mapping) -> Fraction:
        return sum((c * point.get(name, ZERO) for name, c in self.coeffs), ZERO)

    def satisfied_by(self, point: Mapping) -> bool:
        val = self.lhs(point)
        if self.sense == EQ:
            return val == self.rhs
        if self.sense == GE:
            return val >= self.rhs
        return val <= self.rhs


def eq(coeffs, rhs=0) -> Constraint:
    return Constraint.make(coeffs, EQ, rhs)


def ge(coeffs, rhs=0) -> Constraint:
    return Constraint.make(coeffs, GE, rhs)


def le(coeffs, rhs=0) -> Constraint:
    return Constraint.make(coeffs, LE, rhs)


@dataclass
class LPResult:
    feasible: bool
    witness: dict | None = None
    # multiplier per constraint index; free sign on equalities, >= 0 on GE, <= 0 on LE
    certificate: dict | None = None
    constraints: tuple = field(default=(), repr=False)

    def __bool__(self) -> bool:
        return self.feasible

    def verify(self) -> bool:
        """Re-check the witness or the infeasibility certificate exactly."""
        if self.feasible:
            return all(c.satisfied_by(self.witness) for c in self.constraints)
        y = self.certificate
        total: dict = {}
        rhs = ZERO
        for idx, mult in y.items():
            c = self.constraints[idx]
            if c.sense == GE and mult < 0:
                return False
            if c.sense == LE and mult > 0:
                return False
            for name, a in c.coeffs:
                total[name] = total.get(name, ZERO) + mult * a
            rhs += mult * c.rhs
        # combined: 0 (.) rhs where the combination is a ">=" row, so rhs > 0 is absurd
        return all(v == 0 for v in total.values()) and rhs > 0


def _variables(constraints: Sequence[Constraint]) -> list:
    seen: dict = {}
    for c in constraints:
        for name, _ in c.coeffs:
            seen.setdefault(name, None)
    return list(seen)


def _phase_one(H: list[list], h: list, p: int):
    """Phase-one simplex for ``H z >= h`` over free ``z``.

    Minimizes one artificial ``t >= 0`` in ``H z + t >= h``.  Returns
    ``(z, None)`` when the optimum is zero, otherwise ``(None, y)`` where
    ``y`` (the reduced costs of the slacks) satisfies ``y >= 0``,
    ``y^T H = 0`` and ``y^T h > 0``.  The tableau is kept in gmpy2
    rationals.  Pricing picks the most negative reduced cost; a free
    variable with a positive one enters with its column negated.  Ties in
    the ratio test are broken lexicographically on the slack columns, which
    start as the identity, so no basis repeats.  Rows whose basic variable
    is free never leave.
    """
    m = len(H)
    first = max(range(m), key=lambda i: (h[i], i))
    if h[first] <= 0:
        return [_ZERO] * p, None
    tcol, s0 = p, p + 1
    width = s0 + m
    # row i reads  -H_i z - t + s_i = -h_i  with s_i basic
    T = []
    for i in range(m):
        row = [-_q(x) for x in H[i]]
        row.append(-_ONE)
        row.extend(_ONE if k == i else _ZERO for k in range(m))
        row.append(-_q(h[i]))
        T.append(row)
    basis = [s0 + i for i in range(m)]
    cost = [_ZERO] * (width + 1)
    cost[tcol] = _ONE
    sign = [1] * p

    def pivot(leave: int, enter: int) -> None:
        piv = T[leave][enter]
        prow = [x / piv for x in T[leave]]
        T[leave] = prow
        nz = [k for k, x in enumerate(prow) if x]
        for i in range(m):
            if i != leave:
                f = T[i][enter]
                if f:
                    row = T[i]
                    for k in nz:
                        row[k] -= f * prow[k]
        f = cost[enter]
        if f:
            for k in nz:
                cost[k] -= f * prow[k]
        basis[leave] = enter

    # taking the last maximizer keeps every (rhs | slack) row lexicographically positive
    pivot(first, tcol)
    while tcol in basis:
        inb = set(basis)
        enter, best = None, _ZERO
        for j in range(width):
            c = cost[j]
            if not c or j in inb:
                continue
            if j < p:
                c = -abs(c)
            if c < best:
                enter, best = j, c
        if enter is None:
            break
        if enter < p and cost[enter] > 0:
            for row in T:
                row[enter] = -row[enter]
            cost[enter] = -cost[enter]
            sign[enter] = -sign[enter]
        best = None
        ties: list[int] = []
        for i in range(m):
            a = T[i][enter]
            if a > 0 and basis[i] >= p:
                ratio = T[i][width] / a
                if best is None or ratio < best:
                    best, ties = ratio, [i]
                elif ratio == best:
                    ties.append(i)
        if not ties:  # cannot happen: t >= 0 bounds the objective
            raise ArithmeticError("unbounded phase-one problem")
        k = s0
        while len(ties) > 1:
            vals = [T[i][k] / T[i][enter] for i in ties]
            low = min(vals)
            ties = [i for i, v in zip(ties, vals) if v == low]
            k += 1
        pivot(ties[0], enter)
    if tcol in basis and T[basis.index(tcol)][width]:
        return None, [cost[s0 + i] for i in range(m)]
    z = [_ZERO] * p
    for i, j in enumerate(basis):
        if j < p:
            z[j] = T[i][width] if sign[j] > 0 else -T[i][width]
    return z, None


def _q(x) -> mpq:
    return x if isinstance(x, type(_ZERO)) else mpq(x.numerator, x.denominator)


def _eliminate(E: list[list], e: list, nv: int):
    """Gauss-Jordan on ``[E | e | I]`` in gmpy2 rationals.

    Returns ``(rows, pivots, combos)`` where each reduced row equals
    ``combos[r] . [E | e]``, or ``(None, y, None)`` with ``y E = 0, y e = 1``.
    """
    k = len(E)
    rows = []
    for i in range(k):
        r = [_q(x) for x in E[i]]
        r.append(_q(e[i]))
        r.extend(_ONE if i == t else _ZERO for t in range(k))
        rows.append(r)
    width = nv + 1 + k
    pivots: list[int] = []
    rank = 0
    for c in range(nv):
        if rank == k:
            break
        p = next((i for i in range(rank, k) if rows[i][c]), None)
        if p is None:
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        piv = rows[rank][c]
        pr = [x / piv for x in rows[rank]] if piv != 1 else rows[rank]
        rows[rank] = pr
        nz = [t for t in range(c, width) if pr[t]]
        for i in range(k):
            if i != rank:
                f = rows[i][c]
                if f:
                    ri = rows[i]
                    for t in nz:
                        ri[t] -= f * pr[t]
        pivots.append(c)
        rank += 1
    for r in rows[rank:]:
        if r[nv]:
            return None, [_frac(x / r[nv]) for x in r[nv + 1:]], None
    return rows[:rank], pivots, [r[nv + 1:] for r in rows[:rank]]


def lp_feasible(constraints: Sequence[Constraint]) -> LPResult:
    """Decide feasibility of a finite rational linear system over free unknowns.

    Returns an exact witness point or a Farkas certificate: multipliers whose
    combination of the constraints reads ``0 >= positive``.
    """
    constraints = tuple(constraints)
    names = _variables(constraints)
    pos = {v: k for k, v in enumerate(names)}
    nv = len(names)

    def row(c: Constraint) -> list[Fraction]:
        r = [ZERO] * nv
        for name, a in c.coeffs:
            r[pos[name]] = a
        return r

    eq_idx = [i for i, c in enumerate(constraints) if c.sense == EQ]
    in_idx = [i for i, c in enumerate(constraints) if c.sense != EQ]
    # inequalities normalized to G x >= g, kept sparse
    G: list[dict] = []
    g: list = []
    for i in in_idx:
        c = constraints[i]
        sign = 1 if c.sense == GE else -1
        G.append({pos[name]: _q(a) * sign for name, a in c.coeffs})
        g.append(_q(c.rhs) * sign)

    if eq_idx:
        rows, pivots, combos = _eliminate([row(constraints[i]) for i in eq_idx],
                                          [constraints[i].rhs for i in eq_idx], nv)
        if rows is None:
            cert = {eq_idx[k]: v for k, v in enumerate(pivots) if v}
            return LPResult(False, certificate=cert, constraints=constraints)
    else:
        rows, pivots, combos = [], [], []
    pivset = set(pivots)
    free = [f for f in range(nv) if f not in pivset]
    particular = [_ZERO] * nv
    for r, pcol in zip(rows, pivots):
        particular[pcol] = r[nv]
    # x = particular + sum_j z_j N_j with N_j[free_j] = 1, N_j[pivot_r] = -rows[r][free_j]
    fpos = {f: j for j, f in enumerate(free)}
    prow = {pcol: r for r, pcol in zip(rows, pivots)}
    p = len(free)
    H, h = [], []
    for gr, gi in zip(G, g):
        hrow = [_ZERO] * p
        rhs = gi
        for col, a in gr.items():
            if col in fpos:
                hrow[fpos[col]] += a
            else:
                r = prow[col]
                rhs -= a * r[nv]
                for f, j in fpos.items():
                    if r[f]:
                        hrow[j] -= a * r[f]
        H.append(hrow)
        h.append(rhs)

    z, y = _solve_inequalities(H, h, p)
    if z is not None:
        x = list(particular)
        for f, zj in zip(free, z):
            if zj:
                x[f] += zj
                for r, pcol in zip(rows, pivots):
                    if r[f]:
                        x[pcol] -= zj * r[f]
        witness = {name: _frac(x[pos[name]]) for name in names}
        return LPResult(True, witness=witness, constraints=constraints)

    # lift y (>= 0 on G rows) to equality multipliers: y_e E = -y G.  The
    # target lies in the row space of E, so y_e = sum_r target[pivot_r] combos[r].
    cert: dict = {}
    if rows:
        target = [_ZERO] * nv
        for gr, yi in zip(G, y):
            if yi:
                for col, a in gr.items():
                    target[col] -= yi * a
        ye = [_ZERO] * len(eq_idx)
        for r, pcol, comb in zip(rows, pivots, combos):
            t = target[pcol]
            if t:
                for k, cval in enumerate(comb):
                    if cval:
                        ye[k] += t * cval
        for k, v in enumerate(ye):
            if v:
                cert[eq_idx[k]] = _frac(v)
    for k, yi in enumerate(y):
        if yi:
            idx = in_idx[k]
            cert[idx] = _frac(yi) if constraints[idx].sense == GE else -_frac(yi)
    return LPResult(False, certificate=cert, constraints=constraints)


def _solve_inequalities(H, h, p):
    """Return (z, None) with H z >= h, or (None, y) with y >= 0, y^T H = 0, y^T h > 0."""
    m = len(H)
    if m == 0:
        return [_ZERO] * p, None
    if p == 0:
        for i, hi in enumerate(h):
            if hi > 0:
                y = [_ZERO] * m
                y[i] = _ONE
                return None, y
        return [], None
    return _phase_one(H, h, p)


def membership_constraints(poly, exprs: Sequence, tag, use_vertices: bool = False) -> list[Constraint]:
    """Constraints forcing an affine expression to lie in ``poly``.

    ``exprs`` has one ``(coeffs, const)`` pair per coordinate.  With
    ``use_vertices`` the point is written as a convex combination of the
    vertices (weights named ``(tag, k)``), which avoids facet enumeration.
    """
    out: list[Constraint] = []

    def combine(normal):
        acc: dict = {}
        const = ZERO
        for a, (coeffs, c0) in zip(normal, exprs):
            if not a:
                continue
            const += a * c0
            for name, c in coeffs.items():
                acc[name] = acc.get(name, ZERO) + a * c
        return acc, const

    if not use_vertices:
        for n, o in poly.equalities:
            acc, const = combine(n)
            out.append(eq(acc, o - const))
        for n, o in poly.inequalities:
            acc, const = combine(n)
            out.append(ge(acc, o - const))
        return out
    verts = poly.vertices
    weights = [(tag, k) for k in range(len(verts))]
    for w in weights:
        out.append(ge({w: 1}, 0))
    out.append(eq({w: 1 for w in weights}, 1))
    for i, (coeffs, c0) in enumerate(exprs):
        acc = dict(coeffs)
        for w, v in zip(weights, verts):
            if v[i]:
                acc[w] = acc.get(w, ZERO) - v[i]
        out.append(eq(acc, -c0))
    return out

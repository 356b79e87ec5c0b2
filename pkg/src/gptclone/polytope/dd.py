"""Double description method for polyhedral cones, in exact integer arithmetic."""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

from ..exact import Matrix, dot, inverse, nullspace_raw, rref


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _int_row(row: Sequence[Fraction]) -> tuple[int, ...]:
    den = 1
    for x in row:
        den = _lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in row]
    g = 0
    for i in ints:
        g = gcd(g, i)
    if g > 1:
        ints = [i // g for i in ints]
    return tuple(ints)


def _primitive_int(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for i in v:
        g = gcd(g, i)
    if g > 1:
        return tuple(i // g for i in v)
    return tuple(v)


def _idot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _pointed_rays(H: list[tuple[int, ...]], q: int) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone {w in Q^q : H w >= 0}; rank(H) must be q."""
    if q == 0:
        return []
    # greedy choice of q independent rows for the initial simplicial cone
    chosen: list[int] = []
    basis_rows: list[tuple] = []
    for i, h in enumerate(H):
        if not any(h):
            continue
        trial = basis_rows + [h]
        if len(rref(Matrix(trial))[1]) == len(trial):
            basis_rows = trial
            chosen.append(i)
            if len(chosen) == q:
                break
    if len(chosen) < q:
        raise ValueError("cone is not pointed")
    inv = inverse(Matrix(basis_rows))
    bit = {row: 1 << row for row in range(len(H))}
    rays: list[tuple[tuple[int, ...], int]] = []
    all_initial = 0
    for i in chosen:
        all_initial |= bit[i]
    for j in range(q):
        r = _int_row(inv.col(j))
        rays.append((r, all_initial & ~bit[chosen[j]]))
    chosen_set = set(chosen)
    for i, h in enumerate(H):
        if i in chosen_set:
            continue
        b = bit[i]
        if not any(h):
            rays = [(r, z | b) for r, z in rays]
            continue
        vals = [_idot(h, r) for r, _ in rays]
        pos = [k for k, s in enumerate(vals) if s > 0]
        neg = [k for k, s in enumerate(vals) if s < 0]
        if not neg:
            rays = [(r, z | b) if vals[k] == 0 else (r, z) for k, (r, z) in enumerate(rays)]
            continue
        new: list[tuple[tuple[int, ...], int]] = []
        for k, (r, z) in enumerate(rays):
            if vals[k] > 0:
                new.append((r, z))
            elif vals[k] == 0:
                new.append((r, z | b))
        zsets = [z for _, z in rays]
        need = q - 2
        for p in pos:
            rp, zp = rays[p]
            for n in neg:
                rn, zn = rays[n]
                common = zp & zn
                if common.bit_count() < need:
                    continue
                adjacent = True
                for t, zt in enumerate(zsets):
                    if t != p and t != n and (common & zt) == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                sp, sn = vals[p], vals[n]
                combo = tuple(sp * x - sn * y for x, y in zip(rn, rp))
                new.append((_primitive_int(combo), common | b))
        rays = new
    # deduplicate (exact DD does not produce duplicates, but be safe)
    seen = {}
    for r, _ in rays:
        seen[r] = None
    return list(seen)


def cone_rays(inequalities: Sequence[Sequence], equalities: Sequence[Sequence], dim: int):
    """Extreme rays and lineality space of ``{y : A y >= 0, E y = 0}``.

    Returns ``(rays, lineality)``: rays are primitive integer vectors (as
    Fraction tuples) of the pointed part taken orthogonal to the lineality
    space; both lists are sorted.
    """
    if equalities:
        N = nullspace_raw(Matrix(equalities, ncols=dim), dim)
    else:
        N = [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
    if not N:
        return [], []
    G = [tuple(dot(a, n) for n in N) for a in inequalities]
    G = [g for g in G if any(g)]
    p = len(N)
    L = nullspace_raw(Matrix(G, ncols=p), p) if G else [tuple(Fraction(int(i == j)) for j in range(p)) for i in range(p)]
    if L:
        W = nullspace_raw(Matrix(L, ncols=p), p)
    else:
        W = [tuple(Fraction(int(i == j)) for j in range(p)) for i in range(p)]
    q = len(W)
    H = [_int_row([dot(g, w) for w in W]) for g in G]
    rays_w = _pointed_rays(H, q) if q else []

    def to_y(zc: Sequence[Fraction]) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * dim
        for c, n in zip(zc, N):
            if c:
                for k, x in enumerate(n):
                    if x:
                        out[k] += c * x
        return tuple(out)

    rays = []
    for w in rays_w:
        z = [sum((Fraction(wi) * Wj[k] for wi, Wj in zip(w, W)), Fraction(0)) for k in range(p)]
        y = to_y(z)
        rays.append(tuple(Fraction(i) for i in _int_row(y)))
    lineality = [to_y(l) for l in L]
    return sorted(set(rays)), lineality

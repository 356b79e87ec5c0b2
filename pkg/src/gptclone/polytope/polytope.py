"""Rational polytopes in dual description, cones, and the geometric queries on them."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from ..exact import (
    Matrix,
    ZERO,
    Vector,
    dot,
    format_rational,
    is_zero,
    primitive,
    rank,
    rref,
    sub,
    vec,
    vectors_rank,
)
from .dd import cone_rays

logger = logging.getLogger(__name__)

Inequality = tuple  # (normal: Vector, offset: Fraction) meaning normal . x >= offset


class UnboundedError(ValueError):
    """Raised when an H-description does not describe a bounded set."""

    def __init__(self, message: str, ray: Vector):
        super().__init__(message)
        self.ray = ray


def _canonical_equalities(eqs: Sequence[Inequality], dim: int) -> tuple[tuple, list[int]]:
    """RREF of the augmented rows [normal | offset]; flags inconsistency via pivot == dim."""
    if not eqs:
        return (), []
    rows, pivots = rref(Matrix([tuple(n) + (o,) for n, o in eqs], ncols=dim + 1))
    return tuple((tuple(r[:dim]), r[dim]) for r in rows), pivots


def _reduce(normal: Sequence, offset, equalities: Sequence[Inequality], pivots: Sequence[int]):
    """Reduce an inequality modulo the (RREF) equalities: zero their pivot columns."""
    n = list(normal)
    o = Fraction(offset)
    for (en, eo), p in zip(equalities, pivots):
        f = n[p]
        if f:
            for k, x in enumerate(en):
                if x:
                    n[k] -= f * x
            o -= f * eo
    return tuple(n), o


def _normalize_ineq(normal: Sequence, offset) -> Inequality | None:
    if is_zero(normal):
        return None
    row = primitive(tuple(normal) + (Fraction(offset),))
    return row[:-1], row[-1]


class Polytope:
    """A bounded convex polytope in Q^dim given by vertices, inequalities, or both.

    Inequalities read ``normal . x >= offset``; equalities ``normal . x == offset``
    cut out the affine hull.  Missing descriptions are computed on demand by
    the double description method and cached.
    """

    def __init__(self, dim: int, vertices=None, inequalities=None, equalities=None, extreme: bool = False):
        self.dim = int(dim)
        if vertices is None and inequalities is None:
            raise ValueError("a polytope needs vertices or inequalities")
        self._given_vertices = None
        if vertices is not None:
            vs = sorted({vec(v) for v in vertices})
            if any(len(v) != self.dim for v in vs):
                raise ValueError("vertex of wrong dimension")
            self._given_vertices = vs
            if extreme:
                # caller guarantees every point is extreme; skip the hull computation
                self.__dict__["_vrep"] = tuple(vs)
        self._given_ineqs = None
        self._given_eqs = None
        if inequalities is not None or equalities is not None:
            self._given_ineqs = [(vec(n), Fraction(o)) for n, o in (inequalities or ())]
            self._given_eqs = [(vec(n), Fraction(o)) for n, o in (equalities or ())]
            for n, _ in self._given_ineqs + self._given_eqs:
                if len(n) != self.dim:
                    raise ValueError("constraint normal of wrong dimension")

    # -- constructors -------------------------------------------------------------

    @classmethod
    def from_vertices(cls, points) -> "Polytope":
        points = [vec(p) for p in points]
        if not points:
            return cls.empty(0)
        return cls(len(points[0]), vertices=points)

    @classmethod
    def from_inequalities(cls, dim: int, inequalities, equalities=()) -> "Polytope":
        return cls(dim, inequalities=inequalities, equalities=equalities)

    @classmethod
    def empty(cls, dim: int) -> "Polytope":
        return cls(dim, vertices=[])

    # -- descriptions -------------------------------------------------------------

    @cached_property
    def _vrep(self) -> tuple:
        if self._given_vertices is not None:
            return tuple(self._extreme_points(self._given_vertices))
        return tuple(self._enumerate_vertices())

    @cached_property
    def _hrep(self) -> tuple:
        if self._given_vertices is not None or self._given_ineqs is None:
            return self._facets_from_vertices(list(self._vrep))
        return self._canonical_given_hrep()

    @property
    def vertices(self) -> tuple:
        """Canonical (sorted) list of extreme points."""
        return self._vrep

    @property
    def inequalities(self) -> tuple:
        return self._hrep[0]

    @property
    def equalities(self) -> tuple:
        return self._hrep[1]

    @property
    def has_vrep(self) -> bool:
        return self._given_vertices is not None or "_vrep" in self.__dict__

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @cached_property
    def affine_dim(self) -> int:
        if not self.has_vrep and self._given_ineqs is not None:
            return _hrep_affine_dim(*self._canonical_given_hrep(), self.dim)
        vs = self.vertices
        if not vs:
            return -1
        return vectors_rank([sub(v, vs[0]) for v in vs[1:]])

    def is_simplex(self) -> bool:
        return len(self.vertices) == self.affine_dim + 1

    def contains(self, x) -> "Containment":
        return contains(self, x)

    def same_set(self, other: "Polytope") -> bool:
        return self.dim == other.dim and self.vertices == other.vertices

    def __repr__(self) -> str:
        if self.has_vrep:
            return f"Polytope(dim={self.dim}, vertices={len(self.vertices)}, affine_dim={self.affine_dim})"
        return f"Polytope(dim={self.dim}, inequalities={len(self._given_ineqs or ())})"

    # -- conversions --------------------------------------------------------------

    def _facets_from_vertices(self, vs: list[Vector]) -> tuple:
        d = self.dim
        if not vs:
            # empty set: the single contradictory inequality 0 >= 1
            return ((((ZERO,) * d, Fraction(1)),), ())
        # valid inequalities (n, o): n.v - o >= 0 for every point
        cone_ineqs = [tuple(v) + (Fraction(-1),) for v in vs]
        rays, lineality = cone_rays(cone_ineqs, (), d + 1)
        eqs, pivots = _canonical_equalities([(l[:d], l[d]) for l in lineality], d) if lineality else ((), [])
        facets = set()
        for r in rays:
            n, o = _reduce(r[:d], r[d], eqs, pivots)
            ineq = _normalize_ineq(n, o)
            if ineq is not None:
                facets.add(ineq)
        return tuple(sorted(facets)), eqs

    def _canonical_given_hrep(self) -> tuple:
        eqs, pivots = _canonical_equalities(self._given_eqs, self.dim)
        if pivots and pivots[-1] == self.dim:
            return ((((ZERO,) * self.dim, Fraction(1)),), ())
        ineqs = set()
        for n, o in self._given_ineqs:
            n2, o2 = _reduce(n, o, eqs, pivots)
            ineq = _normalize_ineq(n2, o2)
            if ineq is None:
                if o2 > 0:  # 0 >= positive: empty
                    return ((((ZERO,) * self.dim, Fraction(1)),), ())
                continue
            ineqs.add(ineq)
        return tuple(sorted(ineqs)), eqs

    def _enumerate_vertices(self) -> list[Vector]:
        d = self.dim
        ineqs, eqs = self._canonical_given_hrep()
        # homogenize: (x, t) with n.x - o t >= 0, t >= 0
        cone_ineqs = [tuple(n) + (-o,) for n, o in ineqs]
        cone_ineqs.append((ZERO,) * d + (Fraction(1),))
        cone_eqs = [tuple(n) + (-o,) for n, o in eqs]
        rays, lineality = cone_rays(cone_ineqs, cone_eqs, d + 1)
        verts = [tuple(x / r[d] for x in r[:d]) for r in rays if r[d] > 0]
        if not verts:
            return []
        if lineality:
            raise UnboundedError("polyhedron contains a line", tuple(lineality[0][:d]))
        for r in rays:
            if r[d] == 0:
                raise UnboundedError("polyhedron is unbounded", tuple(r[:d]))
        return sorted(set(verts))

    def _extreme_points(self, points: list[Vector]) -> list[Vector]:
        if len(points) <= 1:
            return points
        ineqs, eqs = self._facets_from_vertices(points)
        self.__dict__.setdefault("_hrep", (ineqs, eqs))
        d = self.dim
        eq_normals = [n for n, _ in eqs]
        out = []
        for p in points:
            tight = [n for n, o in ineqs if dot(n, p) == o]
            if vectors_rank(eq_normals + tight) == d:
                out.append(p)
        return out


def _hrep_affine_dim(ineqs: Sequence[Inequality], eqs: Sequence[Inequality], d: int) -> int:
    """Affine dimension from an H-description without enumerating vertices.

    An inequality is an implicit equality when no point of the polytope makes
    it strict.  Working on the homogenized cone (x, s) with s >= 0, a solution
    with slack sum at least 1 must have s > 0 for a bounded polytope, so each
    LP exactly certifies strictness; the witness marks every strict row at once.
    """
    from .lp import eq, ge, lp_feasible

    def row(n, o) -> dict:
        r = {("x", j): c for j, c in enumerate(n) if c}
        if o:
            r["s"] = -o
        return r

    base = [eq(row(n, o), 0) for n, o in eqs]
    base += [ge(row(n, o), 0) for n, o in ineqs]
    point = lp_feasible([eq({("x", j): c for j, c in enumerate(n) if c}, o) for n, o in eqs]
                        + [ge({("x", j): c for j, c in enumerate(n) if c}, o) for n, o in ineqs])
    if not point.feasible:
        return -1
    base.append(ge({"s": 1}, 0))
    open_rows = set(range(len(ineqs)))
    while open_rows:
        total: dict = {}
        for i in open_rows:
            for k, c in row(*ineqs[i]).items():
                total[k] = total.get(k, ZERO) + c
        res = lp_feasible(base + [ge(total, 1)])
        if not res.feasible:
            break
        w = res.witness
        strict = {i for i in open_rows
                  if sum((c * w.get(k, ZERO) for k, c in row(*ineqs[i]).items()), ZERO) > 0}
        open_rows -= strict
    implicit = [ineqs[i][0] for i in sorted(open_rows)]
    return d - vectors_rank([n for n, _ in eqs] + implicit)


def vrep_to_hrep(p: Polytope) -> Polytope:
    """Return a polytope with both descriptions, the H-part irredundant and canonical."""
    q = Polytope(p.dim, vertices=p.vertices)
    q.__dict__["_hrep"] = q._facets_from_vertices(list(p.vertices))
    return q


def hrep_to_vrep(p: Polytope) -> Polytope:
    """Return ``p`` with its canonical vertex list attached (raises UnboundedError)."""
    _ = p.vertices
    return p


def affine_dim(p: Polytope) -> int:
    return p.affine_dim


def is_simplex(p: Polytope) -> bool:
    """Vertex count equals affine dimension + 1 (the empty set counts as a simplex)."""
    return p.is_simplex()


@dataclass(frozen=True)
class Containment:
    inside: bool
    tight: tuple = ()
    violated: Inequality | None = None

    def __bool__(self) -> bool:
        return self.inside


def contains(p: Polytope, x) -> Containment:
    x = vec(x)
    if len(x) != p.dim:
        raise ValueError(f"point of dimension {len(x)} tested against polytope of dimension {p.dim}")
    for n, o in p.equalities:
        val = dot(n, x)
        if val != o:
            # report the side that fails as an inequality
            return Containment(False, violated=(n, o) if val < o else (tuple(-a for a in n), -o))
    tight = []
    for n, o in p.inequalities:
        val = dot(n, x)
        if val < o:
            return Containment(False, violated=(n, o))
        if val == o:
            tight.append((n, o))
    return Containment(True, tight=tuple(tight))


def format_inequality(ineq: Inequality, labels: Sequence[str] | None = None, op: str = ">=") -> str:
    n, o = ineq
    labels = labels or [f"x{i}" for i in range(len(n))]
    terms = []
    for c, name in zip(n, labels):
        if not c:
            continue
        if c == 1:
            terms.append(f"+ {name}")
        elif c == -1:
            terms.append(f"- {name}")
        elif c > 0:
            terms.append(f"+ {format_rational(c)}*{name}")
        else:
            terms.append(f"- {format_rational(-c)}*{name}")
    lhs = " ".join(terms).lstrip("+ ") if terms else "0"
    if lhs.startswith("- "):
        lhs = "-" + lhs[2:]
    return f"{lhs} {op} {format_rational(o)}"


@dataclass(frozen=True)
class Cone:
    """Pointed polyhedral cone given by its extreme rays (primitive integer vectors)."""

    ambient_dim: int
    extreme_rays: tuple
    inequalities: tuple = ()

    def __len__(self) -> int:
        return len(self.extreme_rays)


def cone_from_inequalities(dim: int, inequalities: Sequence[Sequence], equalities: Sequence[Sequence] = ()) -> Cone:
    rays, lineality = cone_rays(inequalities, equalities, dim)
    if lineality:
        raise ValueError("cone is not pointed")
    return Cone(dim, tuple(primitive(r) for r in rays), tuple(vec(a) for a in inequalities))


def points_affine_rank(points: Sequence[Sequence]) -> int:
    if not points:
        return -1
    return rank(Matrix([sub(p, points[0]) for p in points[1:]], ncols=len(points[0]))) if len(points) > 1 else 0

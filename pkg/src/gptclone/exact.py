"""Exact rational vectors, matrices and the linear-algebra kernels built on them.

Scalars are :class:`fractions.Fraction`; vectors are tuples of Fractions and
matrices are immutable :class:`Matrix` objects.  Nothing here ever rounds.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Q = Fraction
Vector = tuple  # tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def to_rational(x) -> Fraction:
    """Coerce an int, Fraction or rational string ("p/q", "p", "0.25") to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not s:
            raise ValueError("empty rational string")
        try:
            return Fraction(s)
        except ZeroDivisionError:
            raise ValueError(f"zero denominator in rational {x!r}") from None
        except ValueError:
            raise ValueError(f"malformed rational {x!r}") from None
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass a rational string instead")
    raise TypeError(f"cannot interpret {x!r} as a rational")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def vec(xs: Iterable) -> Vector:
    return tuple(to_rational(x) for x in xs)


def zeros(n: int) -> Vector:
    return (ZERO,) * n


def unit_vector(n: int, i: int) -> Vector:
    return tuple(ONE if k == i else ZERO for k in range(n))


def dot(a: Sequence, b: Sequence) -> Fraction:
    if len(a) != len(b):
        raise ValueError(f"length mismatch {len(a)} != {len(b)}")
    return sum((x * y for x, y in zip(a, b) if x and y), ZERO)


def add(a: Sequence, b: Sequence) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence, b: Sequence) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a: Sequence) -> Vector:
    c = to_rational(c)
    return tuple(c * x for x in a)


def combination(coeffs: Sequence, vectors: Sequence[Sequence]) -> Vector:
    """Linear combination sum_i coeffs[i] * vectors[i]."""
    if len(coeffs) != len(vectors):
        raise ValueError("coefficient/vector count mismatch")
    if not vectors:
        raise ValueError("empty combination has no dimension")
    out = [ZERO] * len(vectors[0])
    for c, v in zip(coeffs, vectors):
        if c:
            for k, x in enumerate(v):
                if x:
                    out[k] += c * x
    return tuple(out)


def outer(a: Sequence, b: Sequence) -> Vector:
    """Row-major flattened outer product."""
    return tuple(x * y for x in a for y in b)


def is_zero(v: Sequence) -> bool:
    return not any(v)


def canonicalize(v: Sequence) -> Vector:
    """Scale ``v`` so its first nonzero entry is 1 (deduplicates lines)."""
    v = vec(v)
    for x in v:
        if x:
            return tuple(y / x for y in v)
    raise ValueError("cannot canonicalize the zero vector")


def primitive(v: Sequence) -> Vector:
    """Positive rescaling of ``v`` to a primitive integer vector.

    Unlike :func:`canonicalize` the sign is preserved, so this is the right
    normal form for rays and inequalities.
    """
    v = vec(v)
    if is_zero(v):
        raise ValueError("cannot normalize the zero vector")
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for i in ints:
        g = gcd(g, i)
    return tuple(Fraction(i // g) for i in ints)


@dataclass(frozen=True)
class Matrix:
    """Immutable rectangular matrix of Fractions (row-major)."""

    rows: tuple

    def __init__(self, rows=(), ncols: int | None = None):
        rs = tuple(vec(r) for r in rows)
        if rs:
            width = len(rs[0])
            if any(len(r) != width for r in rs):
                raise ValueError("ragged matrix")
            if ncols is not None and ncols != width:
                raise ValueError("column count mismatch")
        else:
            width = ncols or 0
        object.__setattr__(self, "rows", rs)
        object.__setattr__(self, "_ncols", width)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([unit_vector(n, i) for i in range(n)], ncols=n)

    @classmethod
    def zero(cls, m: int, n: int) -> "Matrix":
        return cls([zeros(n) for _ in range(m)], ncols=n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int | None = None) -> "Matrix":
        if not cols:
            if nrows:
                raise ValueError("cannot build a matrix with rows but no columns")
            return cls((), ncols=0)
        return cls(list(zip(*cols)))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    @property
    def columns(self) -> tuple:
        return tuple(self.col(j) for j in range(self.ncols))

    @property
    def T(self) -> "Matrix":
        return Matrix(list(zip(*self.rows)), ncols=self.nrows) if self.rows else Matrix((), ncols=0)

    def apply(self, x: Sequence) -> Vector:
        if len(x) != self.ncols:
            raise ValueError(f"vector of length {len(x)} for matrix with {self.ncols} columns")
        return tuple(dot(r, x) for r in self.rows)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.columns
            return Matrix([[dot(r, c) for c in cols] for r in self.rows], ncols=other.ncols)
        return self.apply(other)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix([add(a, b) for a, b in zip(self.rows, other.rows)], ncols=self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix([sub(a, b) for a, b in zip(self.rows, other.rows)], ncols=self.ncols)

    def __mul__(self, c) -> "Matrix":
        return Matrix([scale(c, r) for r in self.rows], ncols=self.ncols)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_rational(x) for x in r) for r in self.rows)
        return f"Matrix[{self.nrows}x{self.ncols}]({body})"


def as_matrix(m) -> Matrix:
    return m if isinstance(m, Matrix) else Matrix(m)


def rref(m) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row-echelon form: (nonzero rows, pivot columns)."""
    m = as_matrix(m)
    rows = [list(r) for r in m.rows]
    ncols = m.ncols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        if piv != 1:
            rows[r] = [x / piv for x in rows[r]]
        pr = rows[r]
        nz = [k for k in range(c, ncols) if pr[k]]
        for i in range(len(rows)):
            if i != r:
                f = rows[i][c]
                if f:
                    ri = rows[i]
                    for k in nz:
                        ri[k] -= f * pr[k]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rank(m) -> int:
    m = as_matrix(m)
    if not m.rows or not m.ncols:
        return 0
    return len(rref(m)[1])


def vectors_rank(vectors: Sequence[Sequence]) -> int:
    return rank(Matrix(vectors)) if vectors else 0


def nullspace_basis(m) -> list[Vector]:
    """Canonical basis of {x : m x = 0}.

    One vector per free column of the RREF, each canonicalized (first nonzero
    entry 1) and the list sorted lexicographically.  Empty iff ``m`` is injective.
    """
    m = as_matrix(m)
    n = m.ncols
    if not m.rows:
        return sorted(unit_vector(n, i) for i in range(n))
    rows, pivots = rref(m)
    pivset = set(pivots)
    basis = []
    for f in range(n):
        if f in pivset:
            continue
        x = [ZERO] * n
        x[f] = ONE
        for row, p in zip(rows, pivots):
            x[p] = -row[f]
        basis.append(canonicalize(x))
    return sorted(basis)


def nullspace_raw(m, n: int | None = None) -> list[Vector]:
    """Nullspace basis in plain free-column order, without rescaling."""
    m = as_matrix(m)
    n = m.ncols if n is None else n
    if not m.rows:
        return [unit_vector(n, i) for i in range(n)]
    rows, pivots = rref(m)
    pivset = set(pivots)
    basis = []
    for f in range(n):
        if f in pivset:
            continue
        x = [ZERO] * n
        x[f] = ONE
        for row, p in zip(rows, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


@dataclass(frozen=True)
class AffineSolution:
    """Solution set ``particular + span(nullspace)`` of a consistent system."""

    particular: Vector
    nullspace: tuple


def solve_affine(m, b: Sequence) -> AffineSolution | None:
    """Solve ``m x = b``.  Returns None when the system is inconsistent."""
    m = as_matrix(m)
    b = vec(b)
    if len(b) != m.nrows:
        raise ValueError("right-hand side length must equal the row count")
    n = m.ncols
    if not m.rows:
        return AffineSolution(zeros(n), tuple(nullspace_basis(m)))
    aug = Matrix([r + (bi,) for r, bi in zip(m.rows, b)])
    rows, pivots = rref(aug)
    if pivots and pivots[-1] == n:
        return None
    x = [ZERO] * n
    for row, p in zip(rows, pivots):
        x[p] = row[n]
    return AffineSolution(tuple(x), tuple(nullspace_basis(m)))


def inconsistency_certificate(m, b: Sequence) -> Vector | None:
    """A vector y with y^T m = 0 and y^T b = 1, or None if m x = b is solvable."""
    m = as_matrix(m)
    b = vec(b)
    k = m.nrows
    # rows of [m | b | I] reduced; a row with zero m-part and nonzero b-part
    aug = Matrix([r + (bi,) + unit_vector(k, i) for i, (r, bi) in enumerate(zip(m.rows, b))])
    rows, pivots = rref(aug)
    n = m.ncols
    for row in rows:
        if not any(row[:n]) and row[n]:
            y = tuple(x / row[n] for x in row[n + 1:])
            return y
    return None


def inverse(m) -> Matrix:
    m = as_matrix(m)
    n = m.nrows
    if m.ncols != n:
        raise ValueError("inverse of a non-square matrix")
    aug = Matrix([r + unit_vector(n, i) for i, r in enumerate(m.rows)])
    rows, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(rows) < n:
        raise ValueError("singular matrix")
    return Matrix([r[n:] for r in rows[:n]])


def row_space_basis(vectors: Sequence[Sequence]) -> list[Vector]:
    if not vectors:
        return []
    rows, _ = rref(Matrix(vectors))
    return [tuple(r) for r in rows]


def in_span(v: Sequence, vectors: Sequence[Sequence]) -> bool:
    if is_zero(v):
        return True
    if not vectors:
        return False
    return vectors_rank(list(vectors) + [v]) == vectors_rank(vectors)


def same_span(a: Sequence[Sequence], b: Sequence[Sequence]) -> bool:
    """True iff the two vector lists span the same subspace."""
    ra, rb = vectors_rank(a), vectors_rank(b)
    if ra != rb:
        return False
    if ra == 0:
        return True
    return vectors_rank(list(a) + list(b)) == ra

"""Floating-point density matrices: distinguishability by vanishing products and commutation.

Quantum state spaces are not polytopes, so this module works numerically
with a fixed absolute tolerance instead of exact rationals.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TOL = 1e-9


class DensityMatrixError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated density operator on C^d."""

    matrix: np.ndarray

    def __init__(self, matrix, tol: float = TOL):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise DensityMatrixError(f"expected a square matrix, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise DensityMatrixError("matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1) > tol:
            raise DensityMatrixError(f"trace is {tr.real:.12g}, not 1")
        low = float(np.min(np.linalg.eigvalsh(m)))
        if low < -tol:
            raise DensityMatrixError(f"negative eigenvalue {low:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, vector) -> "DensityMatrix":
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def diagonal(cls, probs: Sequence[float]) -> "DensityMatrix":
        return cls(np.diag(np.asarray(probs, dtype=complex)))

    def rank(self, tol: float = TOL) -> int:
        return int(np.sum(np.linalg.eigvalsh(self.matrix) > tol))

    def support_projector(self, tol: float = TOL) -> np.ndarray:
        """Projector onto the span of the eigenvectors with positive eigenvalue."""
        w, v = np.linalg.eigh(self.matrix)
        keep = v[:, w > tol]
        return keep @ keep.conj().T


def mixture(states: Sequence[DensityMatrix], weights: Sequence[float]) -> DensityMatrix:
    w = np.asarray(weights, dtype=float)
    if len(states) != len(w) or np.any(w < 0) or abs(w.sum() - 1) > TOL:
        raise DensityMatrixError("weights must be a probability vector matching the states")
    return DensityMatrix(sum(x * s.matrix for x, s in zip(w, states)))


def _same_dim(a: DensityMatrix, b: DensityMatrix) -> None:
    if a.dim != b.dim:
        raise DensityMatrixError(f"dimension mismatch: {a.dim} vs {b.dim}")


def _norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2))


def are_distinguishable(a: DensityMatrix, b: DensityMatrix, tol: float = TOL) -> bool:
    """True iff a.b vanishes in operator norm (orthogonal supports)."""
    _same_dim(a, b)
    return _norm(a.matrix @ b.matrix) < tol


def discriminating_effect(a: DensityMatrix, b: DensityMatrix, tol: float = TOL) -> np.ndarray | None:
    """The support projector of ``a`` when it separates a from b, else None.

    The projector A satisfies tr(A a) = 1 and tr(A b) = 0.
    """
    if not are_distinguishable(a, b, tol):
        return None
    return a.support_projector(tol)


def jointly_distinguishable(states: Iterable[DensityMatrix], tol: float = TOL) -> bool:
    states = list(states)
    return all(are_distinguishable(a, b, tol) for a, b in itertools.combinations(states, 2))


def commute(a: DensityMatrix, b: DensityMatrix, tol: float = TOL) -> bool:
    _same_dim(a, b)
    return _norm(a.matrix @ b.matrix - b.matrix @ a.matrix) < tol


def pairwise_commuting(states: Iterable[DensityMatrix], tol: float = TOL) -> bool:
    states = list(states)
    return all(commute(a, b, tol) for a, b in itertools.combinations(states, 2))


def supports_orthogonal(a: DensityMatrix, b: DensityMatrix, tol: float = 1e-7) -> bool:
    """Support projectors multiply to zero; computed from eigenvectors, not from a.b."""
    _same_dim(a, b)
    return _norm(a.support_projector(tol) @ b.support_projector(tol)) < tol


def ranks_add(a: DensityMatrix, b: DensityMatrix, tol: float = 1e-7) -> bool:
    """rank(a) + rank(b) = rank(a + b): the supports meet only in zero.

    Necessary for orthogonal supports but weaker: two distinct pure states
    of a qutrit pass it without being orthogonal.
    """
    _same_dim(a, b)
    rs = int(np.sum(np.linalg.eigvalsh(a.matrix + b.matrix) > tol))
    return a.rank(tol) + b.rank(tol) == rs


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_density(d: int, rng: np.random.Generator, rank: int | None = None,
                   basis: np.ndarray | None = None) -> DensityMatrix:
    """Random state supported on the columns of ``basis`` (default: all of C^d)."""
    basis = np.eye(d, dtype=complex) if basis is None else basis
    k = basis.shape[1]
    rank = k if rank is None else min(rank, k)
    g = rng.standard_normal((k, rank)) + 1j * rng.standard_normal((k, rank))
    core = g @ g.conj().T
    core /= np.trace(core)
    m = basis @ core @ basis.conj().T
    return DensityMatrix((m + m.conj().T) / 2)


def random_orthogonal_family(d: int, k: int, rng: np.random.Generator) -> list[DensityMatrix]:
    """k states on mutually orthogonal subspaces of a randomly rotated C^d (k <= d)."""
    if not 1 <= k <= d:
        raise ValueError("need 1 <= k <= d")
    U = random_unitary(d, rng)
    cuts = sorted(rng.choice(np.arange(1, d), size=k - 1, replace=False)) if k > 1 else []
    blocks = np.split(np.arange(d), cuts)
    return [random_density(d, rng, basis=U[:, b]) for b in blocks]


__all__ = [
    "DensityMatrix",
    "DensityMatrixError",
    "TOL",
    "are_distinguishable",
    "commute",
    "discriminating_effect",
    "jointly_distinguishable",
    "mixture",
    "pairwise_commuting",
    "random_density",
    "random_orthogonal_family",
    "random_unitary",
    "ranks_add",
    "supports_orthogonal",
]

"""Joint distinguishability and cloning, both decided by exact linear feasibility."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from .exact import ONE, ZERO, Matrix, Vector, outer, scale, sub, vec
from .model import AffineMap, Effect, ModelError, Observable, StateSpace
from .polytope import LPResult, Polytope, eq, ge, le, lp_feasible, membership_constraints
from .tensor import MAXIMAL, MINIMAL, TensorSpace, max_tensor, min_tensor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DistinguishingObservable:
    """Observable (a_0, a_1, ..., a_n) with a_j(alpha_i) = delta_ij for i, j >= 1."""

    observable: Observable
    target_states: tuple

    def __post_init__(self):
        effects = self.observable.effects
        if len(effects) != len(self.target_states) + 1:
            raise ModelError("need one slack effect plus one effect per state")
        for i, alpha in enumerate(self.target_states):
            for j, e in enumerate(effects[1:]):
                if e(alpha) != (ONE if i == j else ZERO):
                    raise ModelError(f"effect {j + 1} does not single out state {i + 1}")

    @property
    def slack(self) -> Effect:
        return self.observable.effects[0]

    @property
    def effects(self) -> tuple:
        return self.observable.effects[1:]


@dataclass
class Decision:
    """Outcome of a feasibility decision, with the underlying exact LP result."""

    feasible: bool
    value: object = None
    lp: LPResult | None = field(default=None, repr=False)

    def __bool__(self) -> bool:
        return self.feasible

    @property
    def certificate(self):
        return None if self.lp is None else self.lp.certificate


def _check_states(states: Sequence[Sequence], s: StateSpace) -> list[Vector]:
    states = [vec(x) for x in states]
    if len(set(states)) != len(states):
        raise ModelError("duplicate states")
    for x in states:
        if len(x) != s.dim:
            raise ModelError(f"state {x} has the wrong number of coordinates")
        if not s.contains(x):
            raise ModelError(f"{x} is not a state of the space")
    return states


def find_distinguishing_observable(states: Sequence[Sequence], s: StateSpace) -> Decision:
    """Decide whether one observable identifies each state with certainty."""
    states = _check_states(states, s)
    k = len(states)
    cols = s.free_columns

    def value(j: int, x: Sequence) -> dict:
        return {("a", j, c): x[c] for c in cols if x[c]}

    cons = []
    for i, alpha in enumerate(states):
        for j in range(k):
            cons.append(eq(value(j, alpha), ONE if i == j else ZERO))
    for v in s.vertices:
        total: dict = {}
        for j in range(k):
            row = value(j, v)
            cons.append(ge(row, 0))
            for name, c in row.items():
                total[name] = c
        cons.append(le(total, 1))
    res = lp_feasible(cons)
    if not res.feasible:
        return Decision(False, lp=res)
    funcs = []
    for j in range(k):
        f = [ZERO] * s.dim
        for c in cols:
            f[c] = res.witness.get(("a", j, c), ZERO)
        funcs.append(tuple(f))
    a0 = s.unit
    for f in funcs:
        a0 = sub(a0, f)
    obs = Observable.from_functionals(s, [a0] + funcs)
    return Decision(True, DistinguishingObservable(obs, tuple(states)), lp=res)


def cloning_map_from_observable(d: DistinguishingObservable, t: TensorSpace,
                                alpha0: Sequence | None = None) -> AffineMap:
    """kappa(omega) = sum_i a_i(omega) alpha_i (x) alpha_i, with alpha_0 free."""
    s = d.observable.home
    alpha0 = vec(alpha0) if alpha0 is not None else d.target_states[0]
    prepared = (alpha0,) + tuple(d.target_states)
    m = Matrix.zero(t.dim, s.dim)
    for e, alpha in zip(d.observable.effects, prepared):
        aa = outer(alpha, alpha)
        m = m + Matrix([scale(x, e.functional) for x in aa], ncols=s.dim)
    return AffineMap(s, t, m)


def _map_unknowns(s: StateSpace, t: StateSpace, tag: str):
    """Affine expressions of an unknown map's image at a point."""
    cols = s.free_columns

    def image(x: Sequence) -> list:
        return [({(tag, r, c): x[c] for c in cols if x[c]}, ZERO) for r in range(t.dim)]

    def build(witness: dict, source: StateSpace, target: StateSpace) -> AffineMap:
        rows = []
        for r in range(target.dim):
            row = [ZERO] * source.dim
            for c in cols:
                row[c] = witness.get((tag, r, c), ZERO)
            rows.append(tuple(row))
        return AffineMap(source, target, Matrix(rows, ncols=source.dim))

    return image, build


def image_constraints(t: TensorSpace, s: StateSpace, image) -> list:
    """Every vertex of ``s`` must land in ``t``."""
    cons = []
    use_v = t.kind == MINIMAL
    for k, v in enumerate(s.vertices):
        cons.extend(membership_constraints(t.geometry, image(v), ("w", k), use_vertices=use_v))
    return cons


def find_cloning_map(states: Sequence[Sequence], s: StateSpace, t: TensorSpace | None = None) -> Decision:
    """Decide whether one affine map sends every alpha_i to alpha_i (x) alpha_i."""
    states = _check_states(states, s)
    t = t if t is not None else max_tensor(s, s)
    image, build = _map_unknowns(s, t, "k")
    cons = []
    for alpha in states:
        target = outer(alpha, alpha)
        for (coeffs, _), y in zip(image(alpha), target):
            cons.append(eq(coeffs, y))
    cons.extend(image_constraints(t, s, image))
    res = lp_feasible(cons)
    if not res.feasible:
        return Decision(False, lp=res)
    return Decision(True, build(res.witness, s, t), lp=res)


@dataclass
class CloneReport:
    distinguishable: bool
    cloneable: dict  # tensor kind -> decision
    simplex: bool | None
    decisions: dict = field(default_factory=dict, repr=False)

    @property
    def agree(self) -> bool:
        return all(c == self.distinguishable for c in self.cloneable.values())

    @property
    def ok(self) -> bool:
        return self.agree and (self.simplex is not False)


def verify_cocloneable_iff_distinguishable(states: Sequence[Sequence], s: StateSpace,
                                           tensors: Sequence[TensorSpace] | None = None) -> CloneReport:
    """Run both feasibility decisions and check that they agree.

    On the distinguishable side the hull of the states must be a simplex.
    """
    if tensors is None:
        tensors = (max_tensor(s, s), min_tensor(s, s))
    d = find_distinguishing_observable(states, s)
    decisions = {"distinguish": d}
    cloneable = {}
    for t in tensors:
        c = find_cloning_map(states, s, t)
        decisions[t.kind] = c
        cloneable[t.kind] = c.feasible
    simplex = None
    if d.feasible:
        simplex = Polytope.from_vertices(states).is_simplex()
    return CloneReport(d.feasible, cloneable, simplex, decisions)


__all__ = [
    "CloneReport",
    "Decision",
    "DistinguishingObservable",
    "MAXIMAL",
    "MINIMAL",
    "cloning_map_from_observable",
    "find_cloning_map",
    "find_distinguishing_observable",
    "image_constraints",
    "verify_cocloneable_iff_distinguishable",
]

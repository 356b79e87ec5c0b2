"""Model files: JSON documents with a ``kind`` tag and every scalar written as a rational string.

Kinds and payloads::

    test_space         outcomes (optional), tests, name (optional)
    polytope_v         dim, vertices, unit (optional), labels (optional)
    polytope_h         dim, inequalities, equalities (optional), unit, labels
                       each constraint is {"normal": [...], "offset": "q"}
                       meaning normal . x >= offset (or = offset)
    affine_map         matrix, target: self | max_square | min_square
    tensor_space       factors: two inline state-space documents, product: max | min
    stochastic_matrix  rows
    density_matrix     dim, entries: rows of interleaved real/imaginary parts

A stochastic matrix may also be given as a plain text grid, one row per line.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from .exact import Matrix, format_rational, to_rational
from .model import AffineMap, ModelError, StateSpace, TestSpace, state_space_from_polytope, state_space_from_test_space
from .polytope import Polytope
from .quantum import DensityMatrix, DensityMatrixError
from .stochastic import StochasticError, StochasticMatrix
from .tensor import TensorSpace, max_tensor, min_tensor

KINDS = ("test_space", "polytope_v", "polytope_h", "affine_map", "tensor_space", "stochastic_matrix", "density_matrix")
MAP_TARGETS = ("self", "max_square", "min_square")


class ModelFileError(ValueError):
    """A model file that does not parse, or parses into an invalid object."""


@dataclass(frozen=True)
class UnboundMap:
    """An affine map read from a file, not yet bound to its source space."""

    matrix: tuple
    target: str

    def bind(self, source: StateSpace) -> AffineMap:
        if self.target == "self":
            t = source
        elif self.target == "max_square":
            t = max_tensor(source, source)
        else:
            t = min_tensor(source, source)
        m = Matrix(self.matrix, ncols=len(self.matrix[0]) if self.matrix else source.dim)
        if m.shape != (t.dim, source.dim):
            raise ModelFileError(f"field 'matrix': shape {m.shape} but the map needs {(t.dim, source.dim)}")
        try:
            return AffineMap(source, t, m)
        except ModelError as e:
            raise ModelFileError(f"field 'matrix': {e}") from None


def _q(x: Any, where: str) -> Fraction:
    try:
        return to_rational(x)
    except (TypeError, ValueError) as e:
        raise ModelFileError(f"field '{where}': {e}") from None


def _field(doc: dict, key: str, where: str = ""):
    if key not in doc:
        raise ModelFileError(f"missing field '{where}{key}'")
    return doc[key]


def _vector(xs: Any, where: str) -> tuple:
    if not isinstance(xs, list):
        raise ModelFileError(f"field '{where}': expected a list")
    return tuple(_q(x, f"{where}[{i}]") for i, x in enumerate(xs))


def _rows(xs: Any, where: str) -> tuple:
    if not isinstance(xs, list) or not xs:
        raise ModelFileError(f"field '{where}': expected a non-empty list of rows")
    rows = tuple(_vector(r, f"{where}[{i}]") for i, r in enumerate(xs))
    if len({len(r) for r in rows}) != 1:
        raise ModelFileError(f"field '{where}': rows have different lengths")
    return rows


def _constraints(xs: Any, where: str, dim: int) -> list:
    out = []
    for i, c in enumerate(xs or []):
        w = f"{where}[{i}]"
        if not isinstance(c, dict):
            raise ModelFileError(f"field '{w}': expected an object with normal and offset")
        n = _vector(_field(c, "normal", w + "."), w + ".normal")
        if len(n) != dim:
            raise ModelFileError(f"field '{w}.normal': length {len(n)}, expected {dim}")
        out.append((n, _q(_field(c, "offset", w + "."), w + ".offset")))
    return out


def _state_space(doc: dict, where: str = "") -> StateSpace | TensorSpace:
    kind = _field(doc, "kind", where)
    name = str(doc.get("name", ""))
    try:
        if kind == "test_space":
            tests = _field(doc, "tests", where)
            ts = TestSpace(doc.get("outcomes"), tests)
            return state_space_from_test_space(ts, name=name)
        if kind in ("polytope_v", "polytope_h"):
            dim = int(_field(doc, "dim", where))
            unit = _vector(doc["unit"], where + "unit") if "unit" in doc else None
            labels = doc.get("labels")
            if kind == "polytope_v":
                verts = _rows(_field(doc, "vertices", where), where + "vertices")
                if len(verts[0]) != dim:
                    raise ModelFileError(f"field '{where}vertices': points of length {len(verts[0])}, expected {dim}")
                poly = Polytope(dim, vertices=verts)
            else:
                ineqs = _constraints(_field(doc, "inequalities", where), where + "inequalities", dim)
                eqs = _constraints(doc.get("equalities"), where + "equalities", dim)
                poly = Polytope(dim, inequalities=ineqs, equalities=eqs)
            if poly.is_empty:
                raise ModelFileError(f"{where or 'model'}: the polytope is empty")
            return state_space_from_polytope(poly, unit=unit, labels=labels, name=name)
        if kind == "tensor_space":
            factors = _field(doc, "factors", where)
            if not isinstance(factors, list) or len(factors) != 2:
                raise ModelFileError(f"field '{where}factors': expected two inline models")
            a, b = (_state_space(f, f"{where}factors[{i}].") for i, f in enumerate(factors))
            product = doc.get("product", "max")
            if product not in ("max", "min"):
                raise ModelFileError(f"field '{where}product': expected max or min")
            return max_tensor(a, b) if product == "max" else min_tensor(a, b)
    except ModelError as e:
        raise ModelFileError(f"{where or 'model'}: {e}") from None
    raise ModelFileError(f"field '{where}kind': {kind!r} is not a state-space kind")


def parse_document(doc: Any):
    """Validated object for a decoded JSON document."""
    if not isinstance(doc, dict):
        raise ModelFileError("a model file must hold a JSON object")
    kind = _field(doc, "kind")
    if kind not in KINDS:
        raise ModelFileError(f"field 'kind': unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    if kind == "affine_map":
        target = doc.get("target", "self")
        if target not in MAP_TARGETS:
            raise ModelFileError(f"field 'target': expected one of {', '.join(MAP_TARGETS)}")
        return UnboundMap(_rows(_field(doc, "matrix"), "matrix"), target)
    if kind == "stochastic_matrix":
        rows = _rows(_field(doc, "rows"), "rows")
        try:
            return StochasticMatrix(rows)
        except StochasticError as e:
            raise ModelFileError(f"field 'rows': {e}") from None
    if kind == "density_matrix":
        d = int(_field(doc, "dim"))
        entries = _rows(_field(doc, "entries"), "entries")
        if len(entries) != d or len(entries[0]) != 2 * d:
            raise ModelFileError(f"field 'entries': expected {d} rows of {2 * d} interleaved parts")
        m = [[complex(float(r[2 * j]), float(r[2 * j + 1])) for j in range(d)] for r in entries]
        try:
            return DensityMatrix(m)
        except DensityMatrixError as e:
            raise ModelFileError(f"field 'entries': {e}") from None
    return _state_space(doc)


def parse_grid(text: str) -> StochasticMatrix:
    rows = []
    for k, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([to_rational(x) for x in line.replace(",", " ").split()])
        except (TypeError, ValueError) as e:
            raise ModelFileError(f"line {k}: {e}") from None
    if not rows:
        raise ModelFileError("empty matrix")
    try:
        return StochasticMatrix(rows)
    except StochasticError as e:
        raise ModelFileError(str(e)) from None


def loads(text: str):
    stripped = text.lstrip()
    if not stripped.startswith("{"):
        return parse_grid(text)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFileError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    return parse_document(doc)


def load_model(path: str | Path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ModelFileError(f"{p}: {e.strerror}") from None
    try:
        return loads(text)
    except ModelFileError as e:
        raise ModelFileError(f"{p}: {e}") from None


# ---------------------------------------------------------------- serialization

def _qs(v) -> list:
    return [format_rational(x) for x in v]


def state_space_document(s: StateSpace) -> dict:
    if isinstance(s, TensorSpace):
        a, b = s.factors
        return {"kind": "tensor_space", "product": "min" if s.kind == "minimal" else "max",
                "factors": [state_space_document(a), state_space_document(b)]}
    if s.test_space is not None:
        doc = {"kind": "test_space", "outcomes": list(s.test_space.outcomes),
               "tests": [list(t) for t in s.test_space.tests]}
    else:
        doc = {"kind": "polytope_v", "dim": s.dim, "vertices": [_qs(v) for v in s.vertices],
               "unit": _qs(s.unit), "labels": list(s.labels)}
    if s.name:
        doc["name"] = s.name
    return doc


def map_document(m: AffineMap, target: str) -> dict:
    return {"kind": "affine_map", "target": target, "matrix": [_qs(r) for r in m.matrix.rows]}


def stochastic_document(m: StochasticMatrix) -> dict:
    return {"kind": "stochastic_matrix", "rows": [_qs(r) for r in m.rows]}


def density_document(rho: DensityMatrix) -> dict:
    entries = []
    for row in rho.matrix:
        parts = []
        for z in row:
            parts.extend([_decimal(z.real), _decimal(z.imag)])
        entries.append(parts)
    return {"kind": "density_matrix", "dim": rho.dim, "entries": entries}


def _decimal(x: float) -> str:
    x = 0.0 if abs(x) < 1e-15 else x
    return repr(round(float(x), 15))


def document(obj, target: str = "self") -> dict:
    if isinstance(obj, StateSpace):
        return state_space_document(obj)
    if isinstance(obj, AffineMap):
        return map_document(obj, target)
    if isinstance(obj, UnboundMap):
        return {"kind": "affine_map", "target": obj.target, "matrix": [_qs(r) for r in obj.matrix]}
    if isinstance(obj, StochasticMatrix):
        return stochastic_document(obj)
    if isinstance(obj, DensityMatrix):
        return density_document(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, target: str = "self") -> str:
    return json.dumps(document(obj, target), indent=2) + "\n"


__all__ = [
    "KINDS",
    "MAP_TARGETS",
    "UnboundMap",
    "ModelFileError",
    "document",
    "dumps",
    "load_model",
    "loads",
    "parse_document",
    "parse_grid",
]

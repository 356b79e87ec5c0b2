"""Command-line front end.

Every command prints a report to standard output, either as aligned text or
as JSON.  Exit status: 0 success, 1 a negative decision (infeasible, not
entangled, not distinguishable), 2 a usage or input error, 3 a failed
internal check.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import io as mio
from . import zoo
from .broadcast import broadcast_set, find_broadcast_map
from .clone import find_cloning_map, find_distinguishing_observable
from .exact import format_rational, to_rational
from .model import ModelError, StateSpace, is_informationally_complete, minimal_ic_observable
from .polytope import format_inequality
from .quantum import DensityMatrix, are_distinguishable, discriminating_effect, jointly_distinguishable, pairwise_commuting
from .stochastic import StochasticMatrix, communicating_classes, fixed_point_basis, intersect_fixed_spaces
from .tensor import MAXIMAL, MINIMAL, TensorSpace, check_pure_marginal_lemma, max_tensor, min_tensor, separable_decomposition

logger = logging.getLogger("gptclone")

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_CHECK = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class Report:
    command: list
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)  # (name, passed)
    negative: bool = False

    def check(self, name: str, passed: bool) -> None:
        self.checks.append((name, bool(passed)))

    @property
    def exit_code(self) -> int:
        if any(not p for _, p in self.checks):
            return EXIT_CHECK
        return EXIT_NEGATIVE if self.negative else EXIT_OK

    def as_json(self) -> str:
        doc = {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "checks": [{"name": n, "passed": p} for n, p in self.checks],
            "exit": self.exit_code,
        }
        return json.dumps(doc, indent=2) + "\n"

    def as_text(self) -> str:
        lines = ["command: " + " ".join(self.command)]
        for path, digest in self.inputs.items():
            lines.append(f"input: {path} sha256:{digest[:16]}")
        for key, value in self.results.items():
            _text_lines(lines, key, value, 0)
        for name, passed in self.checks:
            lines.append(f"check {name}: {'pass' if passed else 'FAIL'}")
        lines.append(f"exit: {self.exit_code}")
        return "\n".join(lines) + "\n"


def _text_lines(out: list, key: str, value: Any, depth: int) -> None:
    pad = "  " * depth
    if isinstance(value, dict):
        out.append(f"{pad}{key}:")
        for k, v in value.items():
            _text_lines(out, str(k), v, depth + 1)
    elif isinstance(value, list) and value and isinstance(value[0], (list, dict)):
        out.append(f"{pad}{key}: ({len(value)})")
        for i, v in enumerate(value):
            if isinstance(v, dict):
                _text_lines(out, f"[{i}]", v, depth + 1)
            else:
                out.append(f"{pad}  [{i}] " + _flat(v))
    elif isinstance(value, list):
        out.append(f"{pad}{key}: " + _flat(value))
    else:
        out.append(f"{pad}{key}: {value}")


def _flat(v) -> str:
    if isinstance(v, list):
        return "(" + ", ".join(_flat(x) for x in v) + ")"
    return str(v)


def _qs(v) -> list:
    return [format_rational(x) for x in v]


def _floats(m) -> list:
    return [[f"{z.real:.12f}{z.imag:+.12f}j" for z in row] for row in m]


# ------------------------------------------------------------------ input helpers

def _load(report: Report, path: str):
    p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from None
    report.inputs[path] = hashlib.sha256(data).hexdigest()
    try:
        return mio.loads(data.decode())
    except mio.ModelFileError as e:
        raise UsageError(f"{path}: {e}") from None
    except UnicodeDecodeError:
        raise UsageError(f"{path}: not a text file") from None


def _load_space(report: Report, path: str) -> StateSpace:
    obj = _load(report, path)
    if not isinstance(obj, StateSpace):
        raise UsageError(f"{path}: expected a state-space model, got {type(obj).__name__}")
    return obj


def _load_tensor(report: Report, path: str) -> TensorSpace:
    obj = _load_space(report, path)
    if not isinstance(obj, TensorSpace):
        raise UsageError(f"{path}: expected a tensor_space model")
    return obj


def _load_stochastic(report: Report, path: str) -> StochasticMatrix:
    obj = _load(report, path)
    if not isinstance(obj, StochasticMatrix):
        raise UsageError(f"{path}: expected a stochastic matrix")
    return obj


def _load_density(report: Report, path: str) -> DensityMatrix:
    obj = _load(report, path)
    if not isinstance(obj, DensityMatrix):
        raise UsageError(f"{path}: expected a density matrix")
    return obj


def _parse_point(text: str) -> tuple:
    try:
        return tuple(to_rational(x) for x in text.split(","))
    except (TypeError, ValueError) as e:
        raise UsageError(f"bad state {text!r}: {e}") from None


def _states(s: StateSpace, indices: str | None, points: Sequence[str] | None) -> list:
    out = []
    if indices:
        vs = s.vertices
        for tok in indices.split(","):
            try:
                k = int(tok)
            except ValueError:
                raise UsageError(f"bad vertex index {tok!r}") from None
            if not 0 <= k < len(vs):
                raise UsageError(f"vertex index {k} out of range 0..{len(vs) - 1}")
            out.append(vs[k])
    for p in points or []:
        x = _parse_point(p)
        if len(x) != s.dim:
            raise UsageError(f"state {p!r} has {len(x)} coordinates, expected {s.dim}")
        if not s.contains(x):
            raise UsageError(f"state {p!r} is not in the state space")
        out.append(x)
    if not out:
        raise UsageError("no states given; use --states or --state")
    return out


def _tensors(s: StateSpace, which: str) -> list:
    kinds = {"max": [MAXIMAL], "min": [MINIMAL], "both": [MAXIMAL, MINIMAL]}[which]
    return [max_tensor(s, s) if k == MAXIMAL else min_tensor(s, s) for k in kinds]


def _cert_key(kv) -> tuple:
    k = kv[0]
    return (0, k, "") if isinstance(k, int) else (1, 0, str(k))


def _certificate(lp) -> dict:
    """Farkas multipliers keyed by constraint index, as rational strings."""
    cert = lp.certificate or {}
    return {str(k): format_rational(v) for k, v in sorted(cert.items(), key=_cert_key) if v}


def _describe_space(s: StateSpace) -> dict:
    info = {
        "name": s.name,
        "dim": s.dim,
        "labels": list(s.labels),
        "unit": _qs(s.unit),
        "vertices": [_qs(v) for v in s.vertices],
        "vertex_count": len(s.vertices),
        "affine_dim": s.geometry.affine_dim,
        "effect_space_dim": s.effect_dim,
        "simplex": s.is_simplex(),
    }
    if not isinstance(s, TensorSpace):
        info["inequalities"] = [format_inequality(q, list(s.labels)) for q in s.geometry.inequalities]
        info["equalities"] = [format_inequality(q, list(s.labels), "=") for q in s.geometry.equalities]
    return info


# ------------------------------------------------------------------ commands

def cmd_inspect(a, r: Report) -> None:
    s = _load_space(r, a.model)
    r.results["space"] = _describe_space(s)
    if isinstance(s, TensorSpace):
        r.results["space"]["product"] = s.kind


def cmd_ic_observable(a, r: Report) -> None:
    s = _load_space(r, a.model)
    obs = minimal_ic_observable(s)
    funcs = [e.functional for e in obs.effects]
    total = [sum(col) for col in zip(*funcs)]
    r.results["effects"] = [_qs(f) for f in funcs]
    r.results["effect_count"] = len(funcs)
    r.check("minimal informationally complete: one effect per dimension", len(funcs) == s.effect_dim)
    r.check("minimal informationally complete: effects sum to the unit", s.same_functional(total, s.unit))
    r.check("minimal informationally complete: effects span the effect space", is_informationally_complete(obs))


def cmd_distinguish(a, r: Report) -> None:
    s = _load_space(r, a.model)
    states = _states(s, a.states, a.state)
    d = find_distinguishing_observable(states, s)
    r.results["states"] = [_qs(x) for x in states]
    r.results["jointly_distinguishable"] = d.feasible
    if d.feasible:
        r.results["observable"] = [_qs(e.functional) for e in d.value.observable.effects]
    else:
        r.results["certificate"] = _certificate(d.lp)
        r.check("infeasibility certificate verifies", d.lp.verify())
        r.negative = True


def cmd_clone(a, r: Report) -> None:
    s = _load_space(r, a.model)
    states = _states(s, a.states, a.state)
    d = find_distinguishing_observable(states, s)
    r.results["states"] = [_qs(x) for x in states]
    r.results["jointly_distinguishable"] = d.feasible
    any_neg = False
    for t in _tensors(s, a.product):
        c = find_cloning_map(states, s, t)
        entry: dict = {"cloneable": c.feasible}
        if c.feasible:
            entry["map"] = [_qs(row) for row in c.value.matrix.rows]
        else:
            entry["certificate"] = _certificate(c.lp)
            any_neg = True
        r.results[f"{t.kind}_square"] = entry
        r.check(f"no-cloning: co-cloneable in the {t.kind} square iff jointly distinguishable", c.feasible == d.feasible)
    if d.feasible and len(states) > 1:
        from .polytope import Polytope

        r.check("distinguishable states span a simplex", Polytope.from_vertices(states).is_simplex())
    r.negative = any_neg


def cmd_tensor(a, r: Report) -> None:
    s1 = _load_space(r, a.model)
    s2 = _load_space(r, a.model2) if a.model2 else s1
    t = min_tensor(s1, s2) if a.min else max_tensor(s1, s2)
    r.results["product"] = t.kind
    r.results["vertex_count"] = len(t.vertices)
    r.results["affine_dim"] = t.geometry.affine_dim
    other = max_tensor(s1, s2) if a.min else min_tensor(s1, s2)
    r.results["vertices"] = [_qs(v) for v in t.vertices]
    if t.kind == MAXIMAL:
        tmin = other
        ent = [k for k, v in enumerate(t.vertices) if separable_decomposition(v, tmin).entangled]
        r.results["entangled_vertices"] = ent
        r.results["separable_count"] = len(t.vertices) - len(ent)
        rep = check_pure_marginal_lemma(t)
        r.results["extreme_marginal_vertices"] = rep.pure_marginal
        r.check("pure-marginal lemma: extreme marginal forces a product", rep.ok)
    r.check("maximal and minimal products have equal affine dimension",
            t.geometry.affine_dim == other.geometry.affine_dim)


def _bipartite_point(t: TensorSpace, a) -> tuple:
    if a.vertex is not None:
        vs = t.vertices
        if not 0 <= a.vertex < len(vs):
            raise UsageError(f"vertex index {a.vertex} out of range 0..{len(vs) - 1}")
        return vs[a.vertex]
    if a.state is None:
        raise UsageError("give --vertex or --state")
    x = _parse_point(a.state)
    if len(x) != t.dim or not t.contains(x):
        raise UsageError(f"state {a.state!r} is not in the tensor product")
    return x


def cmd_marginal(a, r: Report) -> None:
    t = _load_tensor(r, a.model)
    x = _bipartite_point(t, a)
    r.results["state"] = _qs(x)
    r.results["marginal1"] = _qs(t.marginal1(x))
    r.results["marginal2"] = _qs(t.marginal2(x))


def cmd_entangled(a, r: Report) -> None:
    t = _load_tensor(r, a.model)
    x = _bipartite_point(t, a)
    tmin = t if t.kind == MINIMAL else min_tensor(*t.factors)
    res = separable_decomposition(x, tmin)
    r.results["state"] = _qs(x)
    r.results["entangled"] = res.entangled
    if res.entangled:
        normal, offset = res.separating
        r.results["separating_inequality"] = {"normal": _qs(normal), "offset": format_rational(offset)}
        r.check("separating inequality holds on every product vertex",
                all(sum(n * y for n, y in zip(normal, v)) >= offset for v in tmin.vertices))
        r.check("separating inequality is violated by the state", sum(n * y for n, y in zip(normal, x)) < offset)
    else:
        verts = tmin.vertices
        r.results["decomposition"] = {str(k): format_rational(w) for k, w in sorted(res.weights.items())}
        r.results["product_vertices"] = {str(k): _qs(verts[k]) for k in sorted(res.weights)}
        r.negative = True


def cmd_broadcast_set(a, r: Report) -> None:
    s = _load_space(r, a.model)
    unbound = _load(r, a.map)
    if not isinstance(unbound, mio.UnboundMap) or unbound.target == "self":
        raise UsageError(f"{a.map}: expected an affine map into a tensor square")
    try:
        B = unbound.bind(s)
    except mio.ModelFileError as e:
        raise UsageError(f"{a.map}: {e}") from None
    an = broadcast_set(B, strict=False)
    res = r.results
    res["gamma_prime"] = [_qs(v) for v in an.gamma_prime.vertices]
    if an.distinguishing is not None:
        res["distinguishing_observable"] = [_qs(e.functional) for e in an.distinguishing.observable.effects]
    if an.stochastics:
        res["M1"] = [_qs(row) for row in an.stochastics[0].rows]
        res["M2"] = [_qs(row) for row in an.stochastics[1].rows]
    res["gamma"] = [_qs(v) for v in an.gamma.vertices]
    res["gamma_empty"] = not an.gamma.vertices
    for name, ok in an.checks.items():
        r.check("no-broadcasting: " + name.replace("_", " "), ok)


def cmd_broadcast_find(a, r: Report) -> None:
    s = _load_space(r, a.model)
    states = _states(s, a.states, a.state)
    r.results["states"] = [_qs(x) for x in states]
    neg = False
    for t in _tensors(s, a.product):
        d = find_broadcast_map(states, s, t)
        entry: dict = {"broadcastable": d.feasible}
        if d.feasible:
            entry["map"] = [_qs(row) for row in d.value.matrix.rows]
        else:
            entry["certificate"] = _certificate(d.lp)
            neg = True
        r.results[f"{t.kind}_square"] = entry
    r.negative = neg


def cmd_stochastic_classes(a, r: Report) -> None:
    M = _load_stochastic(r, a.matrix)
    cs = communicating_classes(M)
    r.results["classes"] = [list(c) for c in cs.classes]
    r.results["closed"] = list(cs.closed)
    r.results["access"] = sorted([list(p) for p in cs.access])


def cmd_stochastic_fixed(a, r: Report) -> None:
    M = _load_stochastic(r, a.matrix)
    fb = fixed_point_basis(M)
    r.results["basis"] = [_qs(v) for v in fb.vectors]
    r.results["supports"] = [list(c) for c in fb.supports]
    r.check("fixed vectors have disjoint supports", _disjoint(fb.vectors))


def cmd_stochastic_intersect(a, r: Report) -> None:
    M1 = _load_stochastic(r, a.matrix1)
    M2 = _load_stochastic(r, a.matrix2)
    if M1.n != M2.n:
        raise UsageError("matrices have different sizes")
    res = intersect_fixed_spaces(M1, M2)
    r.results["basis"] = [_qs(v) for v in res.basis]
    r.results["supports"] = [list(c) for c in res.supports]
    r.check("common fixed vectors have disjoint supports", _disjoint(res.basis))


def _disjoint(vectors) -> bool:
    seen: set = set()
    for v in vectors:
        sup = {i for i, x in enumerate(v) if x}
        if sup & seen or any(x < 0 for x in v):
            return False
        seen |= sup
    return True


def cmd_quantum_distinguish(a, r: Report) -> None:
    rhos = [_load_density(r, p) for p in a.states]
    if len({x.dim for x in rhos}) != 1:
        raise UsageError("density matrices have different dimensions")
    pairs = {}
    for i in range(len(rhos)):
        for j in range(i + 1, len(rhos)):
            pairs[f"{i},{j}"] = are_distinguishable(rhos[i], rhos[j])
    joint = jointly_distinguishable(rhos)
    r.results["pairs"] = pairs
    r.results["jointly_distinguishable"] = joint
    if joint and len(rhos) == 2 and a.witness:
        r.results["witness"] = _floats(discriminating_effect(rhos[0], rhos[1]))
    r.negative = not joint


def cmd_quantum_commute(a, r: Report) -> None:
    rhos = [_load_density(r, p) for p in a.states]
    if len({x.dim for x in rhos}) != 1:
        raise UsageError("density matrices have different dimensions")
    ok = pairwise_commuting(rhos)
    r.results["pairwise_commuting"] = ok
    r.negative = not ok


def cmd_zoo(a, r: Report) -> None:
    names = sorted(zoo.STATE_SPACES) if a.name is None else [a.name]
    out = Path(a.out) if a.out else None
    written = {}
    for n in names:
        if n not in zoo.STATE_SPACES:
            raise UsageError(f"unknown model {n!r}")
        s = zoo.get(n)
        written[f"{n}.json"] = mio.dumps(s)
        if s.is_simplex() and len(s.vertices) == 2:
            t = max_tensor(s, s)
            written[f"{n}_kappa.json"] = mio.dumps(zoo.kappa_map(s, t), "max_square")
            written[f"{n}_swap.json"] = mio.dumps(zoo.swap_broadcast_map(s, t), "max_square")
    if a.name in (None, "qubit"):
        for k, rho in sorted(zoo.qubit_states().items()):
            written[f"qubit_{k}.json"] = mio.dumps(rho)
    if out:
        out.mkdir(parents=True, exist_ok=True)
        for fn, text in written.items():
            (out / fn).write_text(text)
    r.results["files"] = sorted(written)
    r.results["examples"] = list(zoo.EXAMPLES)


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS,
                        help="report format (default text)")
    p = argparse.ArgumentParser(prog="gptclone", description="Exact checks on polytopal state spaces.",
                                parents=[common])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, func, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help, parents=[common])
        sp.set_defaults(func=func)
        return sp

    def state_args(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--states", help="comma-separated vertex indices")
        sp.add_argument("--state", action="append", help="explicit state, comma-separated rationals (repeatable)")

    sp = add("inspect", cmd_inspect, "vertices, facets and dimensions of a model")
    sp.add_argument("model")
    sp = add("ic-observable", cmd_ic_observable, "a minimal informationally complete observable")
    sp.add_argument("model")
    sp = add("distinguish", cmd_distinguish, "decide joint distinguishability")
    sp.add_argument("model")
    state_args(sp)
    sp = add("clone", cmd_clone, "decide co-cloneability")
    sp.add_argument("model")
    state_args(sp)
    sp.add_argument("--product", choices=("max", "min", "both"), default="both")
    sp = add("tensor", cmd_tensor, "enumerate a tensor product")
    sp.add_argument("model")
    sp.add_argument("model2", nargs="?")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--max", action="store_true", default=True)
    g.add_argument("--min", action="store_true")
    for name, func, help in (("marginal", cmd_marginal, "marginals of a bipartite state"),
                             ("entangled", cmd_entangled, "decide entanglement of a bipartite state")):
        sp = add(name, func, help)
        sp.add_argument("model", help="a tensor_space model")
        sp.add_argument("--vertex", type=int)
        sp.add_argument("--state")
    sp = add("broadcast-set", cmd_broadcast_set, "the set of states broadcast by a map")
    sp.add_argument("model")
    sp.add_argument("map")
    sp = add("broadcast-find", cmd_broadcast_find, "decide whether one map broadcasts the given states")
    sp.add_argument("model")
    state_args(sp)
    sp.add_argument("--product", choices=("max", "min", "both"), default="max")

    st = sub.add_parser("stochastic", help="column-stochastic matrices", parents=[common])
    stsub = st.add_subparsers(dest="subcommand", required=True)
    x = stsub.add_parser("classes", parents=[common], help="communicating classes")
    x.add_argument("matrix")
    x.set_defaults(func=cmd_stochastic_classes)
    x = stsub.add_parser("fixed-basis", parents=[common], help="nonnegative basis of fixed vectors")
    x.add_argument("matrix")
    x.set_defaults(func=cmd_stochastic_fixed)
    x = stsub.add_parser("intersect", parents=[common], help="common fixed vectors of two matrices")
    x.add_argument("matrix1")
    x.add_argument("matrix2")
    x.set_defaults(func=cmd_stochastic_intersect)

    qu = sub.add_parser("quantum", help="density-matrix checks", parents=[common])
    qsub = qu.add_subparsers(dest="subcommand", required=True)
    x = qsub.add_parser("distinguish", parents=[common], help="pairwise and joint distinguishability")
    x.add_argument("states", nargs="+")
    x.add_argument("--witness", action="store_true", help="emit the discriminating projector for a pair")
    x.set_defaults(func=cmd_quantum_distinguish)
    x = qsub.add_parser("commute", parents=[common], help="pairwise commutation")
    x.add_argument("states", nargs="+")
    x.set_defaults(func=cmd_quantum_commute)

    sp = add("zoo", cmd_zoo, "write the example models as files")
    sp.add_argument("name", nargs="?", help="one model (default: all)")
    sp.add_argument("--out", help="directory to write into (default: list only)")
    return p


def _command_echo(argv: Sequence[str]) -> list:
    return [str(x) for x in argv]


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    fmt = getattr(a, "format", "text")
    report = Report(_command_echo(argv))
    try:
        a.func(a, report)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (AssertionError, ArithmeticError) as e:
        print(f"internal check failed: {e}", file=sys.stderr)
        return EXIT_CHECK
    sys.stdout.write(report.as_json() if fmt == "json" else report.as_text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())

"""A fixed sequence of CLI invocations covering every subcommand.

Used by the CLI tests and by the determinism acceptance check.  Paths are
relative to a working directory populated by :func:`prepare`.
"""
from __future__ import annotations

import contextlib
import io
import json
import os
from pathlib import Path

from gptclone.cli import main

SQUARE = {"kind": "test_space", "tests": [["a0", "a1"], ["b0", "b1"]], "name": "square"}

FILES = {
    "square_max.json": json.dumps({"kind": "tensor_space", "product": "max", "factors": [SQUARE, SQUARE]}),
    "leaky.mat": "1 1/2\n0 1/2\n",
    "blocks.mat": "1/2 1/2 0 0\n1/2 1/2 0 0\n0 0 1/2 1/2\n0 0 1/2 1/2\n",
    "uniform.mat": "\n".join(["1/4 1/4 1/4 1/4"] * 4) + "\n",
}

SUITE = [
    ["zoo", "--out", "."],
    ["inspect", "square.json"],
    ["inspect", "birkhoff3.json", "--format", "json"],
    ["ic-observable", "firefly.json"],
    ["distinguish", "square.json", "--states", "0,1"],
    ["distinguish", "square.json", "--states", "0,1,2", "--format", "json"],
    ["distinguish", "delta3.json", "--state", "1,0,0", "--state", "0,1/2,1/2"],
    ["clone", "square.json", "--states", "0,3"],
    ["clone", "square.json", "--states", "0,1,2", "--product", "max"],
    ["tensor", "square.json", "--max"],
    ["tensor", "delta2.json", "delta3.json", "--min", "--format", "json"],
    ["marginal", "square_max.json", "--vertex", "8"],
    ["entangled", "square_max.json", "--vertex", "8"],
    ["entangled", "square_max.json", "--vertex", "0"],
    ["broadcast-set", "delta2.json", "delta2_kappa.json"],
    ["broadcast-set", "delta2.json", "delta2_swap.json", "--format", "json"],
    ["broadcast-find", "square.json", "--states", "0,3"],
    ["broadcast-find", "square.json", "--states", "0,1,2"],
    ["stochastic", "classes", "leaky.mat"],
    ["stochastic", "fixed-basis", "blocks.mat"],
    ["stochastic", "intersect", "blocks.mat", "uniform.mat", "--format", "json"],
    ["quantum", "distinguish", "qubit_zero.json", "qubit_one.json", "--witness"],
    ["quantum", "distinguish", "qubit_zero.json", "qubit_plus.json"],
    ["quantum", "commute", "qubit_plus.json", "qubit_minus.json"],
]


def prepare(workdir: Path) -> None:
    for name, text in FILES.items():
        (workdir / name).write_text(text)


def run(argv, workdir: Path) -> tuple[int, str, str]:
    """Run one invocation in ``workdir``; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    old = os.getcwd()
    os.chdir(workdir)
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = main(list(argv))
    finally:
        os.chdir(old)
    return code, out.getvalue(), err.getvalue()


def run_suite(workdir: Path) -> list[tuple[list, int, str]]:
    prepare(workdir)
    return [(argv, *run(argv, workdir)[:2]) for argv in SUITE]


def transcript(results) -> bytes:
    parts = []
    for argv, code, out in results:
        parts.append(f"$ gptclone {' '.join(argv)}\n{out}[exit {code}]\n")
    return "".join(parts).encode()

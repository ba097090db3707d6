"""Command-line interface: ``melab <command> [options]``.

Exit codes are 0 (pass, or nothing found), 1 (a violation was found),
2 (bad input) and 3 (numerical anomaly: the checkers disagree or a solver
failed).  Reports are JSON with sorted keys, so equal inputs and seeds give
byte-identical output.
"""
from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from melab import _kernels
from melab.catalog import g_kernel_fn, k_kernel_fn, spec_from_json
from melab.entropy import MatrixEnsemble, matrix_phi_entropy
from melab.errors import (
    EighConvergenceError,
    MelabError,
    NumericalInstabilityError,
    SkipBudgetExceeded,
)
from melab.membership import (
    DEFAULT_TOL,
    cross_equivalence,
    equivalence_suite_specs,
    search_counterexample,
)
from melab.spectral import (
    apply_univariate,
    bivariate_calculus,
    frechet_diff,
    frechet_diff_inverse,
    matrix_from_json,
    matrix_to_json,
)

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_ANOMALY = 0, 1, 2, 3
SEED_ENV = "MEL_SEED"
_ANOMALIES = (EighConvergenceError, NumericalInstabilityError, SkipBudgetExceeded)


class InputError(Exception):
    """Unusable command-line input; maps to exit code 2."""


@dataclass
class RunConfig:
    """Fully resolved options of one invocation, embedded in every report."""

    command: str
    fn: Optional[dict] = None
    dims: Optional[list] = None
    trials: Optional[int] = None
    seed: Optional[int] = None
    tol: float = DEFAULT_TOL
    budget: Optional[int] = None
    format: str = "json"
    out: Optional[str] = None
    operation: Optional[str] = None
    role: Optional[str] = None
    kernel: Optional[str] = None
    backend: str = _kernels.BACKEND

    def to_json(self) -> dict:
        """Everything but the output path, so a report does not depend on where it is written."""
        return {k: v for k, v in asdict(self).items() if v is not None and k != "out"}


# -- input parsing ----------------------------------------------------------


def load_json(text: str, what: str):
    """Inline JSON when ``text`` looks like JSON, otherwise a path to a JSON file."""
    stripped = text.strip()
    try:
        if stripped[:1] in "{[":
            return json.loads(stripped)
        return json.loads(Path(text).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {what} file {text!r}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} is not valid JSON: {exc}") from exc


def load_matrix(text: str, what: str) -> np.ndarray:
    return matrix_from_json(load_json(text, what))


def parse_dims(text: str) -> list:
    try:
        dims = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise InputError(f"--n expects comma-separated integers, got {text!r}") from exc
    if not dims or min(dims) < 1:
        raise InputError(f"--n expects positive dimensions, got {text!r}")
    return dims


def resolve_seed(value: Optional[str]) -> int:
    """Explicit ``--seed``, else ``$MEL_SEED``, else a fresh seed echoed to stderr."""
    source = value if value is not None else os.environ.get(SEED_ENV)
    if source is None:
        seed = secrets.randbits(64)
        print(f"melab: no seed given, using --seed {seed}", file=sys.stderr)
        return seed
    try:
        seed = int(source)
    except ValueError as exc:
        raise InputError(f"seed must be an integer, got {source!r}") from exc
    if not 0 <= seed < 2**64:
        raise InputError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def _positive(value: int, flag: str) -> int:
    if value < 1:
        raise InputError(f"{flag} must be positive, got {value}")
    return value


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise InputError(f"--{name} is required for this command")


# -- output -----------------------------------------------------------------


def _text_matrix(obj: dict) -> str:
    m = np.asarray(obj["re"]) + 1j * np.asarray(obj["im"])
    if not np.any(m.imag):
        m = m.real
    return np.array2string(m, precision=12, suppress_small=True, max_line_width=160)


def _verdict_lines(report: dict) -> list:
    lines = [f"{report['label']}  n={report['n']}  status={report['status']}"]
    for v in report["verdicts"]:
        mark = "PASS" if v["passed"] else "FAIL"
        extra = v["note"] or f"worst relative gap {v['worst_relative_gap']:.3e}"
        lines.append(f"  {v['condition']:<4}{mark}  {extra}")
    return lines


def render_text(doc: dict) -> str:
    cmd = doc["config"]["command"]
    lines = [f"# {cmd}  tol={doc['config']['tol']:g}" + (f"  seed={doc['config']['seed']}" if "seed" in doc["config"] else "")]
    if cmd in ("check", "equivalence-suite"):
        for report in doc["reports"]:
            lines.extend(_verdict_lines(report))
        lines.append(f"overall: {doc['status']}")
    elif cmd == "entropy":
        lines.append(doc["entropy_text"])
    elif cmd == "calculus":
        lines.append(_text_matrix(doc["result"]))
    elif cmd == "search":
        found = doc["violation"]
        if found is None:
            lines.append("no violation found")
        else:
            lines.append(f"violation of condition {found['condition']} at n={found['n']}: gap {found['gap']:.6e} "
                         f"after {found['evaluations']} evaluations")
    return "\n".join(lines) + "\n"


def emit(doc: dict, config: RunConfig) -> None:
    text = render_text(doc) if config.format == "text" else json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if config.out:
        Path(config.out).write_text(text)
    else:
        sys.stdout.write(text)


def _overall(reports) -> tuple:
    statuses = {r.status for r in reports}
    if "anomaly" in statuses:
        return "anomaly", EXIT_ANOMALY
    if "violation" in statuses:
        return "violation", EXIT_VIOLATION
    return "pass", EXIT_OK


# -- commands ---------------------------------------------------------------


def _base_config(args) -> RunConfig:
    return RunConfig(command=args.command, tol=args.tol, format=args.format, out=args.out)


def cmd_check(args) -> int:
    _require(args, "fn")
    config = _base_config(args)
    spec = spec_from_json(load_json(args.fn, "--fn"))
    config.fn = spec.to_json()
    config.dims = parse_dims(args.n or "2")
    config.trials = _positive(args.trials, "--trials")
    config.seed = resolve_seed(args.seed)
    reports = [cross_equivalence(spec, n, config.trials, config.seed, config.tol) for n in config.dims]
    status, code = _overall(reports)
    emit({"config": config.to_json(), "status": status, "reports": [r.to_json() for r in reports]}, config)
    return code


def cmd_equivalence_suite(args) -> int:
    config = _base_config(args)
    config.dims = parse_dims(args.n or "2")
    config.trials = _positive(args.trials, "--trials")
    config.seed = resolve_seed(args.seed)
    reports = [cross_equivalence(spec, n, config.trials, config.seed, config.tol)
               for n in config.dims for spec in equivalence_suite_specs(config.seed)]
    anomalies = [r for r in reports if r.status == "anomaly"]
    doc = {
        "config": config.to_json(),
        "status": "anomaly" if anomalies else "agree",
        "specs": len(reports) // len(config.dims),
        "anomalies": len(anomalies),
        "reports": [r.to_json() for r in reports],
    }
    emit(doc, config)
    return EXIT_ANOMALY if anomalies else EXIT_OK


def cmd_entropy(args) -> int:
    _require(args, "fn", "ensemble")
    config = _base_config(args)
    spec = spec_from_json(load_json(args.fn, "--fn"))
    config.fn = spec.to_json()
    ensemble = MatrixEnsemble.from_json(load_json(args.ensemble, "--ensemble"))
    value = matrix_phi_entropy(spec, ensemble)
    text = f"{value:.12g}"
    emit({"config": config.to_json(), "entropy": float(text), "entropy_text": text}, config)
    return EXIT_OK


def cmd_calculus(args) -> int:
    _require(args, "fn", "x")
    config = _base_config(args)
    spec = spec_from_json(load_json(args.fn, "--fn"))
    config.fn = spec.to_json()
    config.operation = args.operation
    x = load_matrix(args.x, "--x")
    if args.operation == "bivariate":
        config.kernel = args.kernel
        y = load_matrix(args.y, "--y") if args.y is not None else None
        kernel = g_kernel_fn(spec) if args.kernel == "g" else k_kernel_fn(spec)
        result = bivariate_calculus(kernel, x, y).matrix
    else:
        config.role = args.role
        fn = spec.role(args.role)
        if args.operation == "apply":
            result = apply_univariate(fn, x)
        else:
            _require(args, "h")
            h = load_matrix(args.h, "--h")
            op = frechet_diff if args.operation == "dfrechet" else frechet_diff_inverse
            result = op(fn, x, h)
    emit({"config": config.to_json(), "result": matrix_to_json(result)}, config)
    return EXIT_OK


def cmd_search(args) -> int:
    _require(args, "fn")
    config = _base_config(args)
    spec = spec_from_json(load_json(args.fn, "--fn"))
    config.fn = spec.to_json()
    config.dims = parse_dims(args.n or "2")
    if len(config.dims) != 1:
        raise InputError("search takes a single --n, the largest dimension to try")
    config.budget = _positive(args.budget, "--budget")
    config.seed = resolve_seed(args.seed)
    found = search_counterexample(spec, config.dims[0], config.budget, config.seed, config.tol)
    emit({"config": config.to_json(), "violation": found.to_json() if found else None}, config)
    return EXIT_VIOLATION if found else EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fn", help="function spec: inline JSON or a path, e.g. '{\"kind\":\"power\",\"p\":1.5}'")
    common.add_argument("--seed", help=f"64-bit unsigned seed (default: ${SEED_ENV}, else random and printed)")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative slack tolerance (default 1e-8)")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="melab", description="Matrix entropy calculus and membership checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", parents=[common], help="run the four membership checkers")
    check.add_argument("--n", help="comma-separated dimensions (default 2)")
    check.add_argument("--trials", type=int, default=200)

    suite = sub.add_parser("equivalence-suite", parents=[common], help="cross-check the built-in spec suite")
    suite.add_argument("--n", help="comma-separated dimensions (default 2)")
    suite.add_argument("--trials", type=int, default=200)

    entropy = sub.add_parser("entropy", parents=[common], help="matrix phi-entropy of a finite ensemble")
    entropy.add_argument("--ensemble", help="ensemble JSON: {\"outcomes\": [{\"p\": ..., \"matrix\": ...}]}")

    calc = sub.add_parser("calculus", parents=[common], help="functional calculus queries")
    calc.add_argument("operation", choices=("apply", "dfrechet", "dfrechet-inv", "bivariate"))
    calc.add_argument("--x", help="matrix JSON {\"n\", \"re\", \"im\"} or nested real list")
    calc.add_argument("--h", help="direction matrix for dfrechet and dfrechet-inv")
    calc.add_argument("--y", help="second matrix for bivariate (default: x)")
    calc.add_argument("--role", choices=("phi", "f", "fprime"), default="phi",
                      help="function to evaluate: phi, f = phi' or f' (default phi)")
    calc.add_argument("--kernel", choices=("g", "k"), default="g",
                      help="bivariate kernel: g = 1/[t,s]_f or k = [t,s]_f (default g)")

    search = sub.add_parser("search", parents=[common], help="randomized counterexample search")
    search.add_argument("--n", help="largest dimension to search (default 2)")
    search.add_argument("--budget", type=int, default=10_000)
    return parser


COMMANDS = {
    "check": cmd_check,
    "equivalence-suite": cmd_equivalence_suite,
    "entropy": cmd_entropy,
    "calculus": cmd_calculus,
    "search": cmd_search,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"melab: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _ANOMALIES as exc:
        print(f"melab: numerical anomaly: {exc}", file=sys.stderr)
        return EXIT_ANOMALY
    except MelabError as exc:
        print(f"melab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``qmatfun eval|verify|classify|scan``.

Exit codes: 0 ok, 1 I/O or parse failure, 2 violated precondition, 3 residual
above tolerance.
"""
import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from . import __version__, samples, suites
from .errors import QMatFunError
from .qcore import QParameter, TruncationPolicy
from .qdiffeq import (
    bilateral_residual,
    classify_singular_point,
    gauss_coeffs_bilateral,
    infinity_transform,
    integral_solution_u1,
    integral_solution_u2,
    kummer_coeffs_bilateral,
)
from .qmatrix import as_matrix, frobenius, require_commuting
from .qseries import (
    HypergeometricSpec,
    convergence_probe,
    gauss_2phi1,
    gauss_solution_w2,
    kummer_solution_u1,
    kummer_solution_u2,
    rphis_matrix,
)
from .qspecial import GammaEvalConfig, q_beta_matrix, q_gamma_matrix

EXIT_OK, EXIT_IO, EXIT_PRECONDITION, EXIT_RESIDUAL = 0, 1, 2, 3
DEFAULT_Q = 0.5
DEFAULT_GRID = (0.05, 0.85, 8)
MAX_TERMS_ENV = "QMATFUN_MAX_TERMS"

EVAL_KINDS = ("kummer", "kummer2", "gauss", "gauss2", "rphis", "qgamma", "qbeta",
              "integralU1", "integralU2")
VERIFY_SUITES = ("kummer-series", "kummer-second", "kummer-integrals", "gauss-series",
                 "gamma-beta", "recurrences", "rules")
CLASSIFY_EQUATIONS = ("kummer", "kummer-infinity", "gauss")
SCAN_KINDS = ("kummer", "kummer-series", "kummer2", "gauss", "gauss2",
              "integralU1", "integralU2")
SUITE_TOLERANCE = {
    "kummer-series": 1e-9,
    "kummer-second": 1e-9,
    "kummer-integrals": 1e-6,
    "gauss-series": 1e-9,
    "gamma-beta": 1e-7,
    "recurrences": 1e-10,
    "rules": 1e-10,
}


class InputError(Exception):
    """Bad command line, unreadable file or malformed document (exit 1)."""


# ---------------------------------------------------------------- documents

def matrix_to_document(M):
    M = np.asarray(M, dtype=complex)
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "data": [[float(x.real), float(x.imag)] for x in M.ravel()],
    }


def matrix_from_document(doc):
    try:
        rows, cols, data = int(doc["rows"]), int(doc["cols"]), doc["data"]
        if rows != cols:
            raise InputError(f"matrix must be square, got {rows}x{cols}")
        if len(data) != rows * cols:
            raise InputError(f"expected {rows * cols} entries, got {len(data)}")
        values = [complex(float(re), float(im)) for re, im in data]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed matrix document: {exc}") from exc
    M = np.array(values, dtype=complex).reshape(rows, cols)
    if not np.all(np.isfinite(M)):
        raise InputError("matrix document has non-finite entries")
    return M


def read_matrix(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read matrix file {path}: {exc}") from exc
    return matrix_from_document(doc)


def write_matrix(path, M):
    with open(path, "w") as fh:
        json.dump(matrix_to_document(M), fh)


def _complex_pair(z):
    z = complex(z)
    return [z.real, z.imag]


# ---------------------------------------------------------------- config

@dataclass
class RunConfig:
    q: complex = DEFAULT_Q
    rel_tol: float = 1e-14
    abs_tol: float = 1e-300
    max_terms: int = 10000
    n_terms: Optional[int] = None
    grid: List[complex] = field(default_factory=list)
    grid_given: bool = False
    matrix_paths: Dict[str, str] = field(default_factory=dict)
    numerator_paths: List[str] = field(default_factory=list)
    denominator_paths: List[str] = field(default_factory=list)
    out: Optional[str] = None
    fmt: str = "json"
    seed: int = 0
    workers: int = 1
    tol: Optional[float] = None

    @property
    def policy(self):
        return TruncationPolicy(self.rel_tol, self.abs_tol, self.max_terms)

    def describe(self):
        q = complex(self.q)
        return {
            "q": q.real if q.imag == 0 else [q.real, q.imag],
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "max_terms": self.max_terms,
            "n_terms": self.n_terms,
            "grid": [_complex_pair(z) for z in self.grid],
            "matrices": dict(sorted(self.matrix_paths.items())),
            "numerators": list(self.numerator_paths),
            "denominators": list(self.denominator_paths),
            "format": self.fmt,
            "tol": self.tol,
        }


def parse_q(text):
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise InputError(f"bad --q value {text!r}") from exc
    if len(parts) == 1:
        return parts[0]
    if len(parts) == 2:
        return complex(*parts)
    raise InputError("--q takes a real value or re,im")


def parse_grid(text):
    """Single value, comma list, ``linspace:a:b:n`` or ``rect:a:b:n:c:d:m``.

    Complex values are written like Python literals, e.g. ``0.3+0.2j``.
    """
    try:
        if text.startswith("linspace:"):
            a, b, n = text.split(":")[1:]
            return [complex(x) for x in np.linspace(float(a), float(b), int(n))]
        if text.startswith("rect:"):
            a, b, n, c, d, m = text.split(":")[1:]
            re = np.linspace(float(a), float(b), int(n))
            im = np.linspace(float(c), float(d), int(m))
            return [complex(x, y) for y in im for x in re]
        return [complex(x.replace(" ", "")) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"bad --z grid {text!r}: {exc}") from exc


def default_max_terms():
    raw = os.environ.get(MAX_TERMS_ENV)
    if raw is None:
        return TruncationPolicy().max_terms
    try:
        value = int(raw)
    except ValueError as exc:
        raise InputError(f"{MAX_TERMS_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise InputError(f"{MAX_TERMS_ENV} must be positive")
    return value


def config_from_args(args):
    grid_spec = args.z if args.z is not None else "linspace:%g:%g:%d" % DEFAULT_GRID
    grid = parse_grid(grid_spec)
    if not grid:
        raise InputError("the z grid is empty")
    max_terms = args.max_terms if args.max_terms is not None else default_max_terms()
    paths = {name: getattr(args, name) for name in "SPQRT" if getattr(args, name)}
    cfg = RunConfig(
        q=parse_q(args.q) if args.q is not None else DEFAULT_Q,
        rel_tol=args.rel_tol, abs_tol=args.abs_tol, max_terms=max_terms,
        n_terms=args.n_terms, grid=grid, grid_given=args.z is not None, matrix_paths=paths,
        numerator_paths=args.num or [], denominator_paths=args.den or [],
        out=args.out, fmt=args.format, seed=args.seed, workers=args.workers, tol=args.tol)
    if cfg.workers < 1:
        raise InputError("--workers must be at least 1")
    if cfg.n_terms is not None and cfg.n_terms < 1:
        raise InputError("--n-terms must be at least 1")
    try:
        cfg.policy
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return cfg


# ---------------------------------------------------------------- helpers

def _matrix(cfg, name, default=None):
    path = cfg.matrix_paths.get(name)
    if path is not None:
        return read_matrix(path)
    if default is None:
        raise InputError(f"--{name} is required")
    return default


def _map(cfg, fn, items):
    if cfg.workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(fn, items))


def _series_record(z, result):
    record = {"z": _complex_pair(z)} if z is not None else {}
    record.update({
        "value": matrix_to_document(result.value),
        "terms_used": int(result.terms_used),
        "tail_estimate": float(result.tail_estimate),
    })
    return record


def _kummer_defaults(cfg, commuting):
    rng = np.random.default_rng(cfg.seed)
    if commuting:
        S, T = samples.commuting_diagonal_pair(rng, 2)
    else:
        S, T = samples.noncommuting_pair(rng, 2)
    return _matrix(cfg, "S", S), _matrix(cfg, "T", T)


def _gauss_defaults(cfg):
    P, Q, R = samples.diagonal_gauss_triple(np.random.default_rng(cfg.seed), 2)
    return _matrix(cfg, "P", P), _matrix(cfg, "Q", Q), _matrix(cfg, "R", R)


# ---------------------------------------------------------------- commands

def cmd_eval(kind, cfg):
    qp, policy, n = QParameter(cfg.q), cfg.policy, cfg.n_terms
    if kind == "qgamma":
        P = _matrix(cfg, "P")
        return {"results": [_series_record(None, q_gamma_matrix(P, qp, GammaEvalConfig(policy)))]}
    if kind == "qbeta":
        P, Q = _matrix(cfg, "P"), _matrix(cfg, "Q")
        result = q_beta_matrix(P, Q, qp, GammaEvalConfig(policy))
        record = _series_record(None, result)
        record["integral_route"] = matrix_to_document(result.aux["integral"])
        record["route_difference"] = result.aux["route_difference"]
        return {"results": [record]}

    if kind in ("kummer", "kummer2", "integralU1", "integralU2"):
        S, T = _matrix(cfg, "S"), _matrix(cfg, "T")
        fn = {
            "kummer": lambda z: kummer_solution_u1(S, T, qp, z, policy, n),
            "kummer2": lambda z: kummer_solution_u2(S, T, qp, z, policy, n),
            "integralU1": lambda z: integral_solution_u1(S, T, qp, z, n_terms=n or 300),
            "integralU2": lambda z: integral_solution_u2(S, T, qp, z),
        }[kind]
    elif kind in ("gauss", "gauss2"):
        P, Q, R = _matrix(cfg, "P"), _matrix(cfg, "Q"), _matrix(cfg, "R")
        if kind == "gauss":
            require_commuting(as_matrix(Q), as_matrix(R), "Q and R")
            fn = lambda z: gauss_2phi1(P, Q, R, qp, z, policy, n)  # noqa: E731
        else:
            fn = lambda z: gauss_solution_w2(P, Q, R, qp, z, policy, n)  # noqa: E731
    elif kind == "rphis":
        nums = [read_matrix(p) for p in cfg.numerator_paths]
        dens = [read_matrix(p) for p in cfg.denominator_paths]
        if not (nums or dens):
            raise InputError("rphis needs at least one --num or --den matrix")
        spec = HypergeometricSpec(nums, dens, qp)
        fn = lambda z: rphis_matrix(spec, z, policy, n)  # noqa: E731
    else:
        raise InputError(f"unknown eval kind {kind!r}")
    results = _map(cfg, fn, cfg.grid)
    return {"results": [_series_record(z, r) for z, r in zip(cfg.grid, results)]}


def cmd_verify(suite, cfg):
    qp, policy, n = QParameter(cfg.q), cfg.policy, cfg.n_terms
    tol = cfg.tol if cfg.tol is not None else SUITE_TOLERANCE[suite]
    rng = np.random.default_rng(cfg.seed)
    if suite == "kummer-series":
        S, T = _kummer_defaults(cfg, commuting=False)
        report = suites.kummer_series(S, T, qp, cfg.grid, policy, n, tol)
    elif suite == "kummer-second":
        S, T = _kummer_defaults(cfg, commuting=True)
        report = suites.kummer_second(S, T, qp, cfg.grid, policy, n, tol)
    elif suite == "kummer-integrals":
        S = _matrix(cfg, "S", np.diag([0.5, 1.0]))
        T = _matrix(cfg, "T", np.diag([1.5, 2.0]))
        report = suites.kummer_integrals(S, T, qp, cfg.grid, cfg.grid, n or 300, tol=tol)
    elif suite == "gauss-series":
        P, Q, R = _gauss_defaults(cfg)
        report = suites.gauss_series(P, Q, R, qp, cfg.grid, policy, n, tol)
    elif suite == "gamma-beta":
        P0, Q0 = samples.commuting_pair(rng, 2)
        P, Q = _matrix(cfg, "P", P0), _matrix(cfg, "Q", Q0)
        report = suites.gamma_beta(P, Q, qp, cfg=GammaEvalConfig(policy), tol=tol)
    elif suite == "recurrences":
        S, T = _kummer_defaults(cfg, commuting=True)
        z = cfg.grid[0]
        report = suites.recurrences(S, T, qp, z, [0.3, 0.8, 1.5], tol=tol)
    elif suite == "rules":
        report = suites.rules(rng, qp, tol=tol)
    else:
        raise InputError(f"unknown suite {suite!r}")
    document = {
        "results": [{"label": label, "residual": r} for label, r in report.points],
        "max_residual": report.max_residual,
        "tolerance": tol,
    }
    return document, (EXIT_OK if report.passed else EXIT_RESIDUAL)


def cmd_classify(equation, cfg):
    qp = QParameter(cfg.q)
    if equation == "kummer":
        S, T = _kummer_defaults(cfg, commuting=False)
        coeffs, point = kummer_coeffs_bilateral(S, T, qp), 0.0
    elif equation == "kummer-infinity":
        S, T = _kummer_defaults(cfg, commuting=True)
        coeffs, _ = infinity_transform(S, T, qp)
        point = 0.0
    elif equation == "gauss":
        coeffs, point = gauss_coeffs_bilateral(*_gauss_defaults(cfg), qp), 0.0
    else:
        raise InputError(f"unknown equation {equation!r}")
    # the equation's own point unless the caller asked for others
    points = cfg.grid if cfg.grid_given and equation != "kummer-infinity" else [point]
    results = []
    for z0 in points:
        verdict = classify_singular_point(coeffs, z0)
        results.append({
            "point": "infinity" if equation == "kummer-infinity" else _complex_pair(z0),
            "kind": verdict.kind,
            "witness": verdict.witness,
            "probes": verdict.probes,
        })
    return {"results": results}


SCAN_COLUMNS = ("z_re", "z_im", "status", "value_norm", "terms_used", "residual", "ratio")


def _scan_point(kind, cfg, S, T, P, Q, R, qp):
    policy, n = cfg.policy, cfg.n_terms

    def row(z):
        out = dict.fromkeys(SCAN_COLUMNS)
        out["z_re"], out["z_im"] = z.real, z.imag
        try:
            if kind in ("kummer", "kummer-series", "kummer2", "integralU1", "integralU2"):
                coeffs = kummer_coeffs_bilateral(S, T, qp)
                # kummer-series truncates at exactly max_terms terms
                fixed = cfg.max_terms if kind == "kummer-series" else n
                solve = {
                    "kummer": lambda w: kummer_solution_u1(S, T, qp, w, policy, n),
                    "kummer-series": lambda w: kummer_solution_u1(S, T, qp, w, None, fixed),
                    "kummer2": lambda w: kummer_solution_u2(S, T, qp, w, policy, n),
                    "integralU1": lambda w: integral_solution_u1(S, T, qp, w, n_terms=n or 300),
                    "integralU2": lambda w: integral_solution_u2(S, T, qp, w),
                }[kind]
            else:
                coeffs = gauss_coeffs_bilateral(P, Q, R, qp)
                solve = {
                    "gauss": lambda w: gauss_2phi1(P, Q, R, qp, w, policy, n),
                    "gauss2": lambda w: gauss_solution_w2(P, Q, R, qp, w, policy, n),
                }[kind]
            result = solve(z)
            out["value_norm"] = frobenius(result.value)
            out["terms_used"] = int(result.terms_used)
            out["residual"] = frobenius(
                bilateral_residual(coeffs, lambda w: solve(w).value, z, qp))
            if kind in ("kummer", "kummer-series"):
                out["ratio"] = convergence_probe(S, T, qp, z)
            out["status"] = "ok"
        except (QMatFunError, ValueError, ZeroDivisionError, np.linalg.LinAlgError) as exc:
            out["status"] = type(exc).__name__
        return out

    return row


def _scan_mask(kind, qp, z):
    if z == 0 and kind not in ("kummer", "kummer-series", "gauss"):
        return False
    if kind in ("kummer", "kummer-series", "kummer2"):
        return abs(qp.one_minus_q * z) < 1
    if kind in ("gauss", "gauss2"):
        return abs(z) < 1
    return z.imag == 0 and z.real > 0


def cmd_scan(kind, cfg):
    if kind not in SCAN_KINDS:
        raise InputError(f"unknown scan kind {kind!r}")
    qp = QParameter(cfg.q)
    grid = [complex(z) for z in cfg.grid if _scan_mask(kind, qp, complex(z))]
    if not grid:
        raise InputError("the effective grid is empty (every point is masked)")
    S = T = P = Q = R = None
    if kind.startswith("gauss"):
        P, Q, R = _gauss_defaults(cfg)
    else:
        S, T = _kummer_defaults(cfg, commuting=kind != "kummer" and kind != "kummer-series")
    rows = _map(cfg, _scan_point(kind, cfg, S, T, P, Q, R, qp), grid)
    if not any(r["status"] == "ok" for r in rows):
        return {"results": rows}, EXIT_PRECONDITION
    return {"results": rows}, EXIT_OK


# ---------------------------------------------------------------- output

def render_json(document):
    return json.dumps(document, indent=2) + "\n"


def render_csv(rows):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SCAN_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: ("" if r[k] is None else repr(r[k]) if isinstance(r[k], float)
                             else r[k]) for k in SCAN_COLUMNS})
    return buf.getvalue()


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--q", help="base q: real value or re,im (default 0.5)")
    common.add_argument("--z", help="point or grid: v | v1,v2,... | linspace:a:b:n | "
                                    "rect:a:b:n:c:d:m")
    for name in "SPQRT":
        common.add_argument(f"--{name}", help=f"matrix file for {name} (JSON document)")
    common.add_argument("--num", action="append", help="rphis numerator matrix file")
    common.add_argument("--den", action="append", help="rphis denominator matrix file")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--rel-tol", type=float, default=1e-14)
    common.add_argument("--abs-tol", type=float, default=1e-300)
    common.add_argument("--max-terms", type=int, default=None,
                        help=f"term cap (default 10000 or ${MAX_TERMS_ENV})")
    common.add_argument("--n-terms", type=int, default=None,
                        help="fixed number of series terms instead of adaptive stopping")
    common.add_argument("--seed", type=int, default=0, help="seed for generated matrices")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--tol", type=float, default=None, help="residual tolerance")

    parser = _Parser(prog="qmatfun", description="Matrix q-calculus toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("eval", parents=[common]).add_argument("target", choices=EVAL_KINDS)
    sub.add_parser("verify", parents=[common]).add_argument("target", choices=VERIFY_SUITES)
    sub.add_parser("classify", parents=[common]).add_argument(
        "target", choices=CLASSIFY_EQUATIONS)
    sub.add_parser("scan", parents=[common]).add_argument("target", choices=SCAN_KINDS)
    return parser


def _error_document(exc):
    kind = exc.kind if isinstance(exc, QMatFunError) else type(exc).__name__
    return {"error": {"kind": kind, "message": str(exc)}}


def run(argv=None):
    """Run the command line; return ``(exit_code, rendered_output, out_path)``."""
    out = None
    try:
        args = build_parser().parse_args(argv)
        out = args.out
        cfg = config_from_args(args)
        if cfg.fmt == "csv" and args.command != "scan":
            raise InputError("csv output is only available for scan")
        code = EXIT_OK
        if args.command == "eval":
            document = cmd_eval(args.target, cfg)
        elif args.command == "verify":
            document, code = cmd_verify(args.target, cfg)
        elif args.command == "classify":
            document = cmd_classify(args.target, cfg)
        else:
            document, code = cmd_scan(args.target, cfg)
    except InputError as exc:
        return EXIT_IO, render_json({"error": {"kind": "InputError", "message": str(exc)}}), out
    except (QMatFunError, ValueError, ZeroDivisionError) as exc:
        return EXIT_PRECONDITION, render_json(_error_document(exc)), out

    if cfg.fmt == "csv":
        return code, render_csv(document["results"]), out
    report = {"meta": {"command": f"{args.command} {args.target}",
                       "config": cfg.describe(), "seed": cfg.seed, "version": __version__}}
    report.update(document)
    return code, render_json(report), out


def main(argv=None):
    code, text, out = run(argv)
    try:
        _emit(text, out)
    except InputError as exc:
        sys.stderr.write(f"qmatfun: {exc}\n")
        return EXIT_IO
    if code != EXIT_OK:
        sys.stderr.write(f"qmatfun: exit {code}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())

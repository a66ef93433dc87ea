"""Batch command-line interface.

Commands
--------
sscm DATA.csv        sample spatial sign covariance matrix
kendall DATA.csv     spatial Kendall's tau matrix
shape DATA.csv       shape-matrix estimate reconstructed from the SSCM
map --lambdas ...    shape eigenvalues -> SSCM eigenvalues
invmap --deltas ...  SSCM eigenvalues -> shape eigenvalues
asymcov ...          asymptotic covariance of the sample SSCM
simulate ...         Monte Carlo sampling distribution of the SSCM
pin-fixtures         regenerate the recorded Monte Carlo oracle constants

Input CSV files hold one observation per row.  The first row is treated as a
header and skipped unless ``--no-header`` is given.  Results are written to
standard output as a single JSON object (default) or as a bare CSV matrix;
floats are serialized with 17 significant digits so values round-trip
exactly.  Exit codes: 0 success, 1 invalid input, 2 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from signshape.eigenmoments import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    QuadratureError,
    Spectrum,
    sscm_asymptotic_cov,
    sscm_eigenvalues,
)
from signshape.estimators import sample_kendall_tau, sample_sscm
from signshape.inversion import (
    ConvergenceError,
    estimate_shape,
    shape_eigenvalues,
    sscm_eigensystem,
)
from signshape.oracle import EllipticalSampler, mc_sampling_distribution, pin_fixtures

__all__ = ["entrypoint", "main"]

_OK, _INVALID_INPUT, _NO_CONVERGENCE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    # argument errors are invalid input, not the default argparse status 2
    def error(self, message):
        self.exit(_INVALID_INPUT, f"{self.prog}: error: {message}\n")


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x!r}")
    return "%.17g" % x


def _write_json(obj, out: list) -> None:
    if isinstance(obj, dict):
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(key))
            out.append(": ")
            _write_json(value, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, value in enumerate(obj):
            if i:
                out.append(", ")
            _write_json(value, out)
        out.append("]")
    elif isinstance(obj, np.ndarray):
        _write_json(obj.tolist(), out)
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def _dumps(payload: dict) -> str:
    out: list = []
    _write_json(payload, out)
    return "".join(out)


def _emit(payload: dict, csv_payload, fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(_dumps(payload) + "\n")
        return
    rows = np.atleast_2d(np.asarray(csv_payload, dtype=float))
    writer = csv.writer(sys.stdout, lineterminator="\n")
    for row in rows:
        writer.writerow([_format_float(float(x)) for x in row])


def _read_csv(path: str, no_header: bool) -> np.ndarray:
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    if not no_header:
        if not rows:
            raise ValueError(f"{path}: empty file")
        rows = rows[1:]
    rows = [row for row in rows if row]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    width = len(rows[0])
    data = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"{path}: row {i + 1} has {len(row)} fields, expected {width}")
        try:
            data[i] = [float(cell) for cell in row]
        except ValueError:
            raise ValueError(f"{path}: non-numeric value in row {i + 1}") from None
    return data


def _parse_spectrum(text: str, flag: str) -> Spectrum:
    try:
        values = np.array([float(tok) for tok in text.split(",")], dtype=float)
    except ValueError:
        raise ValueError(f"{flag} must be a comma-separated list of numbers") from None
    ordered = np.sort(values)[::-1]
    if not np.array_equal(ordered, values):
        print(f"warning: {flag} reordered to descending", file=sys.stderr)
    return Spectrum(ordered)


def _quad_cfg(args) -> QuadratureConfig:
    if args.rel_tol is None:
        return DEFAULT_QUADRATURE
    return QuadratureConfig(rel_tol=args.rel_tol)


def _spectrum_list(spectrum) -> list:
    return [float(x) for x in np.asarray(spectrum)]


def _median_metadata(est) -> dict | None:
    if est.median is None:
        return None
    return {
        "iterations": est.median.iterations,
        "converged": bool(est.median.converged),
        "residual_gradient_norm": est.median.residual_gradient_norm,
    }


def _cmd_sscm(args):
    data = _read_csv(args.data, args.no_header)
    est = sample_sscm(data, tol=args.tol, max_iter=args.max_iter)
    status = _OK if est.median.converged else _NO_CONVERGENCE
    payload = {
        "command": "sscm",
        "matrix": est.matrix,
        "metadata": {
            "n": est.n_used,
            "p": est.matrix.shape[0],
            "kind": est.kind,
            "trace": float(np.trace(est.matrix)),
            "center": est.center,
            "median": _median_metadata(est),
            "tol": args.tol,
            "max_iter": args.max_iter,
        },
    }
    return payload, est.matrix, status


def _cmd_kendall(args):
    data = _read_csv(args.data, args.no_header)
    est = sample_kendall_tau(data)
    payload = {
        "command": "kendall",
        "matrix": est.matrix,
        "metadata": {
            "n": est.n_used,
            "p": est.matrix.shape[0],
            "kind": est.kind,
            "trace": float(np.trace(est.matrix)),
            "center": None,
        },
    }
    return payload, est.matrix, _OK


def _cmd_shape(args):
    data = _read_csv(args.data, args.no_header)
    cfg = _quad_cfg(args)
    est = sample_sscm(data, tol=args.tol, max_iter=args.max_iter)
    status = _OK
    try:
        shape = estimate_shape(est, tol=args.tol, max_iter=args.max_iter, cfg=cfg)
    except ConvergenceError as exc:
        print(f"warning: {exc}", file=sys.stderr)
        shape = exc.result
        status = _NO_CONVERGENCE
    sscm_spectrum, _ = sscm_eigensystem(est.matrix)
    inv = shape.inversion
    payload = {
        "command": "shape",
        "matrix": shape.matrix,
        "lambda": _spectrum_list(inv.spectrum),
        "delta": _spectrum_list(sscm_spectrum),
        "converged": bool(inv.converged),
        "iterations": inv.iterations,
        "residual": inv.residual,
        "sscm": est.matrix,
        "metadata": {
            "n": est.n_used,
            "p": est.matrix.shape[0],
            "trace": float(np.trace(shape.matrix)),
            "median": _median_metadata(est),
            "tol": args.tol,
            "rel_tol": cfg.rel_tol,
            "max_iter": args.max_iter,
        },
    }
    return payload, shape.matrix, status


def _cmd_map(args):
    spectrum = _parse_spectrum(args.lambdas, "--lambdas")
    cfg = _quad_cfg(args)
    out = sscm_eigenvalues(spectrum, cfg)
    payload = {
        "command": "map",
        "lambda": _spectrum_list(spectrum),
        "delta": _spectrum_list(out),
        "metadata": {
            "p": len(spectrum),
            "rel_tol": cfg.rel_tol,
            "abs_tol": cfg.abs_tol,
            "max_subdivisions": cfg.max_subdivisions,
        },
    }
    return payload, np.asarray(out), _OK


def _cmd_invmap(args):
    spectrum = _parse_spectrum(args.deltas, "--deltas")
    cfg = _quad_cfg(args)
    result = shape_eigenvalues(spectrum, tol=args.tol, max_iter=args.max_iter, cfg=cfg)
    payload = {
        "command": "invmap",
        "delta": _spectrum_list(spectrum),
        "lambda": _spectrum_list(result.spectrum),
        "converged": bool(result.converged),
        "iterations": result.iterations,
        "residual": result.residual,
        "metadata": {
            "p": len(spectrum),
            "tol": args.tol,
            "rel_tol": cfg.rel_tol,
            "max_iter": args.max_iter,
        },
    }
    return payload, np.asarray(result.spectrum), _OK if result.converged else _NO_CONVERGENCE


def _cmd_asymcov(args):
    cfg = _quad_cfg(args)
    status = _OK
    if (args.data is None) == (args.lambdas is None):
        raise ValueError("asymcov needs either a data file or --lambdas, not both")
    if args.lambdas is not None:
        spectrum = _parse_spectrum(args.lambdas, "--lambdas")
        basis = np.eye(len(spectrum))
        source = "inline"
        n = None
    else:
        data = _read_csv(args.data, args.no_header)
        est = sample_sscm(data, tol=args.tol, max_iter=args.max_iter)
        try:
            shape = estimate_shape(est, tol=args.tol, max_iter=args.max_iter, cfg=cfg)
        except ConvergenceError as exc:
            print(f"warning: {exc}", file=sys.stderr)
            shape = exc.result
            status = _NO_CONVERGENCE
        spectrum = shape.inversion.spectrum
        _, basis = sscm_eigensystem(est.matrix)
        source = args.data
        n = est.n_used
    cov = sscm_asymptotic_cov(basis, spectrum, cfg)
    payload = {
        "command": "asymcov",
        "lambda": _spectrum_list(spectrum),
        "delta": _spectrum_list(sscm_eigenvalues(spectrum, cfg)),
        "w": cov.w,
        "gamma": cov.gamma,
        "eigenvectors": cov.eigenvectors,
        "metadata": {
            "p": len(spectrum),
            "n": n,
            "source": source,
            "rel_tol": cfg.rel_tol,
        },
    }
    return payload, cov.w, status


def _cmd_simulate(args):
    spectrum = _parse_spectrum(args.lambdas, "--lambdas")
    sampler = EllipticalSampler(
        shape_root=np.diag(np.sqrt(np.asarray(spectrum))),
        radial=args.radial,
        seed=args.seed,
    )
    mean_sscm, emp_cov = mc_sampling_distribution(
        sampler, n=args.n, replicates=args.replicates, seed=args.seed, median_tol=args.tol
    )
    eigvals = np.sort(np.linalg.eigvalsh(mean_sscm))[::-1]
    payload = {
        "command": "simulate",
        "mean_sscm": mean_sscm,
        "mean_eigenvalues": eigvals,
        "empirical_cov": emp_cov,
        "metadata": {
            "p": mean_sscm.shape[0],
            "n": args.n,
            "replicates": args.replicates,
            "seed": args.seed,
            "radial": args.radial,
            "lambda": _spectrum_list(spectrum),
        },
    }
    return payload, mean_sscm, _OK


def _cmd_pin_fixtures(args):
    fixtures = pin_fixtures(draws=args.draws)
    text = json.dumps(fixtures, indent=2)
    if args.out == "-":
        sys.stdout.write(text + "\n")
    else:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
        print(f"wrote {args.out}", file=sys.stderr)
    return None, None, _OK


def _add_common(sub, data=False):
    if data:
        sub.add_argument("data", help="CSV file, observations in rows")
        sub.add_argument(
            "--no-header", action="store_true", help="treat the first row as data, not a header"
        )
    sub.add_argument("--tol", type=float, default=None, help="iteration tolerance")
    sub.add_argument("--rel-tol", type=float, default=None, help="quadrature relative tolerance")
    sub.add_argument("--max-iter", type=int, default=None, help="iteration cap")
    sub.add_argument("--output", choices=("json", "csv"), default="json")


def build_parser() -> _Parser:
    parser = _Parser(prog="signshape", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("sscm", help="sample spatial sign covariance matrix")
    _add_common(sub, data=True)
    sub.set_defaults(func=_cmd_sscm)

    sub = commands.add_parser("kendall", help="spatial Kendall's tau matrix")
    _add_common(sub, data=True)
    sub.set_defaults(func=_cmd_kendall)

    sub = commands.add_parser("shape", help="shape matrix estimated from the SSCM")
    _add_common(sub, data=True)
    sub.set_defaults(func=_cmd_shape)

    sub = commands.add_parser("map", help="shape eigenvalues to SSCM eigenvalues")
    sub.add_argument("--lambdas", required=True, help="comma-separated shape eigenvalues")
    _add_common(sub)
    sub.set_defaults(func=_cmd_map)

    sub = commands.add_parser("invmap", help="SSCM eigenvalues to shape eigenvalues")
    sub.add_argument("--deltas", required=True, help="comma-separated SSCM eigenvalues")
    _add_common(sub)
    sub.set_defaults(func=_cmd_invmap)

    sub = commands.add_parser("asymcov", help="asymptotic covariance of the sample SSCM")
    sub.add_argument("data", nargs="?", default=None, help="CSV file, observations in rows")
    sub.add_argument("--lambdas", default=None, help="comma-separated shape eigenvalues")
    sub.add_argument(
        "--no-header", action="store_true", help="treat the first row as data, not a header"
    )
    sub.add_argument("--tol", type=float, default=None)
    sub.add_argument("--rel-tol", type=float, default=None)
    sub.add_argument("--max-iter", type=int, default=None)
    sub.add_argument("--output", choices=("json", "csv"), default="json")
    sub.set_defaults(func=_cmd_asymcov)

    sub = commands.add_parser("simulate", help="Monte Carlo sampling distribution of the SSCM")
    sub.add_argument("--lambdas", required=True, help="comma-separated shape eigenvalues")
    sub.add_argument("--n", type=int, required=True, help="observations per replicate")
    sub.add_argument("--replicates", type=int, default=100)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--radial", choices=("chi", "constant", "coupled"), default="chi")
    _add_common(sub)
    sub.set_defaults(func=_cmd_simulate)

    sub = commands.add_parser("pin-fixtures", help="regenerate Monte Carlo oracle constants")
    sub.add_argument("--draws", type=int, default=10_000_000)
    sub.add_argument("--out", default="-", help="output path, '-' for stdout")
    sub.set_defaults(func=_cmd_pin_fixtures)

    return parser


def _fill_defaults(args) -> None:
    # per-command defaults shared across iterative routines
    if getattr(args, "tol", None) is None:
        args.tol = 1e-10 if args.command in ("sscm", "kendall", "simulate") else 1e-9
    if getattr(args, "max_iter", None) is None:
        args.max_iter = 1000 if args.command in ("sscm", "kendall") else 100


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _fill_defaults(args)
    try:
        payload, csv_payload, status = args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _INVALID_INPUT
    except (QuadratureError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _NO_CONVERGENCE
    if payload is not None:
        _emit(payload, csv_payload, args.output if hasattr(args, "output") else "json")
    return status


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

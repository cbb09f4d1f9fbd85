"""Command-line front end.

Subcommands: moments, bessel, kernel-eval, abel-eval, boundary, verify-measure.
verify-measure exits 0 (pass), 1 (fail) or 2 (inconclusive); every
subcommand exits 3 on a usage or schema error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import platform
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .abel import Analysis, RuleMatrix, SGrid, Synthesis, abel_pairing
from .boundary import BoundaryError, boundary_function
from .coeff import CoeffMatrix
from .config import (
    MATRIX_SCHEMAS,
    RunConfig,
    SpecError,
    load_measure,
    parse_complex,
    parse_matrix,
    parse_vector,
)
from .kernel import kernel_eval
from .measures import MuFunction, constant, exponential, fourier_coefficients
from .moment import bessel_growth
from .verify import RNG_ALGORITHM, membership_test, reproduction_check

log = logging.getLogger("abelkernel")

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_json(arg: str, what: str):
    """Inline JSON or a path to a JSON file."""
    text = arg
    if not arg.lstrip().startswith(("{", "[")):
        try:
            text = Path(arg).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {what} {arg!r}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON for {what}: {exc}") from None


def _pair(text: str, conv=float):
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"expected two comma-separated values, got {text!r}")
    return conv(parts[0]), conv(parts[1])


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


def emit_trace(traces: dict, outdir) -> list:
    """Write one CSV per Abel pairing.

    Columns: s, re_g, im_g, re_extrapolant, im_extrapolant, est_error, where the
    extrapolant is the diagonal Neville entry after that sample and est_error
    the change from the previous diagonal entry (blank on the first row).
    """
    if not traces:
        log.warning("no traces to write")
        return []
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, res in traces.items():
        rows = [(s, re, im, ext.real, ext.imag, "" if np.isnan(err) else err)
                for s, re, im, ext, err in res.trace()]
        path = outdir / f"{name}.csv"
        path.write_text(_csv(["s", "re_g", "im_g", "re_extrapolant", "im_extrapolant", "est_error"], rows))
        paths.append(path)
    return paths


def _fmt_complex(z) -> str:
    z = complex(z)
    return f"{z.real!r}{z.imag:+}j"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_moments(args) -> int:
    m = load_measure(_read_json(args.measure, "measure"), args.resolution, "/measure")
    ks = np.arange(-args.kmax, args.kmax + 1)
    mu = fourier_coefficients(m, ks)
    _write(_csv(["k", "re", "im"], ((int(k), c.real, c.imag) for k, c in zip(ks, mu))), args.out)
    return 0


def cmd_bessel(args) -> int:
    m = load_measure(_read_json(args.measure, "measure"), args.resolution, "/measure")
    try:
        orders = [int(v) for v in args.orders.split(",")]
    except ValueError:
        raise UsageError(f"bad --orders {args.orders!r}") from None
    report = bessel_growth(m, orders)
    _write(json.dumps(report.to_json(), indent=2) + "\n", args.out)
    return 0


def _matrix_and_measure(args):
    measure = None
    if getattr(args, "measure", None):
        measure = load_measure(_read_json(args.measure, "measure"), args.resolution, "/measure")
    C = parse_matrix(_read_json(args.matrix, "matrix"), measure, "/matrix")
    return C, measure


def cmd_kernel_eval(args) -> int:
    C, _ = _matrix_and_measure(args)
    pts = [parse_complex(p) for p in _read_json(args.points, "points")]
    rows = []
    for w in pts:
        for z in pts:
            try:
                kv = kernel_eval(C, w, z, args.tol)
            except ValueError as exc:
                # keep the row, mark it unusable
                log.warning("K(%s, %s): %s", w, z, exc)
                rows.append((_fmt_complex(w), _fmt_complex(z), float("nan"), float("nan"), float("inf")))
                continue
            rows.append((_fmt_complex(w), _fmt_complex(z), kv.value.real, kv.value.imag, kv.error_bound))
    _write(_csv(["w", "z", "re_k", "im_k", "error_bound"], rows), args.out)
    return 0


def _operator(doc, measure, base):
    if not isinstance(doc, dict) or "type" not in doc:
        raise SpecError(base, "operator spec must be an object with a 'type'")
    t = doc["type"]
    if t in ("synthesis", "analysis"):
        if measure is None:
            raise UsageError(f"{t} operator needs --measure")
        cls = Synthesis if t == "synthesis" else Analysis
        return cls(measure, bool(doc.get("conjugated", False)))
    if t == "periodic":
        shape = doc.get("shape", [None, None])
        return RuleMatrix.periodic([parse_complex(v) for v in doc["pattern"]], shape)
    if t == "matrix":
        return np.array([[parse_complex(v) for v in row] for row in doc["entries"]], dtype=complex)
    if t in MATRIX_SCHEMAS or t == "transpose":
        if t == "transpose":
            return parse_matrix(doc["of"], measure, base + "/of").transpose()
        return parse_matrix(doc, measure, base)
    raise SpecError(base + "/type", f"unknown operator type {t!r}")


def _mu_function(doc, measure, base) -> MuFunction:
    if measure is None:
        raise UsageError("L^2(mu) vectors need --measure")
    if isinstance(doc, dict):
        if doc.get("type") == "exponential":
            return exponential(measure, int(doc["n"]))
        if doc.get("type") == "constant":
            return constant(measure, parse_complex(doc.get("value", 1.0)))
        if "values" in doc:
            return MuFunction([parse_complex(v) for v in doc["values"]], measure)
    raise SpecError(base, "expected {'type': 'exponential'|'constant', ...} or {'values': [...]}")


def cmd_abel_eval(args) -> int:
    measure = None
    if args.measure:
        measure = load_measure(_read_json(args.measure, "measure"), args.resolution, "/measure")
    t2 = _operator(_read_json(args.t2, "T2"), measure, "/t2")
    t1 = _operator(_read_json(args.t1, "T1"), measure, "/t1")
    xdoc, ydoc = _read_json(args.x, "x"), _read_json(args.y, "y")
    x = _mu_function(xdoc, measure, "/x") if isinstance(t1, Analysis) else parse_vector(xdoc, "/x")
    y = _mu_function(ydoc, measure, "/y") if isinstance(t2, Synthesis) else parse_vector(ydoc, "/y")
    k0, k1 = _pair(args.grid, int)
    try:
        res = abel_pairing(t2, t1, x, y, SGrid.geometric(k0, k1), args.tol)
    except ValueError as exc:
        log.warning("%s", exc)
        _write(json.dumps({"status": "error", "reason": str(exc)}, indent=2) + "\n", args.out)
        return 0
    _write(json.dumps(res.to_json(), indent=2) + "\n", args.out)
    if args.emit_trace:
        emit_trace({"abel": res}, args.emit_trace)
    return 0


def cmd_boundary(args) -> int:
    C, measure = _matrix_and_measure(args)
    if measure is None:
        raise UsageError("boundary needs --measure")
    w = complex(*_pair(args.w))
    try:
        K = boundary_function(C, w, measure, args.tol)
        values, errors = K.values, K.diagnostics.est_error
    except BoundaryError as exc:
        log.error("%s", exc)
        values, errors = exc.diagnostics.value, exc.diagnostics.est_error
        _write(_csv(["x", "re", "im", "est_error"],
                    zip(measure.nodes, values.real, values.imag, errors)), args.out)
        return EXIT_INCONCLUSIVE
    except ValueError as exc:
        # truncation cap leaves too few grid points
        log.error("%s", exc)
        return EXIT_INCONCLUSIVE
    _write(_csv(["x", "re", "im", "est_error"], zip(measure.nodes, values.real, values.imag, errors)), args.out)
    return 0


def run_verify(cfg: RunConfig, reproducible: bool = False):
    """Run membership (and optionally reproduction) checks; returns (report dict, traces, exit code)."""
    m = cfg.measure()
    C = cfg.matrix(m)
    grid = cfg.grid()
    samples = cfg.sample_set()
    verdict = membership_test(C, m, samples, cfg.tol, grid)
    repro = None
    pairs = cfg.reproduction_pairs()
    if pairs:
        repro = reproduction_check(C, m, pairs, cfg.tol, grid)

    statuses = [verdict.status] + ([repro.status] if repro else [])
    status = "fail" if "fail" in statuses else "inconclusive" if "inconclusive" in statuses else "pass"
    code = {"pass": EXIT_PASS, "fail": EXIT_FAIL, "inconclusive": EXIT_INCONCLUSIVE}[status]

    meta = {
        "tool": "abelkernel",
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "config_sha256": cfg.digest(),
        "seed": cfg.seed,
        "rng": RNG_ALGORITHM,
        "matrix": repr(C),
        "measure_nodes": len(m),
    }
    if not reproducible:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat()
    report = {
        "meta": meta,
        "config": cfg.to_json(),
        "status": status,
        "exit_code": code,
        "membership": verdict.to_json(),
        "reproduction": repro.to_json() if repro else None,
    }
    traces = {}
    for i, o in enumerate(verdict.per_sample):
        for stage, res in o.traces.items():
            traces[f"sample{i:03d}_{stage}"] = res
    return report, traces, code


def cmd_verify(args) -> int:
    if args.config:
        raw = _read_json(args.config, "config")
        if not isinstance(raw, dict):
            raise SpecError("", "config must be an object")
    else:
        if not (args.matrix and args.measure):
            raise UsageError("verify-measure needs --config or both --matrix and --measure")
        raw = {"matrix": _read_json(args.matrix, "matrix"), "measure": _read_json(args.measure, "measure")}
    for key, val in (("tol", args.tol), ("seed", args.seed), ("resolution", args.resolution),
                     ("reproduction_pairs", args.pairs)):
        if val is not None:
            raw[key] = val
    if args.grid:
        raw["grid"] = list(_pair(args.grid, int))
    cfg = RunConfig.from_json(raw, args.config)
    report, traces, code = run_verify(cfg, args.reproducible)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(text)
    if not args.quiet:
        sys.stdout.write(text)
    if args.emit_trace:
        target = Path(args.emit_trace if isinstance(args.emit_trace, str) else (args.out or ".")) / "traces"
        emit_trace(traces, target)
    return code


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="abelkernel", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"abelkernel {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, measure_required=False):
        sp.add_argument("--resolution", type=int, default=None, help="nodes for Lebesgue/density measures")
        sp.add_argument("--out", default=None, help="output file (directory for verify-measure)")

    sp = sub.add_parser("moments", help="Fourier coefficients mu_hat(k), -K <= k <= K, as CSV")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--kmax", type=int, default=16)
    common(sp)
    sp.set_defaults(func=cmd_moments)

    sp = sub.add_parser("bessel", help="largest eigenvalue of M_N over orders, as JSON")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--orders", default="8,16,32,64")
    common(sp)
    sp.set_defaults(func=cmd_bessel)

    sp = sub.add_parser("kernel-eval", help="K_C(w, z) over all pairs of points, as CSV")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--points", required=True, help="JSON list of [re, im] pairs")
    sp.add_argument("--measure", default=None, help="needed only to normalize rank-one specs")
    sp.add_argument("--tol", type=float, default=1e-12)
    common(sp)
    sp.set_defaults(func=cmd_kernel_eval)

    sp = sub.add_parser("abel-eval", help="Abel limit of <T2 D_s T1 x, y>, as JSON")
    sp.add_argument("--t2", required=True)
    sp.add_argument("--t1", required=True)
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--grid", default="3,12", help="k0,k1 for s_k = 1 - 2^-k")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--measure", default=None)
    sp.add_argument("--emit-trace", default=None, metavar="DIR")
    common(sp)
    sp.set_defaults(func=cmd_abel_eval)

    sp = sub.add_parser("boundary", help="boundary function K*_w on the measure nodes, as CSV")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--measure", required=True)
    sp.add_argument("--w", required=True, help="RE,IM")
    sp.add_argument("--tol", type=float, default=1e-10)
    common(sp)
    sp.set_defaults(func=cmd_boundary)

    sp = sub.add_parser("verify-measure", help="test mu in M(K_C); exit 0 pass, 1 fail, 2 inconclusive")
    sp.add_argument("--config", default=None, help="combined run config (matrix, measure, options)")
    sp.add_argument("--matrix", default=None)
    sp.add_argument("--measure", default=None)
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--grid", default=None, help="k0,k1")
    sp.add_argument("--pairs", type=int, default=None, help="random (w, z) pairs for the reproduction check")
    sp.add_argument("--emit-trace", nargs="?", const=True, default=None, metavar="DIR",
                    help="write per-sample trace CSVs (under DIR/traces, default --out)")
    sp.add_argument("--reproducible", action="store_true", help="omit the timestamp from the report")
    sp.add_argument("--quiet", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, UsageError) as exc:
        sys.stderr.write(f"abelkernel {args.command}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

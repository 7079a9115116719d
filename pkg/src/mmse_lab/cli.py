"""Command-line front end.

Every subcommand reads a distribution (file path, inline JSON or a corpus
name) and writes CSV or JSON to stdout or ``--out``. Exit codes: 0 on
success, 2 for bad input or usage, 3 when quadrature or a verification
step fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import analysis, calculus, capacity, channel, infotheory, oracle
from .corpus import continuous_corpus, default_corpus, unit_power_corpus
from .distributions import from_json
from .errors import DistributionError, MmseLabError, QuadratureError, VerificationError
from .mmse import mmse_at, mmse_bounds

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_INPUT, EXIT_FAILURE = 0, 2, 3

CURVE_HEADER = ["snr", "mmse", "quad_err", "upper_bound"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def fmt(x, pretty=False):
    """17 significant digits (round-trip exact) unless ``pretty``."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.6g}" if pretty else f"{float(x):.17g}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def load_dist(text):
    corpus = {**continuous_corpus(), **unit_power_corpus(), **default_corpus()}
    if text in corpus:
        return corpus[text]
    stem = Path(text).stem
    if not Path(text).exists() and not text.lstrip().startswith("{") and stem in corpus:
        return corpus[stem]
    try:
        return from_json(text)
    except OSError as exc:
        raise DistributionError(f"cannot read distribution {text!r}: {exc}") from exc


def parse_grid(text):
    """``lin:lo:hi:n`` or ``log:lo:hi:n``."""
    try:
        kind, lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise DistributionError(f"bad grid {text!r}; expected lin|log:lo:hi:n") from exc
    if n < 1 or lo < 0 or hi < lo:
        raise DistributionError(f"bad grid {text!r}")
    if kind == "lin":
        return np.linspace(lo, hi, n)
    if kind == "log":
        if lo <= 0:
            raise DistributionError("log grid needs lo > 0")
        return np.geomspace(lo, hi, n)
    raise DistributionError(f"unknown grid kind {kind!r}")


def parse_floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise DistributionError(f"bad number list {text!r}") from exc


def parse_verify(text):
    """``mc:seed=S,n=N`` or ``fd``; returns a dict."""
    if text is None:
        return None
    if text == "fd":
        return {"kind": "fd"}
    if not text.startswith("mc"):
        raise DistributionError(f"unknown --verify mode {text!r}")
    out = {"kind": "mc", "seed": 0, "n": 10**5}
    rest = text[2:].lstrip(":")
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        if key not in ("seed", "n"):
            raise DistributionError(f"unknown --verify key {key!r}")
        out[key] = int(float(val))
    return out


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload, args):
    payload = {"schema": f"mmse_lab/{args.command}/v{SCHEMA_VERSION}", **payload}
    _emit(json.dumps(_jsonable(payload), indent=2 if args.pretty else None) + "\n", args.out)


def _csv(header, rows, pretty=False):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x, pretty) for x in row])
    return buf.getvalue()


def _mc_block(verify, value, estimate):
    return {"value": estimate.value, "stderr": estimate.stderr, "n": estimate.n_samples,
            "seed": estimate.seed, "z": estimate.z_score(value),
            "within_4_stderr": estimate.covers(value, 4.0)}


def _verify_seed(args, verify):
    return verify.get("seed", args.seed)


# ---------------------------------------------------------------- subcommands

def cmd_curve(args):
    dist = load_dist(args.dist)
    grid = parse_grid(args.snr_grid) if args.snr_grid else np.array([args.snr])
    tol = {"reltol": args.tol} if args.tol else {}
    rows = []
    for s in grid:
        val, err = mmse_at(dist, float(s), **tol)
        rows.append((s, val, err, mmse_bounds(dist, float(s))))
    verify = parse_verify(args.verify)
    if args.format == "json" or verify:
        payload = {"rows": [dict(zip(CURVE_HEADER, r)) for r in rows]}
        if verify and verify["kind"] == "mc":
            payload["verify"] = [
                _mc_block(verify, r[1], oracle.mc_mmse(dist, float(r[0]), verify["n"],
                                                       _verify_seed(args, verify)))
                for r in rows]
            if not all(v["within_4_stderr"] for v in payload["verify"]):
                _emit_json(payload, args)
                raise VerificationError("Monte Carlo oracle disagrees with quadrature")
        _emit_json(payload, args)
    else:
        _emit(_csv(CURVE_HEADER, rows, args.pretty), args.out)


def cmd_post(args):
    dist = load_dist(args.dist)
    ys = parse_grid(args.y_grid) if args.y_grid else np.array(parse_floats(args.y))
    k = args.k_max
    header = ["y", "density", "mean"] + [f"M{i}" for i in range(2, k + 1)]
    rows = []
    for y in ys:
        s = channel.posterior_summary(dist, float(y), args.snr, k)
        rows.append((y, s.density, s.mean, *s.central))
    verify = parse_verify(args.verify)
    if verify and verify["kind"] == "mc":
        checks = []
        for row in rows:
            est = oracle.mc_posterior_slice(dist, float(row[0]), args.snr, verify["n"],
                                            _verify_seed(args, verify), k)
            checks.append({"y": row[0], "mean": _mc_block(verify, row[2], est.mean),
                           **{f"M{i}": _mc_block(verify, row[1 + i], est.central[i])
                              for i in range(2, k + 1)}})
        _emit_json({"rows": [dict(zip(header, r)) for r in rows], "verify": checks}, args)
        return
    _emit(_csv(header, rows, args.pretty), args.out)


def cmd_deriv(args):
    dist = load_dist(args.dist)
    orders = [int(o) for o in parse_floats(args.orders)]
    verify = parse_verify(args.verify)
    reports = []
    for order in orders:
        if verify and verify["kind"] == "fd":
            r = calculus.derivative_report(dist, args.snr, order, tol=args.tol)
            reports.append(r.__dict__)
        else:
            reports.append({"snr": args.snr, "order": order,
                            "analytic": calculus.mmse_derivative(dist, args.snr, order)})
    if args.pretty and not args.out:
        keys = list(reports[0])
        widths = [max(len(k), 14) for k in keys]
        lines = ["  ".join(k.rjust(w) for k, w in zip(keys, widths))]
        for r in reports:
            lines.append("  ".join(fmt(r[k], True).rjust(w) for k, w in zip(keys, widths)))
        _emit("\n".join(lines) + "\n", None)
        return
    _emit_json({"reports": reports}, args)


def cmd_info(args):
    dist = load_dist(args.dist)
    scale = infotheory.to_bits if args.bits else (lambda x: x)
    mi = infotheory.mutual_information(dist, args.snr)
    payload = {"snr": args.snr, "units": "bits" if args.bits else "nats",
               "mutual_information": scale(mi)}
    if args.entropy:
        payload["entropy"] = scale(infotheory.discrete_entropy(dist))
    if args.diff_entropy:
        payload["differential_entropy"] = scale(infotheory.differential_entropy(dist))
    verify = parse_verify(args.verify)
    if verify and verify["kind"] == "mc":
        est = oracle.mc_mutual_information(dist, args.snr, verify["n"], _verify_seed(args, verify))
        # The oracle block stays in nats whatever the display unit.
        payload["verify"] = _mc_block(verify, mi, est)
    _emit_json(payload, args)


def cmd_cross(args):
    dist = load_dist(args.dist)
    report = analysis.single_crossing(dist, args.sigma2)
    if args.csv_out:
        rows = zip(report.gammas, report.f_grid)
        Path(args.csv_out).write_text(_csv(["gamma", "f"], rows, args.pretty))
    _emit_json(report.to_json(), args)


def cmd_capacity(args):
    if args.which == "wiretap":
        closed = capacity.secrecy_capacity(args.snr1, args.snr2)
        payload = {"snr1": args.snr1, "snr2": args.snr2, "gaussian_secrecy_capacity": closed}
        if args.dist:
            payload["secrecy_gap"] = capacity.secrecy_gap(load_dist(args.dist), args.snr1,
                                                          args.snr2)
    elif args.which == "broadcast":
        alphas = parse_floats(args.alphas) if args.alphas else list(np.linspace(0, 1, 11))
        region = capacity.broadcast_region(args.snr1, args.snr2, alphas)
        payload = {"snr1": args.snr1, "snr2": args.snr2,
                   "region": [s.__dict__ for s in region]}
    else:
        if not args.dist or args.varz is None:
            raise DistributionError("capacity epi needs --dist and --varz")
        payload = dict(capacity.epi_gaussian_check(load_dist(args.dist), args.varz).__dict__)
    _emit_json(payload, args)


def cmd_check(args):
    from .checks import run_checks

    summary = run_checks(args.corpus, seed=args.seed)
    _emit_json(summary, args)
    if not summary["passed"]:
        raise VerificationError("invariant suite reported failures")


# ---------------------------------------------------------------- parser

def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--out", help="write results to this path instead of stdout")
    common.add_argument("--pretty", action="store_true", help="human-readable output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--verify", default=None, help="mc:seed=S,n=N or fd")

    p = _Parser(prog="mmse-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("curve", parents=[common], help="MMSE over an SNR grid")
    c.add_argument("--dist", required=True)
    c.add_argument("--snr", type=float, default=1.0)
    c.add_argument("--snr-grid")
    c.add_argument("--format", choices=["csv", "json"], default="csv")
    c.set_defaults(func=cmd_curve)

    c = sub.add_parser("post", parents=[common], help="posterior slices at given outputs")
    c.add_argument("--dist", required=True)
    c.add_argument("--snr", type=float, required=True)
    c.add_argument("--y", default="0")
    c.add_argument("--y-grid")
    c.add_argument("--k-max", type=int, default=4)
    c.set_defaults(func=cmd_post)

    c = sub.add_parser("deriv", parents=[common], help="MMSE derivatives")
    c.add_argument("--dist", required=True)
    c.add_argument("--snr", type=float, required=True)
    c.add_argument("--orders", default="1,2,3")
    c.set_defaults(func=cmd_deriv)

    c = sub.add_parser("info", parents=[common], help="mutual information and entropies")
    c.add_argument("--dist", required=True)
    c.add_argument("--snr", type=float, default=1.0)
    c.add_argument("--entropy", action="store_true")
    c.add_argument("--diff-entropy", action="store_true")
    c.add_argument("--bits", action="store_true")
    c.set_defaults(func=cmd_info)

    c = sub.add_parser("cross", parents=[common], help="single-crossing report")
    c.add_argument("--dist", required=True)
    c.add_argument("--sigma2", type=float, default=1.0)
    c.add_argument("--csv-out", help="also write the sampled f(gamma) as CSV here")
    c.set_defaults(func=cmd_cross)

    c = sub.add_parser("capacity", parents=[common], help="wiretap, broadcast, epi")
    c.add_argument("which", choices=["wiretap", "broadcast", "epi"])
    c.add_argument("--snr1", type=float, default=10.0)
    c.add_argument("--snr2", type=float, default=1.0)
    c.add_argument("--dist")
    c.add_argument("--alphas")
    c.add_argument("--varz", type=float)
    c.set_defaults(func=cmd_capacity)

    c = sub.add_parser("check", parents=[common], help="run the invariant suite")
    c.add_argument("what", choices=["all"])
    c.add_argument("--corpus", choices=["default", "unit_power", "continuous"],
                   default="default")
    c.set_defaults(func=cmd_check)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    started = time.perf_counter()
    try:
        args.func(args)
    except (QuadratureError, VerificationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (DistributionError, MmseLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.pretty:
        print(f"# done in {time.perf_counter() - started:.2f} s", file=sys.stderr)
    return EXIT_OK


def main():
    sys.exit(run())

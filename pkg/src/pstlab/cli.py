"""Command-line front end.

Subcommands: analyze (certify + audit a chain), synth (build a chain from a
spectrum), evolve (fidelity trace as CSV), scan (canonical saturation table
as CSV), search (falsification run as JSON).  Exit codes: 0 success or
admissible, 2 analyzed-but-not-admissible, 1 parse/I-O/usage error.  Data
goes to files (or stdout for analyze/synth/evolve without --output); progress
for scan/search goes to stderr.  Reports are byte-identical for identical
flags and seed.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import bounds, pst, synthesis
from .chain import ChainSpec, is_mirror_symmetric
from .eigensolve import eigenvalues_only
from .errors import MultiplierOverflow, PstLabError

__all__ = ["main", "entrypoint"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # the interface contract reserves exit code 2 for "analyzed but not
    # admissible"; argparse's default usage-error exit would collide with it.
    def error(self, message):
        raise _UsageError(message)


def _workers() -> int:
    try:
        return max(int(os.environ.get("PSTLAB_THREADS", "1")), 1)
    except ValueError:
        raise _UsageError("PSTLAB_THREADS must be an integer") from None


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise PstLabError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise PstLabError(f"{path} is not valid JSON: {exc}") from exc


def _load_chain(path: str) -> ChainSpec:
    try:
        return ChainSpec.from_dict(_load_json(path))
    except ValueError as exc:
        raise PstLabError(f"chain JSON {path}: {exc}") from exc


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _dump_json(path: str | None, data: dict) -> None:
    _write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")


def _parse_range(text: str) -> list[int]:
    """'A..B' (inclusive) or a single integer."""
    parts = text.split("..")
    try:
        if len(parts) == 1:
            return [int(parts[0])]
        if len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
            if lo > hi:
                raise ValueError
            return list(range(lo, hi + 1))
    except ValueError:
        pass
    raise _UsageError(f"--n expects 'A..B' or an integer, got {text!r}")


def cmd_analyze(args) -> int:
    chain = _load_chain(args.input)
    lam = eigenvalues_only(chain)
    symmetric = is_mirror_symmetric(chain, tol=args.tol)
    print(f"chain: N={chain.n_sites}, J_max={chain.j_max:.12g}")
    print(f"mirror-symmetric: {'yes' if symmetric else 'no'}")
    print("spectrum:", " ".join(f"{x:.12g}" for x in lam))

    overflow = None
    try:
        cert = pst.certify(
            chain, symmetry_tol=args.tol, max_multiplier=args.cap
        )
    except MultiplierOverflow as exc:
        overflow = str(exc)
        cert = None

    result: dict = {
        "chain": chain.to_dict(),
        "mirror_symmetric": symmetric,
        "spectrum": lam.tolist(),
    }
    if overflow is not None:
        print(f"certificate: NOT ADMISSIBLE at cap {args.cap} ({overflow})")
        result["certificate"] = {"admissible": False, "failure": "multiplier-overflow"}
        _finish_analyze(args, result)
        return 2
    result["certificate"] = cert.to_dict()
    if not cert.admissible:
        print(f"certificate: NOT ADMISSIBLE ({cert.failure})")
        _finish_analyze(args, result)
        return 2

    print("certificate: ADMISSIBLE")
    print(f"  t0 = {cert.t0:.12g}")
    print(f"  phi = {cert.phi:.12g}")
    print("  multipliers =", " ".join(str(m) for m in cert.multipliers))
    print(f"  max gap residual = {cert.max_residual:.3e}")
    fid = pst.evolve_fidelity(chain, [cert.t0]).fidelity[0]
    print(f"fidelity at t0: {fid:.12g}")
    report, audit = bounds.audit_chain(
        chain, symmetry_tol=args.tol, max_multiplier=args.cap
    )
    print(
        f"bound: parity={report.parity} bound={report.bound:.12g} "
        f"product={report.product:.12g} ratio={report.ratio:.12g} "
        f"lambda_min_ok={'yes' if report.lambda_min_ok else 'NO'}"
    )
    print("audit:")
    for key, value in audit.to_dict().items():
        if value is None or key == "parity":
            continue
        print(f"  {key} = {value:.12g}" if isinstance(value, float) else f"  {key} = {value}")
    result["fidelity_at_t0"] = float(fid)
    result["bound_report"] = report.to_dict()
    result["proof_audit"] = audit.to_dict()
    _finish_analyze(args, result)
    return 0


def _finish_analyze(args, result: dict) -> None:
    if args.output is not None:
        _dump_json(args.output, result)


def cmd_synth(args) -> int:
    if (args.input is None) == (args.canonical is None):
        raise _UsageError("synth needs exactly one of --input or --canonical")
    if args.canonical is not None:
        if args.canonical < 2:
            raise _UsageError("--canonical must be >= 2")
        chain = synthesis.canonical_chain(args.canonical)
        n = args.canonical
        target = np.arange(n - 1, -n, -2, dtype=float)
    else:
        try:
            spectrum = synthesis.SpectrumSpec.from_dict(_load_json(args.input))
        except ValueError as exc:
            raise PstLabError(f"spectrum JSON {args.input}: {exc}") from exc
        target = spectrum.expand()
        chain = synthesis.synthesize(spectrum)
    _dump_json(args.output, chain.to_dict())
    achieved = eigenvalues_only(chain)
    width = target[0] - target[-1]
    residual = float(np.abs(achieved - target).max() / width)
    stream = sys.stderr if args.output is None else sys.stdout
    print(f"round-trip spectral residual: {residual:.3e}", file=stream)
    return 0


def cmd_evolve(args) -> int:
    chain = _load_chain(args.input)
    if args.t_max <= 0:
        raise _UsageError("--t-max must be > 0")
    if args.steps < 2:
        raise _UsageError("--steps must be >= 2")
    times = np.linspace(0.0, args.t_max, args.steps)
    trace = pst.evolve_fidelity(chain, times)
    try:
        cert = pst.certify(chain, max_multiplier=args.cap)
        footer = (
            f"certificate t0 = {cert.t0:.12g}"
            if cert.admissible
            else f"no certificate: {cert.failure}"
        )
    except MultiplierOverflow:
        footer = "no certificate: multiplier-overflow"
    _write_text(args.output, trace.to_csv(footer=footer))
    return 0


def cmd_scan(args) -> int:
    n_values = _parse_range(args.n)
    if min(n_values) < 2:
        raise _UsageError("--n values must be >= 2")
    result = bounds.saturation_scan(n_values, workers=_workers())
    for report in result.reports:
        print(f"scan N={report.n_sites}: ratio={report.ratio:.12g}", file=sys.stderr)
    for n, reason in result.failures:
        print(f"scan N={n}: FAILED ({reason})", file=sys.stderr)
    _write_text(args.output, result.to_csv())
    return 1 if not result.reports else 0


def cmd_search(args) -> int:
    n_values = _parse_range(args.n)
    if len(n_values) != 1:
        raise _UsageError("search takes a single --n")
    n = n_values[0]
    if n < 2:
        raise _UsageError("--n must be >= 2")
    if args.samples < 1:
        raise _UsageError("--samples must be >= 1")
    if args.cap < 1 or args.cap % 2 == 0:
        raise _UsageError("--cap must be odd and >= 1")
    print(
        f"search N={n} samples={args.samples} cap={args.cap} seed={args.seed}",
        file=sys.stderr,
    )
    report = bounds.falsify_search(
        n, args.samples, args.cap, args.seed, workers=_workers()
    )
    print(
        f"min ratio {report.min_ratio:.12g} at sample {report.min_ratio_index}; "
        f"{len(report.violations)} violation(s), "
        f"{report.lambda_min_violations} lambda_min violation(s)",
        file=sys.stderr,
    )
    _dump_json(args.output, report.to_dict())
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="pstlab", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="certify and speed-audit a chain JSON")
    p.add_argument("--input", required=True, help="chain JSON file")
    p.add_argument("--output", help="write the full report as JSON")
    p.add_argument("--tol", type=float, default=pst.SYMMETRY_TOL,
                   help="mirror-symmetry tolerance")
    p.add_argument("--cap", type=int, default=pst.MAX_MULTIPLIER,
                   help="odd multiplier cap")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", help="build the chain for a target spectrum")
    p.add_argument("--input", help="spectrum JSON file")
    p.add_argument("--canonical", type=int,
                   help="equally-spaced family at this N instead of --input")
    p.add_argument("--output", help="chain JSON file (default stdout)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("evolve", help="fidelity trace as CSV")
    p.add_argument("--input", required=True, help="chain JSON file")
    p.add_argument("--t-max", type=float, required=True, help="end of the time grid")
    p.add_argument("--steps", type=int, default=201, help="grid points (incl. 0)")
    p.add_argument("--cap", type=int, default=pst.MAX_MULTIPLIER)
    p.add_argument("--output", help="CSV file (default stdout)")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("scan", help="canonical saturation table as CSV")
    p.add_argument("--n", required=True, help="site range A..B (inclusive)")
    p.add_argument("--output", help="CSV file (default stdout)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("search", help="falsification search as JSON")
    p.add_argument("--n", required=True, help="number of sites")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--cap", type=int, default=9, help="odd multiplier cap")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="report JSON file (default stdout)")
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PstLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

"""Command-line front end: ``ign-nli {compute,sweep,compare-oracle,fit-srs,validate}``.

Exit status: 0 on success, 1 for invalid input or a link that fails
validation, 2 when a computation fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from .config import THZ, ConfigError, emit_report_csv, load_link
from .engine import Branch, NliError, gsnr, island_integral, island_params, link_nli_psd
from .model import Link, LinkValidationError, NliReport, db_per_km_to_field_alpha, validate_link
from .oracle import DeltaAlpha, OracleTier, QuadratureConfig, island_quadrature
from .quadrature import QuadratureError

EXIT_OK, EXIT_INVALID, EXIT_COMPUTE = 0, 1, 2


def _cut_arg(text: str):
    """Integer -> channel index; anything else -> center frequency in THz."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a channel index or THz value, got {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError("CUT frequency must be > 0")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _finite_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ign-nli", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, branch=True):
        p.add_argument("--link", required=True, help="link description file (YAML)")
        p.add_argument("--out", default="-", help="output path, '-' for stdout (default)")
        if branch:
            p.add_argument("--branch", choices=[b.value for b in Branch if b is not Branch.DEGENERATE],
                           default="auto", help="closed-form branch (default: auto)")

    p = sub.add_parser("compute", help="NLI at one channel under test")
    common(p)
    p.add_argument("--cut", type=_cut_arg, help="channel index or center in THz "
                   "(default: the CUT named in the file)")
    p.add_argument("--ase-dbm", type=_finite_float, help="ASE power in the CUT band, dBm")

    p = sub.add_parser("sweep", help="NLI with every channel taking its turn as CUT")
    common(p)
    p.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")
    p.add_argument("--ase-dbm", type=_finite_float, help="ASE power per channel, dBm")

    p = sub.add_parser("compare-oracle", help="closed form against quadrature, island by island")
    common(p)
    p.add_argument("--cut", type=_cut_arg)
    p.add_argument("--tier", choices=[t.value for t in OracleTier], default="rational")
    p.add_argument("--rel-tol", type=_positive_float, default=1e-9)
    p.add_argument("--delta-alpha", choices=[d.value for d in DeltaAlpha],
                   default=DeltaAlpha.CONSISTENT.value, help="full-tier loss sign pattern")

    p = sub.add_parser("fit-srs", help="per-channel SRS loss parameters of every span")
    common(p, branch=False)

    p = sub.add_parser("validate", help="check the link file and list violations")
    common(p, branch=False)
    return parser


def _select_cut(link: Link, cut) -> Link:
    if cut is None:
        return link
    if isinstance(cut, int):
        comb = link.spans[0].comb
        if not 0 <= cut < len(comb.channels):
            raise LinkValidationError([f"CUT index {cut} out of range for "
                                       f"{len(comb.channels)} channels"])
        return link.with_cut_frequency(comb.channels[cut].center)
    for ch in link.spans[0].comb.channels:
        if math.isclose(ch.center, cut * THZ, rel_tol=1e-12, abs_tol=0.0):
            return link.with_cut_frequency(ch.center)
    raise LinkValidationError([f"CUT frequency not found: no channel centered at {cut:.6f} THz"])


def _with_gsnr(report: NliReport, link: Link, ase_dbm: float | None) -> NliReport:
    if ase_dbm is None:
        return report
    ase = 1e-3 * 10 ** (ase_dbm / 10)
    return replace(report, gsnr=gsnr(report, link.cut.power, ase))


def _cut_report(link: Link, center: float, branch: str, ase_dbm: float | None) -> NliReport:
    at = link.with_cut_frequency(center)
    return _with_gsnr(link_nli_psd(at, branch), at, ase_dbm)


def _write(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _cmd_compute(args, link: Link) -> int:
    link = _select_cut(link, args.cut)
    _write(emit_report_csv(_cut_report(link, link.cut.center, args.branch, args.ase_dbm)), args.out)
    return EXIT_OK


def _cmd_sweep(args, link: Link) -> int:
    centers = sorted(ch.center for ch in link.spans[0].comb.channels)
    for c in centers:  # fail fast, before any work is farmed out
        link.with_cut_frequency(c)
    n = len(centers)
    if args.jobs == 1:
        reports = [_cut_report(link, c, args.branch, args.ase_dbm) for c in centers]
    else:
        with ProcessPoolExecutor(max_workers=min(args.jobs, n)) as pool:
            reports = list(pool.map(_cut_report, [link] * n, centers, [args.branch] * n,
                                    [args.ase_dbm] * n))
    _write(emit_report_csv(reports), args.out)
    return EXIT_OK


def _cmd_compare(args, link: Link) -> int:
    link = _select_cut(link, args.cut)
    cfg = QuadratureConfig(rel_tol=args.rel_tol)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["span", "island", "interferer_THz", "branch", "closed_form_m2_Hz2",
                "oracle_m2_Hz2", "relative_error", "tier"])
    worst = 0.0
    for n, span in enumerate(link.spans, start=1):
        for i, ch in enumerate(span.comb.channels):
            p = island_params(span, i)
            closed, used = island_integral(p, args.branch)
            oracle = island_quadrature(p, span, args.tier, cfg, delta_alpha=args.delta_alpha)
            rel = abs(closed - oracle) / oracle
            worst = max(worst, rel)
            kind = "SCI" if i == span.comb.cut_index else f"XCI{i}"
            w.writerow([n, kind, format(ch.center / THZ, ".9g"), used.value,
                        format(closed, ".9g"), format(oracle, ".9g"), format(rel, ".3e"),
                        args.tier])
    _write(buf.getvalue(), args.out)
    print(f"max relative error: {worst:.3e}", file=sys.stderr)
    return EXIT_OK


def _cmd_fit_srs(args, link: Link) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["span", "center_THz", "alpha0_dB_km", "alpha1_dB_km", "sigma_per_km",
                "alpha1_over_alpha0"])
    to_db = 1.0 / db_per_km_to_field_alpha(1.0)
    for n, span in enumerate(link.spans, start=1):
        loss = span.loss
        for ch in sorted(span.comb.channels, key=lambda c: c.center):
            a0, a1, s = loss.alpha0(ch.center), loss.alpha1(ch.center), loss.sigma(ch.center)
            w.writerow([n, format(ch.center / THZ, ".9g"), format(a0 * to_db, ".9g"),
                        format(a1 * to_db, ".9g"), format(s * 1e3, ".9g"), format(a1 / a0, ".6g")])
    _write(buf.getvalue(), args.out)
    return EXIT_OK


def _cmd_validate(args, link: Link) -> int:
    check = validate_link(link)
    if check.ok:
        _write("OK\n", args.out)
        return EXIT_OK
    _write("".join(v + "\n" for v in check.violations), args.out)
    return EXIT_INVALID


_COMMANDS = {
    "compute": _cmd_compute,
    "sweep": _cmd_sweep,
    "compare-oracle": _cmd_compare,
    "fit-srs": _cmd_fit_srs,
    "validate": _cmd_validate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        link = load_link(args.link, validate=args.command not in ("validate", "fit-srs"))
        return _COMMANDS[args.command](args, link)
    except LinkValidationError as exc:
        for v in exc.violations:
            print(f"error: {v}", file=sys.stderr)
        return EXIT_INVALID
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NliError, QuadratureError, ArithmeticError, ValueError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())

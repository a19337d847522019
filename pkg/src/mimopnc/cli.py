"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from contextlib import contextmanager

import numpy as np

from . import __version__
from .detectors import DetectorKind, ThresholdMode
from .experiments import ExperimentReport, conjecture1_sweep, lemma2_experiment, prop3_check
from .simulator import BerPoint, SweepConfig, default_workers, snr_gap, sweep

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3

CSV_HEADER = ["snr_db", "detector", "trials", "errors", "ber", "ci_half_width", "seed"]
REPORT_HEADER = ["cell", "estimate", "trials", "errors", "ber", "ci_half_width", "params"]

FIG2_DETECTORS = (DetectorKind.ZF_NC, DetectorKind.ZF_PNC_LLR, DetectorKind.ZF_PNC_SEL)
FIG3_DETECTORS = (
    DetectorKind.MMSE_NC,
    DetectorKind.MMSE_PNC_LLR,
    DetectorKind.MMSE_PNC_SEL,
    DetectorKind.ML_NC,
    DetectorKind.ML_PNC,
)
# (reference, candidate, target BER) for the printed gaps
FIG2_GAPS = (
    (DetectorKind.ZF_NC, DetectorKind.ZF_PNC_LLR, 1e-3),
    (DetectorKind.ZF_NC, DetectorKind.ZF_PNC_SEL, 10**-2.5),
)
FIG3_GAPS = (
    (DetectorKind.MMSE_NC, DetectorKind.MMSE_PNC_LLR, 1e-3),
    (DetectorKind.MMSE_NC, DetectorKind.MMSE_PNC_SEL, 1e-3),
    (DetectorKind.ML_NC, DetectorKind.ML_PNC, 1e-3),
)


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """Shortest string that round-trips the value exactly."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def parse_snr_grid(text: str) -> tuple[float, float, float]:
    """``start:step:stop`` in dB; a single number means one point."""
    parts = text.split(":")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad SNR grid {text!r}; expected start:step:stop") from None
    if len(vals) == 1:
        vals = [vals[0], 1.0, vals[0]]
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"bad SNR grid {text!r}; expected start:step:stop")
    start, step, stop = vals
    if not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError("SNR grid values must be finite")
    if step <= 0 or start > stop:
        raise argparse.ArgumentTypeError("SNR grid needs step > 0 and start <= stop")
    return start, step, stop


def parse_channel(text: str) -> np.ndarray:
    """Rows separated by ``;``, entries by ``,``, in Python complex syntax: ``1,1j;0.5,1``."""
    try:
        rows = [[complex(v.strip().replace(" ", "")) for v in row.split(",")] for row in text.split(";")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad channel {text!r}") from None
    H = np.array(rows, dtype=complex)
    if H.shape != (2, 2) or not np.all(np.isfinite(H)):
        raise argparse.ArgumentTypeError("channel must be 2x2 with finite entries, e.g. '1,1;1,1'")
    return H


def _int(text: str) -> int:
    # accepts 1e6 style counts
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v.is_integer():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(v)


def positive_int(text: str) -> int:
    v = _int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return v


def nonneg_int(text: str) -> int:
    v = _int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def seed_int(text: str) -> int:
    v = _int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def nonneg_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(v) and v >= 0):
        raise argparse.ArgumentTypeError(f"must be finite and >= 0, got {text}")
    return v


def positive_float(text: str) -> float:
    v = nonneg_float(text)
    if v == 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def detector_arg(text: str) -> DetectorKind:
    try:
        return DetectorKind.from_name(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mimopnc", description="MIMO NC / PNC relay BER simulator")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, trials_default):
        sp.add_argument("--trials", type=positive_int, default=trials_default)
        sp.add_argument("--seed", type=seed_int, default=0)
        sp.add_argument("--workers", type=positive_int, default=default_workers())
        sp.add_argument("--out", default=None, help="output CSV (default: stdout)")

    def curve_flags(sp, snr_default, max_errors_default):
        sp.add_argument("--snr", type=parse_snr_grid, default=parse_snr_grid(snr_default),
                        help="start:step:stop in dB")
        sp.add_argument("--max-errors", type=nonneg_int, default=max_errors_default,
                        help="early-stop error count per point; 0 disables")
        sp.add_argument("--threshold", choices=[m.value for m in ThresholdMode], default="unit")

    for name, help_ in (("sweep", "BER curve over random per-symbol channels"),
                        ("fixed-channel", "BER curve on one fixed channel")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--detector", type=detector_arg, required=True,
                        help=", ".join(k.value for k in DetectorKind))
        if name == "fixed-channel":
            sp.add_argument("--channel", type=parse_channel, required=True,
                            help="2x2 matrix, rows split by ';', e.g. '1,1;1,1'")
        curve_flags(sp, "0:2:24", 500)
        common(sp, 10**6)

    for name, dets in (("reproduce-fig2", FIG2_DETECTORS), ("reproduce-fig3", FIG3_DETECTORS)):
        sp = sub.add_parser(name, help="curves for " + ", ".join(d.value for d in dets))
        curve_flags(sp, "0:2:30", 0)
        common(sp, 10**6)

    sp = sub.add_parser("lemma2", help="slice-and-XOR vs sum/difference LLR on a diagonal channel")
    sp.add_argument("--var1", type=nonneg_float, required=True)
    sp.add_argument("--var2", type=nonneg_float, required=True)
    common(sp, 10**6)

    sp = sub.add_parser("conjecture1", help="LLR BER over variance splits with fixed total")
    sp.add_argument("--c", type=positive_float, default=2.0)
    sp.add_argument("--grid-size", type=positive_int, default=9)
    common(sp, 10**6)

    sp = sub.add_parser("prop3", help="ZF PNC-LLR vs ZF NC on fixed channels")
    sp.add_argument("--num-channels", type=positive_int, default=100)
    sp.add_argument("--snr", type=float, default=15.0, help="SNR in dB")
    common(sp, 10**5)
    return p


@contextmanager
def open_output(path):
    if path is None or path == "-":
        yield sys.stdout
        return
    try:
        f = open(path, "w", encoding="utf-8", newline="")
    except OSError as e:
        raise RuntimeError(f"cannot write {path}: {e.strerror}") from None
    with f:
        yield f


def write_header(f, command: str, config: dict, seed) -> None:
    f.write(f"# mimopnc {__version__}\n")
    f.write(f"# command: {command}\n")
    f.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
    f.write(f"# seed: {seed}\n")


def write_points(f, points: list[BerPoint]) -> None:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p in points:
        w.writerow([fmt(p.snr_db), p.detector, p.trials, p.errors, fmt(p.ber), fmt(p.ci_half_width), p.seed])


def write_report(f, report: ExperimentReport) -> None:
    for claim, ok in report.verdicts.items():
        f.write(f"# verdict: {claim}: {'PASS' if ok else 'FAIL'}\n")
    w = csv.writer(f, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for c in report.cells:
        for name, e in c["estimates"].items():
            w.writerow([c["label"], name, e.trials, e.errors, fmt(e.ber), fmt(e.ci_half_width),
                        json.dumps(c["params"], sort_keys=True)])


def read_points(text: str) -> list[BerPoint]:
    """Parse a curve CSV written by this tool (comment lines skipped)."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rows = csv.DictReader(io.StringIO("\n".join(lines)))
    return [
        BerPoint(float(r["snr_db"]), int(r["trials"]), int(r["errors"]), int(r["seed"]), r["detector"])
        for r in rows
    ]


def _curve_configs(args, detectors, channel=None):
    start, step, stop = args.snr
    return [
        SweepConfig(
            snr_start_db=start, snr_stop_db=stop, snr_step_db=step,
            trials_per_point=args.trials,
            max_errors=args.max_errors or None,
            seed=args.seed, detector=d, channel=channel,
            threshold=ThresholdMode(args.threshold),
        )
        for d in detectors
    ]


def _run_curves(args, configs, out, gaps=()):
    header_cfg = {"snr": list(args.snr), "trials": args.trials, "max_errors": args.max_errors,
                  "threshold": args.threshold, "detectors": [c.detector.value for c in configs]}
    if configs[0].channel is not None:
        header_cfg["channel"] = configs[0].describe()["channel"]
    curves = {c.detector: sweep(c, workers=args.workers) for c in configs}
    write_header(out, args.command, header_cfg, args.seed)
    write_points(out, [p for pts in curves.values() for p in pts])
    log = sys.stderr if out is sys.stdout else sys.stdout
    for ref, cand, target in gaps:
        g = snr_gap(curves[ref], curves[cand], target)
        shown = f"{g:.2f} dB" if math.isfinite(g) else "not reached within grid"
        print(f"gap {cand.value} vs {ref.value} at BER {target:.3g}: {shown}", file=log)
    return curves


def _run_report(args, report: ExperimentReport, out) -> None:
    write_header(out, args.command, report.params, args.seed)
    write_report(out, report)
    log = sys.stderr if out is sys.stdout else sys.stdout
    print(f"{report.name}: {'PASS' if report.passed else 'FAIL'}", file=log)
    for claim, ok in report.verdicts.items():
        if not ok or len(report.verdicts) <= 4:
            print(f"  {claim}: {'PASS' if ok else 'FAIL'}", file=log)


def run(args) -> int:
    if args.command == "conjecture1" and (args.grid_size < 3 or args.grid_size % 2 == 0):
        raise UsageError("--grid-size must be odd and >= 3")
    with open_output(args.out) as out:
        cmd = args.command
        if cmd == "sweep":
            _run_curves(args, _curve_configs(args, [args.detector]), out)
        elif cmd == "fixed-channel":
            _run_curves(args, _curve_configs(args, [args.detector], args.channel), out)
        elif cmd == "reproduce-fig2":
            _run_curves(args, _curve_configs(args, FIG2_DETECTORS), out, FIG2_GAPS)
        elif cmd == "reproduce-fig3":
            _run_curves(args, _curve_configs(args, FIG3_DETECTORS), out, FIG3_GAPS)
        elif cmd == "lemma2":
            _run_report(args, lemma2_experiment(args.var1, args.var2, args.trials, args.seed,
                                                workers=args.workers), out)
        elif cmd == "conjecture1":
            _run_report(args, conjecture1_sweep(args.c, args.grid_size, args.trials, args.seed,
                                                workers=args.workers), out)
        elif cmd == "prop3":
            _run_report(args, prop3_check(args.num_channels, args.snr, args.trials, args.seed,
                                          workers=args.workers), out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except UsageError as e:
        parser.error(str(e))
    except (RuntimeError, OSError, ValueError) as e:
        print(f"mimopnc: error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

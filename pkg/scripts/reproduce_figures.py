"""Regenerate both BER-vs-SNR figure datasets and print the measured dB gaps.

Writes fig2_<thr>.csv and fig3_<thr>.csv into --out-dir for each threshold mode.

    python scripts/reproduce_figures.py --trials 1000000 --out-dir results/
"""

import argparse
from pathlib import Path

from mimopnc.cli import main


def run(args):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for fig in ("fig2", "fig3"):
        for thr in args.thresholds:
            path = out / f"{fig}_{thr}.csv"
            print(f"== {fig}, threshold {thr} -> {path}")
            code = main([f"reproduce-{fig}", "--snr", args.snr, "--trials", str(args.trials),
                         "--seed", str(args.seed), "--threshold", thr, "--workers", str(args.workers),
                         "--out", str(path)])
            if code:
                return code
    return 0


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--snr", default="0:2:30")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--thresholds", nargs="+", default=["unit", "optimal"], choices=["unit", "optimal"])
    p.add_argument("--out-dir", default="results")
    raise SystemExit(run(p.parse_args()))

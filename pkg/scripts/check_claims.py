"""Run the analytical-claim experiments and save each report as JSON.

Covers the diagonal-channel equality on four variance pairs, the
variance-split maximum, and PNC-vs-NC dominance on fixed channels.
"""

import argparse
from pathlib import Path

from mimopnc.experiments import conjecture1_sweep, lemma2_experiment, prop3_check

LEMMA2_PAIRS = [(1.0, 1.0), (0.2, 3.0), (0.5, 0.5), (2.0, 4.0)]


def main(args):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reports = []
    for v1, v2 in LEMMA2_PAIRS:
        reports.append((f"lemma2_{v1:g}_{v2:g}", lemma2_experiment(v1, v2, args.trials, args.seed,
                                                                   workers=args.workers)))
    reports.append(("conjecture1", conjecture1_sweep(2.0, 9, args.trials, args.seed, workers=args.workers)))
    for snr in (5.0, 15.0):
        reports.append((f"prop3_{snr:g}dB", prop3_check(args.num_channels, snr, args.prop3_trials,
                                                         args.seed, workers=args.workers)))
    failed = 0
    for name, r in reports:
        (out / f"{name}.json").write_text(r.to_json())
        bad = [c for c, ok in r.verdicts.items() if not ok]
        failed += bool(bad)
        print(f"{name:24s} {'PASS' if r.passed else 'FAIL'}  ({len(r.verdicts)} verdicts)"
              + (f" failing: {bad}" if bad else ""))
    return 1 if failed else 0


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--prop3-trials", type=int, default=10**5)
    p.add_argument("--num-channels", type=int, default=100)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", default="results")
    raise SystemExit(main(p.parse_args()))

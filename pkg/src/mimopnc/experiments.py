"""Numerical checks of the analytical claims about ZF-based PNC detection.

* :func:`lemma2_experiment`: on a diagonal channel, slicing both streams and
  XOR-ing has the same BER as LLR combining on their sum and difference.
* :func:`conjecture1_sweep`: with the total stream variance held fixed, the
  LLR combining BER peaks when the two variances are equal.
* :func:`prop3_check`: for fixed channels, ZF PNC with LLR combining is never
  worse than ZF NC.

Each driver returns an :class:`ExperimentReport` whose verdicts are computed
only from the stored ``(trials, errors)`` counts, so :func:`recompute_verdicts`
reproduces them from the JSON form alone.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .channel import modulate, sample_channel, snr_db_to_sigma2
from .detectors import DetectorKind, EqualizedObservation, detect_pnc_llr
from .simulator import BLOCK_SIZE, block_rng, ci_half_width, count_errors, detector_block_fn

SIGMAS = 3.0


@dataclass(frozen=True)
class Estimate:
    trials: int
    errors: int

    @property
    def ber(self) -> float:
        return self.errors / self.trials

    @property
    def std_error(self) -> float:
        p = self.ber
        return math.sqrt(p * (1.0 - p) / self.trials)

    @property
    def ci_half_width(self) -> float:
        return ci_half_width(self.errors, self.trials)


def within(a: Estimate, b: Estimate, sigmas: float = SIGMAS) -> bool:
    """``|p_a - p_b|`` inside the combined ``sigmas``-sigma band."""
    return abs(a.ber - b.ber) <= sigmas * math.hypot(a.std_error, b.std_error)


def not_above(a: Estimate, b: Estimate, sigmas: float = SIGMAS) -> bool:
    """``p_a <= p_b`` up to the combined ``sigmas``-sigma band."""
    return a.ber <= b.ber + sigmas * math.hypot(a.std_error, b.std_error)


@dataclass
class ExperimentReport:
    """One experiment: parameters, per-cell estimates and claim verdicts.

    ``cells`` is a list of ``{"label", "params", "estimates"}`` dicts where
    ``estimates`` maps a name to an :class:`Estimate`.
    """

    name: str
    params: dict
    cells: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def cell(self, label: str) -> dict:
        for c in self.cells:
            if c["label"] == label:
                return c
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "cells": [
                {
                    "label": c["label"],
                    "params": c["params"],
                    "estimates": {k: asdict(v) for k, v in c["estimates"].items()},
                }
                for c in self.cells
            ],
            "verdicts": dict(self.verdicts),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        cells = [
            {
                "label": c["label"],
                "params": c["params"],
                "estimates": {k: Estimate(**v) for k, v in c["estimates"].items()},
            }
            for c in d["cells"]
        ]
        return cls(d["name"], d["params"], cells, dict(d["verdicts"]))

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        return cls.from_dict(json.loads(text))


def _slice_xor_block(var1: float, var2: float):
    sd = np.sqrt([var1, var2])

    def run(rng, n):
        x = modulate(rng.integers(0, 2, size=(n, 2)))
        z = x + sd * rng.standard_normal((n, 2))
        est = np.where(z[:, 0] >= 0, 1.0, -1.0) * np.where(z[:, 1] >= 0, 1.0, -1.0)
        return int(np.count_nonzero(est != x[:, 0] * x[:, 1]))

    return run


def _sum_diff_llr_block(var1: float, var2: float, superimpose: bool):
    """LLR combining on sum/difference statistics.

    ``superimpose=True``: streams are ``z1 +- z2`` built from ``z_i = x_i + n_i``
    (variances ``var1``, ``var2``), both scored with variance ``var1 + var2``.
    ``superimpose=False``: independent noises of variance ``var1``/``var2`` are
    added directly to ``x1 + x2`` and ``x1 - x2``.
    """
    sd = np.sqrt([var1, var2])

    def run(rng, n):
        x = modulate(rng.integers(0, 2, size=(n, 2)))
        noise = sd * rng.standard_normal((n, 2))
        if superimpose:
            z = x + noise
            obs = EqualizedObservation(
                z[:, 0] + z[:, 1], z[:, 0] - z[:, 1], var1 + var2, var1 + var2
            )
        else:
            obs = EqualizedObservation(
                x[:, 0] + x[:, 1] + noise[:, 0], x[:, 0] - x[:, 1] + noise[:, 1], var1, var2
            )
        est = detect_pnc_llr(obs)
        return int(np.count_nonzero(est != x[:, 0] * x[:, 1]))

    return run


def _lemma2_verdicts(report: ExperimentReport) -> dict:
    est = report.cells[0]["estimates"]
    return {"P1 == P2": within(est["P1"], est["P2"])}


def lemma2_experiment(var1: float, var2: float, trials: int, seed: int, workers: int = 1) -> ExperimentReport:
    """Compare slice-and-XOR (P1) with sum/difference LLR combining (P2)."""
    if var1 < 0 or var2 < 0:
        raise ValueError("variances must be >= 0")
    kw = dict(seed=seed, block_size=BLOCK_SIZE, workers=workers)
    p1 = Estimate(*count_errors(_slice_xor_block(var1, var2), trials, key=(0,), **kw))
    p2 = Estimate(*count_errors(_sum_diff_llr_block(var1, var2, True), trials, key=(1,), **kw))
    report = ExperimentReport(
        "lemma2",
        {"var1": var1, "var2": var2, "trials": trials, "seed": seed},
        [{"label": "diagonal", "params": {"var1": var1, "var2": var2},
          "estimates": {"P1": p1, "P2": p2}}],
    )
    report.verdicts = _lemma2_verdicts(report)
    return report


def conjecture1_grid(c: float, grid_size: int, margin: float = 0.1) -> np.ndarray:
    """Stream-1 variances ``linspace(margin c, (1 - margin) c, grid_size)``."""
    return np.linspace(margin * c, (1.0 - margin) * c, grid_size)


def _conjecture1_verdicts(report: ExperimentReport) -> dict:
    bers = [c["estimates"]["ber"] for c in report.cells]
    mid = len(bers) // 2
    others = [b for i, b in enumerate(bers) if i != mid]
    return {
        "midpoint is maximum": all(not_above(b, bers[mid]) for b in others),
        "symmetric": all(within(bers[i], bers[-1 - i]) for i in range(mid)),
    }


def conjecture1_sweep(
    c: float, grid_size: int, trials: int, seed: int, margin: float = 0.1, workers: int = 1
) -> ExperimentReport:
    """BER of LLR combining over variance splits ``(v, c - v)``."""
    if not c > 0:
        raise ValueError("c must be > 0")
    if grid_size < 3 or grid_size % 2 == 0:
        raise ValueError("grid_size must be odd and >= 3")
    if not 0 <= margin < 0.5:
        raise ValueError("margin must be in [0, 0.5)")
    cells = []
    for k, v1 in enumerate(conjecture1_grid(c, grid_size, margin)):
        v1 = float(v1)
        v2 = max(c - v1, 0.0)
        fn = _sum_diff_llr_block(v1, v2, superimpose=False)
        est = Estimate(*count_errors(fn, trials, seed=seed, key=(k,), workers=workers))
        cells.append({"label": f"var1={v1!r}", "params": {"var1": v1, "var2": v2},
                      "estimates": {"ber": est}})
    report = ExperimentReport(
        "conjecture1",
        {"c": c, "grid_size": grid_size, "trials": trials, "seed": seed, "margin": margin},
        cells,
    )
    report.verdicts = _conjecture1_verdicts(report)
    return report


def special_channels(rng: np.random.Generator) -> dict[str, np.ndarray]:
    """The three structured channels every dominance check includes.

    ``all_ones``: both columns equal 1 (no NC rate at all). ``diagonal``: no
    cross-coupling, where both schemes tie. ``equal_columns``: the rank-one
    ``[[a, a], [b, b]]`` part of a channel's diagonal-plus-equal-columns split.
    """
    d = sample_channel(rng).H
    e = sample_channel(rng).H
    return {
        "all_ones": np.ones((2, 2), dtype=complex),
        "diagonal": np.diag([d[0, 0], d[1, 1]]),
        "equal_columns": np.array([[e[0, 1], e[0, 1]], [e[1, 0], e[1, 0]]]),
    }


def _prop3_verdicts(report: ExperimentReport) -> dict:
    return {
        f"PNC <= NC [{c['label']}]": not_above(c["estimates"]["ZF_PNC_LLR"], c["estimates"]["ZF_NC"])
        for c in report.cells
    }


def prop3_check(
    num_channels: int, snr_db: float, trials: int, seed: int, workers: int = 1
) -> ExperimentReport:
    """ZF NC vs ZF PNC-LLR BER on fixed channels.

    Channels come from stream ``(seed, 0)``; detector ``d`` on channel ``j``
    uses stream ``(seed, 1 + j, d)``.
    """
    if num_channels < 1:
        raise ValueError("num_channels must be >= 1")
    rng = block_rng(seed, 0)
    channels = special_channels(rng)
    draws = sample_channel(rng, num_channels).H
    channels.update({f"random_{i}": draws[i] for i in range(num_channels)})

    sigma2 = snr_db_to_sigma2(snr_db)
    cells = []
    for j, (label, H) in enumerate(channels.items()):
        estimates = {}
        for d, kind in enumerate((DetectorKind.ZF_NC, DetectorKind.ZF_PNC_LLR)):
            fn = detector_block_fn(kind, sigma2, channel=H)
            estimates[kind.name] = Estimate(
                *count_errors(fn, trials, seed=seed, key=(1 + j, d), workers=workers)
            )
        cells.append({
            "label": label,
            "params": {"H": [[[float(v.real), float(v.imag)] for v in row] for row in H]},
            "estimates": estimates,
        })
    report = ExperimentReport(
        "prop3",
        {"num_channels": num_channels, "snr_db": snr_db, "trials": trials, "seed": seed},
        cells,
    )
    report.verdicts = _prop3_verdicts(report)
    return report


_VERDICTS = {
    "lemma2": _lemma2_verdicts,
    "conjecture1": _conjecture1_verdicts,
    "prop3": _prop3_verdicts,
}


def recompute_verdicts(report: ExperimentReport | dict | str) -> dict:
    """Re-derive the verdicts of a report (object, dict, or JSON text)."""
    if isinstance(report, str):
        report = ExperimentReport.from_json(report)
    elif isinstance(report, dict):
        report = ExperimentReport.from_dict(report)
    return _VERDICTS[report.name](report)

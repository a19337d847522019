"""Monte Carlo BER estimation.

Seeding
-------
Trials are cut into blocks of ``block_size``. Block ``b`` of SNR point ``k``
draws from ``PCG64(SeedSequence(seed, spawn_key=(k, b)))``. Blocks are merged
by summing ``(trials, errors)`` in block order, and early stopping keeps the
shortest prefix of blocks whose error count reaches ``max_errors``. Results
therefore depend only on the configuration, never on the number of workers.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .channel import ChannelMatrix, modulate, sample_channel, snr_db_to_sigma2, transmit
from .detectors import DetectorKind, ThresholdMode, detect

BLOCK_SIZE = 1 << 16
DEFAULT_MAX_ERRORS = 500
Z95 = 1.959963984540054
# Points with fewer errors than this get a degenerate CI flag.
MIN_RELIABLE_ERRORS = 10

BlockFn = Callable[[np.random.Generator, int], int]


class ChannelMode(enum.Enum):
    RANDOM_PER_SYMBOL = "random"
    FIXED = "fixed"


def block_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the stream identified by ``(seed, *key)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def default_workers() -> int:
    return os.cpu_count() or 1


def count_errors(
    block_fn: BlockFn,
    trials: int,
    *,
    seed: int,
    key: Sequence[int] = (0,),
    max_errors: int | None = None,
    block_size: int = BLOCK_SIZE,
    workers: int = 1,
) -> tuple[int, int]:
    """Run ``block_fn(rng, n)`` over blocks and return ``(trials_run, errors)``.

    ``block_fn`` must return the number of errors among its ``n`` trials.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if block_size < 1:
        raise ValueError("block_size must be >= 1")
    workers = max(1, int(workers))
    n_blocks = -(-trials // block_size)
    sizes = [min(block_size, trials - b * block_size) for b in range(n_blocks)]

    def run(b: int) -> int:
        return int(block_fn(block_rng(seed, *key, b), sizes[b]))

    done = errors = 0
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for start in range(0, n_blocks, workers):
            wave = range(start, min(start + workers, n_blocks))
            counts = list(pool.map(run, wave)) if pool else [run(b) for b in wave]
            for b, e in zip(wave, counts):
                done += sizes[b]
                errors += e
                if max_errors is not None and errors >= max_errors:
                    return done, errors
    finally:
        if pool:
            pool.shutdown()
    return done, errors


def ci_half_width(errors: int, trials: int, z: float = Z95) -> float:
    """Normal-approximation half-width ``z * sqrt(p (1 - p) / n)``."""
    p = errors / trials
    return z * math.sqrt(p * (1.0 - p) / trials)


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    trials: int
    errors: int
    seed: int
    detector: str = ""
    point_index: int = 0

    def __post_init__(self):
        if not 0 <= self.errors <= self.trials:
            raise ValueError("need 0 <= errors <= trials")

    @property
    def ber(self) -> float:
        return self.errors / self.trials

    @property
    def ci_half_width(self) -> float:
        return ci_half_width(self.errors, self.trials)

    @property
    def low_confidence(self) -> bool:
        return self.errors < MIN_RELIABLE_ERRORS


@dataclass(frozen=True)
class SweepConfig:
    """SNR sweep for one detector.

    ``channel`` fixes the channel matrix for every trial; ``None`` redraws a
    Rayleigh channel per symbol. ``max_errors=None`` disables early stopping.
    """

    snr_start_db: float
    snr_stop_db: float
    snr_step_db: float = 1.0
    trials_per_point: int = 10**6
    max_errors: int | None = DEFAULT_MAX_ERRORS
    seed: int = 0
    detector: DetectorKind = DetectorKind.ZF_PNC_LLR
    channel: np.ndarray | None = field(default=None, compare=False)
    threshold: ThresholdMode = ThresholdMode.UNIT
    block_size: int = BLOCK_SIZE

    def __post_init__(self):
        if not self.snr_start_db <= self.snr_stop_db:
            raise ValueError("snr_start_db must be <= snr_stop_db")
        if not self.snr_step_db > 0:
            raise ValueError("snr_step_db must be > 0")
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")
        if self.max_errors is not None and self.max_errors < 1:
            raise ValueError("max_errors must be >= 1 or None")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.channel is not None:
            object.__setattr__(self, "channel", ChannelMatrix(self.channel).H)

    @property
    def channel_mode(self) -> ChannelMode:
        return ChannelMode.RANDOM_PER_SYMBOL if self.channel is None else ChannelMode.FIXED

    def snr_grid(self) -> list[float]:
        # integer step count avoids accumulating float drift across the grid
        n = int(math.floor((self.snr_stop_db - self.snr_start_db) / self.snr_step_db + 1e-9))
        return [self.snr_start_db + i * self.snr_step_db for i in range(n + 1)]

    def describe(self) -> dict:
        d = asdict(self)
        d["detector"] = self.detector.value
        d["threshold"] = self.threshold.value
        d["channel_mode"] = self.channel_mode.value
        if self.channel is not None:
            d["channel"] = [[str(complex(v)) for v in row] for row in self.channel]
        return d


def detector_block_fn(
    kind: DetectorKind,
    sigma2: float,
    channel: np.ndarray | None = None,
    threshold: ThresholdMode = ThresholdMode.UNIT,
) -> BlockFn:
    """Block function simulating ``n`` relay symbols and counting XOR errors."""

    def run(rng: np.random.Generator, n: int) -> int:
        x = modulate(rng.integers(0, 2, size=(n, 2)))
        H = sample_channel(rng, n).H if channel is None else channel
        r = transmit(H, x, sigma2, rng)
        est = detect(kind, H, r, sigma2, threshold)
        return int(np.count_nonzero(est != x[:, 0] * x[:, 1]))

    return run


def estimate_ber(
    config: SweepConfig, snr_db: float, point_index: int = 0, workers: int = 1
) -> BerPoint:
    """BER of ``x1 XOR x2`` at one SNR. ``snr_db = inf`` runs noiselessly."""
    sigma2 = snr_db_to_sigma2(snr_db)
    fn = detector_block_fn(config.detector, sigma2, config.channel, config.threshold)
    trials, errors = count_errors(
        fn,
        config.trials_per_point,
        seed=config.seed,
        key=(point_index,),
        max_errors=config.max_errors,
        block_size=config.block_size,
        workers=workers,
    )
    return BerPoint(snr_db, trials, errors, config.seed, config.detector.value, point_index)


def sweep(config: SweepConfig, workers: int = 1) -> list[BerPoint]:
    return [
        estimate_ber(config, snr, point_index=k, workers=workers)
        for k, snr in enumerate(config.snr_grid())
    ]


def snr_at_ber(points: Sequence[BerPoint], target: float) -> float:
    """SNR where a waterfall curve crosses ``target``.

    Interpolates linearly in (dB, log10 BER) between the two grid points that
    bracket the first downward crossing. Zero-error points are skipped.
    Returns ``nan`` when the curve never crosses the target.
    """
    pts = sorted((p for p in points if p.errors > 0), key=lambda p: p.snr_db)
    logt = math.log10(target)
    for a, b in zip(pts, pts[1:]):
        la, lb = math.log10(a.ber), math.log10(b.ber)
        if la >= logt >= lb and la != lb:
            return a.snr_db + (la - logt) * (b.snr_db - a.snr_db) / (la - lb)
    return math.nan


def snr_gap(reference: Sequence[BerPoint], candidate: Sequence[BerPoint], target: float) -> float:
    """dB by which ``candidate`` beats ``reference`` at BER ``target``."""
    return snr_at_ber(reference, target) - snr_at_ber(candidate, target)


def log_interp_ber(points: Sequence[BerPoint], snr_db: float) -> float:
    """BER of a curve at ``snr_db`` by log-linear interpolation."""
    pts = sorted((p for p in points if p.errors > 0), key=lambda p: p.snr_db)
    xs = np.array([p.snr_db for p in pts])
    ys = np.log10([p.ber for p in pts])
    if not xs[0] <= snr_db <= xs[-1]:
        return math.nan
    return float(10 ** np.interp(snr_db, xs, ys))

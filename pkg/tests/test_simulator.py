import math

import numpy as np
import pytest

from mimopnc.detectors import DetectorKind, ThresholdMode
from mimopnc.simulator import (
    BerPoint,
    ChannelMode,
    SweepConfig,
    block_rng,
    count_errors,
    detector_block_fn,
    estimate_ber,
    log_interp_ber,
    snr_at_ber,
    snr_gap,
    sweep,
)

ONES = np.ones((2, 2))


def bernoulli_fn(p):
    def run(rng, n):
        return int(np.count_nonzero(rng.random(n) < p))

    return run


def cfg(**kw):
    base = dict(snr_start_db=0.0, snr_stop_db=0.0, trials_per_point=20_000, seed=1, block_size=4096)
    base.update(kw)
    return SweepConfig(**base)


class TestConfig:
    def test_grid(self):
        assert cfg(snr_start_db=0, snr_stop_db=24, snr_step_db=2).snr_grid() == [float(v) for v in range(0, 25, 2)]
        assert cfg(snr_start_db=0, snr_stop_db=1, snr_step_db=0.1).snr_grid()[-1] == pytest.approx(1.0)
        assert len(cfg(snr_start_db=0, snr_stop_db=1, snr_step_db=0.1).snr_grid()) == 11

    @pytest.mark.parametrize(
        "kw",
        [
            dict(snr_start_db=5, snr_stop_db=0),
            dict(snr_step_db=0),
            dict(trials_per_point=0),
            dict(max_errors=0),
            dict(seed=-1),
            dict(channel=np.eye(3)),
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            cfg(**kw)

    def test_channel_mode(self):
        assert cfg().channel_mode is ChannelMode.RANDOM_PER_SYMBOL
        assert cfg(channel=ONES).channel_mode is ChannelMode.FIXED


class TestCountErrors:
    def test_worker_count_independent(self):
        fn = bernoulli_fn(0.3)
        ref = count_errors(fn, 50_000, seed=4, block_size=3000, workers=1)
        for w in (2, 3, 8):
            assert count_errors(fn, 50_000, seed=4, block_size=3000, workers=w) == ref

    def test_early_stop_worker_independent(self):
        fn = bernoulli_fn(0.01)
        ref = count_errors(fn, 10**6, seed=2, max_errors=100, block_size=1000)
        assert ref[1] >= 100
        assert ref[0] < 10**6
        for w in (2, 5):
            assert count_errors(fn, 10**6, seed=2, max_errors=100, block_size=1000, workers=w) == ref

    def test_early_stop_reports_true_counts(self):
        # replay the blocks by hand: the stop point is the first prefix with >= max_errors
        fn = bernoulli_fn(0.05)
        trials, errors = count_errors(fn, 10**5, seed=9, max_errors=200, block_size=500)
        done = errs = 0
        b = 0
        while errs < 200:
            errs += fn(block_rng(9, 0, b), 500)
            done += 500
            b += 1
        assert (trials, errors) == (done, errs)

    def test_partial_last_block(self):
        calls = []

        def fn(rng, n):
            calls.append(n)
            return 0

        assert count_errors(fn, 2500, seed=0, block_size=1000) == (2500, 0)
        assert calls == [1000, 1000, 500]

    def test_bernoulli_estimate_and_coverage(self):
        p, n = 0.1, 100_000
        t, e = count_errors(bernoulli_fn(p), n, seed=11)
        point = BerPoint(0.0, t, e, 11)
        assert abs(point.ber - p) <= point.ci_half_width * 1.5
        # coverage of the 95% interval over independent replications
        hits = 0
        reps = 200
        for s in range(reps):
            t, e = count_errors(bernoulli_fn(p), 20_000, seed=1000 + s)
            pt = BerPoint(0.0, t, e, s)
            hits += abs(pt.ber - p) <= pt.ci_half_width
        assert 0.90 <= hits / reps <= 0.99


class TestBerPoint:
    def test_fields(self):
        p = BerPoint(3.0, 1000, 10, 5)
        assert p.ber == 0.01
        assert p.ci_half_width == pytest.approx(1.959963984540054 * math.sqrt(0.01 * 0.99 / 1000))
        assert not p.low_confidence
        assert BerPoint(3.0, 1000, 9, 5).low_confidence

    def test_invalid(self):
        with pytest.raises(ValueError):
            BerPoint(0.0, 10, 11, 0)


class TestEstimateBer:
    @pytest.mark.parametrize("kind", list(DetectorKind))
    def test_noiseless_fixed_channel(self, kind):
        H = np.array([[1.0, 0.3j], [-0.2, 0.9 + 0.1j]])
        p = estimate_ber(cfg(detector=kind, channel=H), float("inf"))
        assert p.errors == 0 and p.trials == 20_000

    @pytest.mark.parametrize("kind", list(DetectorKind))
    def test_noise_dominated(self, kind):
        p = estimate_ber(cfg(detector=kind, trials_per_point=100_000, max_errors=None), -40.0)
        assert 0.45 <= p.ber <= 0.55

    def test_nc_on_all_ones(self):
        p = estimate_ber(cfg(detector=DetectorKind.ZF_NC, channel=ONES, max_errors=None), 20.0)
        assert 0.45 <= p.ber <= 0.55

    def test_early_stop(self):
        p = estimate_ber(cfg(detector=DetectorKind.ZF_NC, max_errors=50, trials_per_point=10**6), 0.0)
        assert p.errors >= 50
        assert p.trials == 4096

    def test_deterministic(self):
        c = cfg(detector=DetectorKind.MMSE_PNC_LLR)
        assert estimate_ber(c, 8.0) == estimate_ber(c, 8.0)
        assert estimate_ber(c, 8.0, workers=3) == estimate_ber(c, 8.0)

    def test_threshold_mode_changes_selective(self):
        a = estimate_ber(cfg(detector=DetectorKind.ZF_PNC_SEL, max_errors=None), 2.0)
        b = estimate_ber(cfg(detector=DetectorKind.ZF_PNC_SEL, max_errors=None, threshold=ThresholdMode.OPTIMAL), 2.0)
        assert a.errors != b.errors


class TestSweep:
    def test_grid_points(self):
        pts = sweep(cfg(snr_start_db=0, snr_stop_db=4, snr_step_db=2, trials_per_point=5000))
        assert [p.snr_db for p in pts] == [0.0, 2.0, 4.0]
        assert [p.point_index for p in pts] == [0, 1, 2]

    def test_rerun_identical(self):
        c = cfg(snr_start_db=0, snr_stop_db=6, snr_step_db=3, detector=DetectorKind.ML_PNC)
        assert sweep(c) == sweep(c)
        assert sweep(c, workers=4) == sweep(c)

    def test_monotone_waterfall(self):
        c = cfg(snr_start_db=0, snr_stop_db=25, snr_step_db=5, trials_per_point=200_000,
                max_errors=None, detector=DetectorKind.ZF_PNC_LLR, block_size=1 << 16)
        pts = sweep(c)
        for a, b in zip(pts, pts[1:]):
            assert b.ber <= a.ber + a.ci_half_width + b.ci_half_width


def curve(pairs):
    return [BerPoint(s, 10**6, int(round(b * 10**6)), 0) for s, b in pairs]


class TestGap:
    def test_snr_at_ber_log_linear(self):
        c = curve([(0, 1e-1), (10, 1e-3)])
        assert snr_at_ber(c, 1e-2) == pytest.approx(5.0)
        assert snr_at_ber(c, 10**-1.5) == pytest.approx(2.5)

    def test_not_reached(self):
        assert math.isnan(snr_at_ber(curve([(0, 1e-1), (10, 1e-2)]), 1e-3))

    def test_gap_sign(self):
        ref = curve([(0, 1e-1), (10, 1e-3)])
        better = curve([(0, 1e-2), (10, 1e-4)])
        # better curve hits 1e-2 at 0 dB, reference at 5 dB
        assert snr_gap(ref, better, 1e-2) == pytest.approx(5.0)

    def test_interp_ber(self):
        c = curve([(0, 1e-1), (10, 1e-3)])
        assert log_interp_ber(c, 5.0) == pytest.approx(1e-2)
        assert math.isnan(log_interp_ber(c, 11.0))


def test_detector_block_counts_errors():
    fn = detector_block_fn(DetectorKind.ZF_NC, 0.0, channel=ONES)
    errors = fn(block_rng(0, 0), 10_000)
    # noiseless all-ones channel: NC always says +1, so errors are the XOR = -1 trials
    assert 4700 < errors < 5300


def test_rank_deficient_pnc_matches_single_antenna_oracle():
    # all-ones H: PNC-LLR should behave like single-antenna PNC at noise sigma2 / 2
    from scipy.stats import norm

    sigma2 = 10 ** (-3 / 10)
    n = 200_000
    p = estimate_ber(cfg(detector=DetectorKind.ZF_PNC_LLR, channel=ONES, trials_per_point=n,
                         max_errors=None), 3.0)
    rng = np.random.default_rng(77)
    sd = math.sqrt(sigma2 / 2)
    x = rng.choice([-1.0, 1.0], size=(n, 2))
    y = x.sum(axis=1) + sd * rng.standard_normal(n)
    est = np.where(0.5 * (norm.pdf(y, 2, sd) + norm.pdf(y, -2, sd)) >= norm.pdf(y, 0, sd), 1, -1)
    q = np.count_nonzero(est != x.prod(axis=1)) / n
    se = math.hypot(math.sqrt(p.ber * (1 - p.ber) / n), math.sqrt(q * (1 - q) / n))
    assert q > 0.01
    assert abs(p.ber - q) <= 3 * se

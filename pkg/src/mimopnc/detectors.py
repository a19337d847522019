"""Relay detectors that estimate the XOR symbol ``x1 * x2`` from ``R = H X + N``.

All symbols are BPSK (+-1) and the XOR is taken in the symbol domain, so the
target is +1 when both end nodes sent the same bit. Functions accept a single
instance or a batch along leading axes.

Two families of linear detector are provided:

* NC: equalize ``H`` to estimates of ``x1`` and ``x2``, slice each, multiply.
* PNC: equalize ``H D^-1`` to estimates of ``x1 + x2`` and ``x1 - x2`` and map
  those to the XOR with either the combined log-likelihood ratio or a
  selective single-stream threshold test.

The ML detectors search all four transmit pairs and are the reference curves.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .numerics import mmse_equalizer, row_noise_gains, zf_equalizer

#: Sum-difference matrix; rows give ``x1 + x2`` and ``x1 - x2``.
SUM_DIFF = np.array([[1.0, 1.0], [1.0, -1.0]])
SUM_DIFF_INV = 0.5 * SUM_DIFF

# Relative row energy under which an equalizer row is treated as all-zero.
_ZERO_ROW_TOL = 1e-12

_LOG2 = np.log(2.0)


class DetectorKind(enum.Enum):
    ZF_NC = "zf-nc"
    MMSE_NC = "mmse-nc"
    ZF_PNC_LLR = "zf-pnc-llr"
    ZF_PNC_SEL = "zf-pnc-sel"
    MMSE_PNC_LLR = "mmse-pnc-llr"
    MMSE_PNC_SEL = "mmse-pnc-sel"
    ML_NC = "ml-nc"
    ML_PNC = "ml-pnc"

    @property
    def cli_name(self) -> str:
        return self.value

    @classmethod
    def from_name(cls, name: str) -> "DetectorKind":
        try:
            return cls(name.lower().replace("_", "-"))
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown detector {name!r}; choose from {valid}") from None


class ThresholdMode(enum.Enum):
    UNIT = "unit"
    OPTIMAL = "optimal"


@dataclass(frozen=True)
class EqualizedObservation:
    """Real-part statistics of the two equalized streams and their noise variances.

    A variance of ``inf`` marks a stream that carries no information about
    its symbol (an all-zero equalizer row).
    """

    y1: np.ndarray
    y2: np.ndarray
    var1: np.ndarray
    var2: np.ndarray

    def __post_init__(self):
        for name in ("var1", "var2"):
            v = np.asarray(getattr(self, name), dtype=float)
            if np.any(np.isnan(v)) or np.any(v < 0):
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class SumDifferenceMatrix:
    L: int
    M: np.ndarray


def _sign(z):
    """Sign with ``sign(0) = +1``."""
    return np.where(np.asarray(z) >= 0, 1.0, -1.0)


def _scalarize(a):
    a = np.asarray(a)
    return a.item() if a.ndim == 0 else a


def sum_difference_transform(H: np.ndarray) -> np.ndarray:
    """Effective channel ``H D^-1`` seen by the sum/difference streams."""
    H = np.asarray(H, dtype=complex)
    out = np.empty_like(H)
    out[..., 0] = 0.5 * (H[..., 0] + H[..., 1])
    out[..., 1] = 0.5 * (H[..., 0] - H[..., 1])
    return out


def build_sum_difference_matrix(L: int) -> SumDifferenceMatrix:
    """Block-diagonal ``2L x 2L`` matrix with ``L`` copies of ``D``.

    The ordering matches stacking the end nodes' antenna streams as
    ``[x_1, y_1, x_2, y_2, ..., x_L, y_L]``.
    """
    if not isinstance(L, (int, np.integer)) or isinstance(L, bool) or L < 1:
        raise ValueError(f"L must be a positive integer, got {L!r}")
    return SumDifferenceMatrix(int(L), np.kron(np.eye(int(L)), SUM_DIFF))


def equalize(G: np.ndarray, r: np.ndarray, sigma2: float) -> EqualizedObservation:
    """Apply ``G`` to ``r`` and keep the real parts.

    The noise on ``Re((G N)_i)`` has variance ``{G G^H}_ii * sigma2``. A row
    of ``G`` that is (numerically) zero yields ``var = inf``.
    """
    G = np.asarray(G, dtype=complex)
    r = np.asarray(r, dtype=complex)
    y = np.einsum("...ij,...j->...i", G, r).real
    gains = row_noise_gains(G)
    scale = np.max(gains, axis=-1, keepdims=True)
    dead = gains <= _ZERO_ROW_TOL * scale
    var = np.where(dead, np.inf, gains * sigma2)
    return EqualizedObservation(
        _scalarize(y[..., 0]), _scalarize(y[..., 1]),
        _scalarize(var[..., 0]), _scalarize(var[..., 1]),
    )


def detect_nc(obs: EqualizedObservation):
    """Slice both streams and multiply: ``sign(y1) * sign(y2)``."""
    return _scalarize(_sign(obs.y1) * _sign(obs.y2))


def _sum_stream_llr(y, var):
    """Log LR of XOR=+1 vs -1 from an observation of ``x1 + x2``.

    Equals ``-2/var + logcosh(2y/var)`` written so that nothing overflows.
    ``var = inf`` gives 0; ``var = 0`` gives +-inf (the noiseless limit).
    """
    y = np.abs(np.asarray(y, dtype=float))
    var = np.asarray(var, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        llr = (2.0 * y - 2.0) / var + np.log1p(np.exp(-4.0 * y / var)) - _LOG2
    llr = np.where(var == 0, np.where(y >= 1.0, np.inf, -np.inf), llr)
    llr = np.where(np.isinf(var), 0.0, llr)
    return llr


def pnc_log_llr(obs: EqualizedObservation):
    """Combined log-likelihood ratio of XOR=+1 vs XOR=-1.

    Stream 1 observes ``x1 + x2`` in {-2, 0, 2}, stream 2 observes ``x1 - x2``;
    the noises are treated as independent, so the log-LRs add. The difference
    stream's log-LR is the negated sum-stream form.
    """
    l1 = _sum_stream_llr(obs.y1, obs.var1)
    l2 = -_sum_stream_llr(obs.y2, obs.var2)
    with np.errstate(invalid="ignore"):
        total = l1 + l2
    # inf - inf only happens when both streams are noiseless and disagree
    total = np.where(np.isnan(total), 0.0, total)
    return _scalarize(total)


def pnc_llr(obs: EqualizedObservation):
    """Likelihood ratio ``exp(pnc_log_llr)``; may overflow to inf for large values."""
    with np.errstate(over="ignore"):
        return _scalarize(np.exp(pnc_log_llr(obs)))


def detect_pnc_llr(obs: EqualizedObservation):
    """+1 when the combined log-LR is >= 0, else -1."""
    return _scalarize(_sign(pnc_log_llr(obs)))


def optimal_stream_threshold(var):
    """The ``|y|`` at which one stream's likelihood ratio equals 1.

    Solves ``exp(-2/var) cosh(2t/var) = 1``, i.e.
    ``t = (var/2) arccosh(exp(2/var))``, evaluated as
    ``1 + (var/2) log1p(sqrt(1 - exp(-4/var)))`` to stay finite for tiny var.
    """
    var = np.asarray(var, dtype=float)
    if np.any(~(var > 0)) or np.any(np.isinf(var)):
        raise ValueError("stream variance must be positive and finite")
    t = 1.0 + 0.5 * var * np.log1p(np.sqrt(-np.expm1(-4.0 / var)))
    return _scalarize(t)


def detect_pnc_selective(obs: EqualizedObservation, thr=1.0):
    """Decide from the less noisy stream alone.

    Stream 1 (sum) when ``var1 < var2``: ``sign(|y1| - thr)``.
    Otherwise stream 2 (difference): ``sign(thr - |y2|)``. ``thr`` may be a
    scalar, an array, or a ``(thr1, thr2)`` tuple of per-stream thresholds.
    """
    if isinstance(thr, tuple):
        thr1, thr2 = (np.asarray(t, dtype=float) for t in thr)
    else:
        thr1 = thr2 = np.asarray(thr, dtype=float)
    if np.any(~(thr1 > 0)) or np.any(~(thr2 > 0)):
        raise ValueError("threshold must be > 0")
    use_sum = np.asarray(obs.var1) < np.asarray(obs.var2)
    dec = np.where(
        use_sum,
        _sign(np.abs(obs.y1) - thr1),
        _sign(thr2 - np.abs(obs.y2)),
    )
    return _scalarize(dec)


def selective_thresholds(obs: EqualizedObservation, mode: ThresholdMode):
    """Per-stream thresholds for :func:`detect_pnc_selective`.

    ``OPTIMAL`` uses the exact LR crossing for each stream's variance; an
    infinite or zero variance falls back to 1 (the high-SNR limit).
    """
    if mode is ThresholdMode.UNIT:
        return 1.0
    out = []
    for var in (obs.var1, obs.var2):
        var = np.asarray(var, dtype=float)
        usable = np.isfinite(var) & (var > 0)
        safe = np.where(usable, var, 1.0)
        out.append(np.where(usable, optimal_stream_threshold(safe), 1.0))
    return tuple(out)


# (x1, x2) hypotheses in tie-breaking order.
HYPOTHESES = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
_HYP_XOR = HYPOTHESES[:, 0] * HYPOTHESES[:, 1]


def _sq_distances(r, H):
    r = np.asarray(r, dtype=complex)
    H = np.asarray(H, dtype=complex)
    # candidates: (..., 4, 2)
    cand = np.einsum("...ij,kj->...ki", H, HYPOTHESES)
    return np.sum(np.abs(r[..., None, :] - cand) ** 2, axis=-1)


def ml_nc(r, H, sigma2: float | None = None):
    """Jointly ML ``(x1, x2)`` by exhaustive search, then XOR.

    The argmin of ``||r - Hx||^2`` does not depend on ``sigma2``; it is
    accepted for a uniform detector signature.
    """
    d2 = _sq_distances(r, H)
    best = np.argmin(d2, axis=-1)
    return _scalarize(_HYP_XOR[best])


def ml_pnc(r, H, sigma2: float):
    """ML decision on the XOR itself.

    Sums the Gaussian likelihoods ``exp(-||r - Hx||^2 / (2 sigma2))`` over the
    two transmit pairs behind each XOR value. ``sigma2 == 0`` uses the
    minimum-distance limit. Ties go to +1.
    """
    d2 = _sq_distances(r, H)
    plus = d2[..., _HYP_XOR > 0]
    minus = d2[..., _HYP_XOR < 0]
    if sigma2 == 0:
        score_plus = -np.min(plus, axis=-1)
        score_minus = -np.min(minus, axis=-1)
    else:
        s = 2.0 * sigma2
        score_plus = np.logaddexp(-plus[..., 0] / s, -plus[..., 1] / s)
        score_minus = np.logaddexp(-minus[..., 0] / s, -minus[..., 1] / s)
    return _scalarize(np.where(score_plus >= score_minus, 1.0, -1.0))


def detect(kind: DetectorKind, H, r, sigma2: float, threshold: ThresholdMode = ThresholdMode.UNIT):
    """Dispatch one of the eight detectors on ``(H, r)``."""
    if kind is DetectorKind.ML_NC:
        return ml_nc(r, H, sigma2)
    if kind is DetectorKind.ML_PNC:
        return ml_pnc(r, H, sigma2)

    pnc = kind not in (DetectorKind.ZF_NC, DetectorKind.MMSE_NC)
    Heff = sum_difference_transform(H) if pnc else np.asarray(H, dtype=complex)
    if kind in (DetectorKind.ZF_NC, DetectorKind.ZF_PNC_LLR, DetectorKind.ZF_PNC_SEL):
        G, _ = zf_equalizer(Heff)
    else:
        G = mmse_equalizer(Heff, sigma2)
    obs = equalize(G, r, sigma2)

    if not pnc:
        return detect_nc(obs)
    if kind in (DetectorKind.ZF_PNC_LLR, DetectorKind.MMSE_PNC_LLR):
        return detect_pnc_llr(obs)
    return detect_pnc_selective(obs, selective_thresholds(obs, threshold))

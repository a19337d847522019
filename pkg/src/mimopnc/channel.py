"""Signal generation for the multiple-access phase: BPSK, Rayleigh channel, AWGN.

Random draws always go through an explicit :class:`numpy.random.Generator`.
The package standardises on PCG64 seeded through :class:`numpy.random.SeedSequence`
(see :func:`mimopnc.simulator.block_rng`), so stored CSVs stay reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import is_rank_deficient


@dataclass(frozen=True)
class ChannelMatrix:
    """A 2x2 relay channel (or a batch of them) with its rank status."""

    H: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.H, dtype=complex)
        if H.shape[-2:] != (2, 2):
            raise ValueError(f"channel must be 2x2, got shape {H.shape}")
        if not np.all(np.isfinite(H)):
            raise ValueError("channel entries must be finite")
        object.__setattr__(self, "H", H)

    @property
    def rank_deficient(self) -> np.ndarray | bool:
        flag = is_rank_deficient(self.H)
        return bool(flag) if np.ndim(flag) == 0 else flag


def modulate(b):
    """BPSK: bit 0 -> +1, bit 1 -> -1. Works on scalars and arrays."""
    b = np.asarray(b)
    if not np.all((b == 0) | (b == 1)):
        raise ValueError("bits must be 0 or 1")
    out = 1.0 - 2.0 * b
    return float(out) if out.ndim == 0 else out


def demodulate(x):
    """Inverse of :func:`modulate` for exact +-1 symbols."""
    x = np.asarray(x)
    out = (x < 0).astype(np.int8)
    return int(out) if out.ndim == 0 else out


def xor_symbol(x1, x2):
    """Symbol-domain XOR: +1 when the two BPSK symbols agree, -1 otherwise."""
    return x1 * x2


def snr_db_to_sigma2(snr_db: float) -> float:
    """Per-real-dimension noise variance for ``SNR = 1 / sigma2``."""
    return float(10.0 ** (-snr_db / 10.0))


def sigma2_to_snr_db(sigma2: float) -> float:
    return float(-10.0 * np.log10(sigma2))


def sample_channel(rng: np.random.Generator, size: int | tuple = ()) -> ChannelMatrix:
    """Rayleigh channel(s): real and imaginary parts i.i.d. N(0, 1).

    ``size`` is the batch shape; the default draws one 2x2 matrix.
    """
    shape = (size,) if isinstance(size, int) else tuple(size)
    g = rng.standard_normal(shape + (2, 2, 2))
    return ChannelMatrix(g[..., 0] + 1j * g[..., 1])


def complex_noise(rng: np.random.Generator, shape, sigma2: float) -> np.ndarray:
    """Circular complex Gaussian noise with variance ``sigma2`` per real dimension."""
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be >= 0, got {sigma2}")
    shape = (shape,) if isinstance(shape, int) else tuple(shape)
    if sigma2 == 0:
        return np.zeros(shape, dtype=complex)
    g = rng.standard_normal(shape + (2,))
    return np.sqrt(sigma2) * (g[..., 0] + 1j * g[..., 1])


def transmit(H, x, sigma2: float, rng: np.random.Generator | None = None) -> np.ndarray:
    """Received vector ``R = H X + N``.

    ``H`` is a :class:`ChannelMatrix` or array of shape ``(..., 2, 2)``; ``x``
    has shape ``(..., 2)``. ``rng`` may be omitted only when ``sigma2 == 0``.
    """
    if isinstance(H, ChannelMatrix):
        H = H.H
    H = np.asarray(H, dtype=complex)
    x = np.asarray(x, dtype=float)
    clean = np.einsum("...ij,...j->...i", H, x)
    if sigma2 == 0:
        return clean
    if rng is None:
        raise ValueError("a random generator is required when sigma2 > 0")
    return clean + complex_noise(rng, clean.shape, sigma2)

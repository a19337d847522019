"""Closed-form complex linear algebra for 2x2 systems.

Every function broadcasts over leading batch axes: a matrix argument has shape
``(..., 2, 2)`` and the result keeps the same batch shape. A single matrix is
just the zero-batch case, so the Monte Carlo loop and the unit tests share one
code path.
"""

from __future__ import annotations

import numpy as np

#: Gram matrices with eigenvalue ratio below this are treated as singular.
RANK_TOL = 1e-12


def hermitian(A: np.ndarray) -> np.ndarray:
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(A, -1, -2))


def matmul2(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Batched 2x2 product written out entrywise (``@`` is slow on tiny matrices)."""
    A = np.asarray(A)
    B = np.asarray(B)
    shape = np.broadcast_shapes(A.shape, B.shape)
    out = np.empty(shape, dtype=np.result_type(A, B))
    for i in range(2):
        for j in range(2):
            out[..., i, j] = A[..., i, 0] * B[..., 0, j] + A[..., i, 1] * B[..., 1, j]
    return out


def gram(H: np.ndarray) -> np.ndarray:
    """Return ``H^H H``."""
    H = np.asarray(H, dtype=complex)
    return matmul2(hermitian(H), H)


def det2(A: np.ndarray) -> np.ndarray:
    return A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]


def adjugate2(A: np.ndarray) -> np.ndarray:
    adj = np.empty_like(A)
    adj[..., 0, 0] = A[..., 1, 1]
    adj[..., 1, 1] = A[..., 0, 0]
    adj[..., 0, 1] = -A[..., 0, 1]
    adj[..., 1, 0] = -A[..., 1, 0]
    return adj


def inv2(A: np.ndarray) -> np.ndarray:
    """Inverse by adjugate over determinant. No singularity check."""
    A = np.asarray(A, dtype=complex)
    return adjugate2(A) / det2(A)[..., None, None]


def hermitian_eigvals2(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Smallest and largest eigenvalue of a Hermitian 2x2 matrix.

    Uses ``tr/2 -+ sqrt((a - d)^2/4 + |b|^2)``, which avoids the cancellation
    of the textbook ``(tr/2)^2 - det`` form.
    """
    a = A[..., 0, 0].real
    d = A[..., 1, 1].real
    b = A[..., 0, 1]
    mid = 0.5 * (a + d)
    rad = np.hypot(0.5 * (a - d), np.abs(b))
    return mid - rad, mid + rad


def _singular_gram(A: np.ndarray, tol: float) -> np.ndarray:
    lo, hi = hermitian_eigvals2(A)
    return lo <= tol * hi


def is_rank_deficient(H: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """True where the Gram matrix of ``H`` is numerically singular.

    The zero matrix counts as rank deficient.
    """
    return _singular_gram(gram(H), tol)


def pseudo_inverse(A: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of 2x2 complex matrices.

    Full rank: plain inverse. Rank one: ``A^H / ||A||_F^2`` (for ``A = s u v^H``
    the pseudo-inverse is ``v u^H / s``, and ``||A||_F = s``). Rank zero: zeros.
    """
    A = np.asarray(A, dtype=complex)
    deficient = is_rank_deficient(A, tol)
    fro2 = np.sum(np.abs(A) ** 2, axis=(-2, -1))

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        full = inv2(A)
        rank1 = hermitian(A) / fro2[..., None, None]
    out = np.where(deficient[..., None, None], rank1, full)
    out = np.where((fro2 == 0)[..., None, None], 0.0, out)
    return out


def zf_equalizer(H: np.ndarray, tol: float = RANK_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Zero-forcing equalizer ``(H^H H)^-1 H^H``.

    Returns ``(G, rank_deficient)``. Where the Gram matrix is singular the
    pseudo-inverse is used instead and the flag is set.
    """
    H = np.asarray(H, dtype=complex)
    A = gram(H)
    deficient = _singular_gram(A, tol)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        G = matmul2(inv2(A), hermitian(H))
    if np.any(deficient):
        G = np.where(deficient[..., None, None], pseudo_inverse(H, tol), G)
    return G, deficient


def mmse_equalizer(H: np.ndarray, sigma2: float, tol: float = RANK_TOL) -> np.ndarray:
    """MMSE equalizer ``(sigma2 I + H^H H)^-1 H^H``.

    ``sigma2`` is the noise variance per real dimension. With ``sigma2 == 0``
    this is the zero-forcing equalizer and needs a full-rank ``H``.
    """
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be >= 0, got {sigma2}")
    H = np.asarray(H, dtype=complex)
    if sigma2 == 0:
        if np.any(is_rank_deficient(H, tol)):
            raise ValueError("MMSE equalizer with sigma2 = 0 needs a full-rank channel")
    A = gram(H) + sigma2 * np.eye(2)
    return matmul2(inv2(A), hermitian(H))


def row_noise_gains(G: np.ndarray) -> np.ndarray:
    """Diagonal of ``G G^H``, i.e. the squared row norms of ``G``.

    Returns an array of shape ``(..., 2)``.
    """
    return np.sum(np.abs(np.asarray(G)) ** 2, axis=-1)

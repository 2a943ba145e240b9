"""Truncated-SVD minimization of ``||b + A c||`` in the normalized norm.

The norm on C^M is ``||b||^2 = (1/M) sum |b_m|^2``, so a unit-modulus vector
(such as a plane wave sampled on the boundary) has norm one.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["LsqSolution", "normalized_norm", "svd_min", "truncated_svd"]


@dataclass(frozen=True)
class LsqSolution:
    """Minimizer of the discrepancy.

    Attributes
    ----------
    coeffs : ndarray, shape (N,)
    residual : float
        ``normalized_norm(b + A @ coeffs)``.
    rank_used : int
        Singular values kept (those ``>= w_min``).
    sv_max, sv_min_retained : float
        Largest singular value and the smallest one kept (0 if none kept).
    """

    coeffs: np.ndarray
    residual: float
    rank_used: int
    sv_max: float
    sv_min_retained: float


def normalized_norm(b):
    b = np.asarray(b)
    if b.size == 0:
        raise ValueError("empty vector")
    return float(np.sqrt(np.vdot(b, b).real / b.size))


def truncated_svd(A, b):
    """Thin SVD of A together with ``U^H b``.

    For tall matrices the SVD is taken of the triangular factor of a QR
    factorization of ``[A | b]``; the last column of that factor holds
    ``Q^H b``, so ``Q`` is never formed.

    Returns ``(s, Vh, Uhb)``.
    """
    A = np.asarray(A)
    b = np.asarray(b)
    M, N = A.shape
    if M > 2 * N:
        R = np.linalg.qr(np.column_stack([A, b]), mode="r")
        Ur, s, Vh = np.linalg.svd(R[:N, :N])
        return s, Vh, Ur.conj().T @ R[:N, N]
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    return s, Vh, U.conj().T @ b


def svd_min(A, b, w_min=1e-12, relative=False):
    """Minimum-norm minimizer of ``||b + A c||`` with a spectral cutoff.

    Singular values below ``w_min`` (or below ``w_min * s_max`` when
    ``relative``) are discarded, i.e. ``c = -V S_w^+ U^H b``.

    Raises
    ------
    numpy.linalg.LinAlgError
        If the SVD does not converge.
    """
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if A.ndim != 2 or b.shape != (A.shape[0],):
        raise ValueError(f"shape mismatch: A {A.shape}, b {b.shape}")
    if not w_min > 0:
        raise ValueError("w_min must be > 0")
    try:
        s, Vh, Uhb = truncated_svd(A, b)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"SVD failed for {A.shape} matrix "
            f"(finite entries: {np.isfinite(A).all()})") from exc
    threshold = w_min * s[0] if (relative and s.size) else w_min
    keep = s >= threshold
    rank = int(np.count_nonzero(keep))
    coeffs = -(Vh[keep].conj().T @ (Uhb[keep] / s[keep]))
    return LsqSolution(
        coeffs=coeffs,
        residual=normalized_norm(b + A @ coeffs),
        rank_used=rank,
        sv_max=float(s[0]) if s.size else 0.0,
        sv_min_retained=float(s[keep][-1]) if rank else 0.0,
    )

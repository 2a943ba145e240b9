"""Outgoing basis functions and the boundary collocation matrix.

Planar basis (source ``x_j``, order ``-L <= l <= L``)::

    psi_l(x, x_j) = H_l^(1)(k |x - x_j|) exp(i l theta),   x - x_j = |x - x_j| e^{i theta}

Spatial basis (order ``0 <= l <= L``, ``|m| <= l``)::

    psi_lm(x, x_j) = Y_lm((x - x_j)/|x - x_j|) h_l(k |x - x_j|)

with ``h_l`` the outgoing radial factor of :func:`specfun.sph_hankel1_out`.

Columns are ordered source-major: all orders of source 0, then source 1, and
so on. Within one source, planar orders run ``l = -L..L`` and spatial orders
run ``l`` ascending then ``m`` ascending. Coefficient files rely on this order.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from . import specfun

__all__ = [
    "BasisIndex",
    "order_list",
    "n_orders",
    "n_columns",
    "flat_index",
    "index_of",
    "psi_2d",
    "psi_3d",
    "basis_matrix",
    "assemble",
    "farfield_matrix",
    "farfield_pattern",
]


@dataclass(frozen=True)
class BasisIndex:
    j: int
    ell: int
    m: Optional[int] = None


def order_list(dim, L):
    """Per-source order labels ``(l, m)`` in column order (m is None in 2D)."""
    if dim == 2:
        return [(l, None) for l in range(-L, L + 1)]
    if dim == 3:
        return [(l, m) for l in range(L + 1) for m in range(-l, l + 1)]
    raise ValueError(f"dimension must be 2 or 3, got {dim}")


def n_orders(dim, L):
    return 2 * L + 1 if dim == 2 else (L + 1) ** 2


def n_columns(dim, L, J):
    """N = (2L+1) J in 2D and (L+1)^2 J in 3D."""
    return n_orders(dim, L) * J


def flat_index(index, dim, L):
    """Column number of a :class:`BasisIndex`."""
    if dim == 2:
        if abs(index.ell) > L:
            raise ValueError("order out of range")
        local = index.ell + L
    else:
        if not 0 <= index.ell <= L or abs(index.m) > index.ell:
            raise ValueError("order out of range")
        local = index.ell * index.ell + index.ell + index.m
    return index.j * n_orders(dim, L) + local


def index_of(n, dim, L):
    """Inverse of :func:`flat_index`."""
    j, local = divmod(int(n), n_orders(dim, L))
    if dim == 2:
        return BasisIndex(j, local - L)
    ell = int(np.sqrt(local))
    return BasisIndex(j, ell, local - ell * ell - ell)


def _offsets(x, sources):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    src = np.atleast_2d(np.asarray(sources, dtype=float))
    if x.shape[1] != src.shape[1]:
        raise ValueError("points and sources differ in dimension")
    diff = x[:, None, :] - src[None, :, :]
    r = np.sqrt(np.sum(diff * diff, axis=-1))
    if np.any(r == 0):
        raise ValueError("evaluation point coincides with a source point")
    return diff, r


def _planar_block(L, k, diff, r):
    """Values of shape (P, J, 2L+1)."""
    hank = specfun.cyl_hankel1_orders(L, k * r)       # (L+1, P, J)
    phase = (diff[..., 0] + 1j * diff[..., 1]) / r   # e^{i theta}
    out = np.empty(r.shape + (2 * L + 1,), dtype=complex)
    out[..., L] = hank[0]
    power = np.ones_like(phase)
    for l in range(1, L + 1):
        power = power * phase
        out[..., L + l] = hank[l] * power
        # H_{-l} e^{-il theta} = (-1)^l H_l conj(e^{il theta})
        out[..., L - l] = (-1) ** l * hank[l] * np.conj(power)
    return out


def _spatial_radial(L, k, r):
    """Outgoing radial factors h_l(k, r) for l = 0..L, shape (L+1,) + r.shape."""
    out = np.empty((L + 1,) + r.shape, dtype=complex)
    out[0] = np.exp(1j * k * r) / r
    kr = k * r
    for l in range(1, L + 1):
        out[l] = (1j ** (l + 1)) * k * (special.spherical_jn(l, kr)
                                        + 1j * special.spherical_yn(l, kr))
    return out


def _spatial_block(L, k, diff, r):
    """Values of shape (P, J, (L+1)^2)."""
    radial = _spatial_radial(L, k, r)
    if L == 0:
        return (radial[0] / np.sqrt(4 * np.pi))[..., None]
    ylm = specfun.sph_harmonics_all(L, diff / r[..., None])
    out = np.empty(r.shape + ((L + 1) ** 2,), dtype=complex)
    for l in range(L + 1):
        for m in range(-l, l + 1):
            out[..., l * l + l + m] = ylm[l * l + l + m] * radial[l]
    return out


def basis_matrix(dim, L, k, x, sources):
    """Matrix of all basis values, rows = points, columns = (source, order).

    Returns
    -------
    ndarray, shape (P, J * n_orders)
    """
    diff, r = _offsets(x, sources)
    if diff.shape[-1] != dim:
        raise ValueError("dimension mismatch")
    block = _planar_block(L, k, diff, r) if dim == 2 else _spatial_block(L, k, diff, r)
    return block.reshape(r.shape[0], -1)


def psi_2d(l, k, x, xj):
    """Single planar basis value ``H_l(k r) exp(i l theta)``."""
    diff, r = _offsets(x, xj)
    theta = np.arctan2(diff[0, 0, 1], diff[0, 0, 0])
    return specfun.cyl_hankel1(l, k * r[0, 0]) * np.exp(1j * l * theta)


def psi_3d(ell, m, k, x, xj):
    """Single spatial basis value ``Y_lm(direction) h_l(k r)``."""
    if ell < 0 or abs(m) > ell:
        raise ValueError(f"invalid (l, m) = ({ell}, {m})")
    diff, r = _offsets(x, xj)
    rr = r[0, 0]
    return specfun.sph_harmonic(ell, m, diff[0, 0] / rr) * specfun.sph_hankel1_out(ell, k, rr)


def assemble(surface, sources, L, k):
    """Collocation matrix ``A[m, n] = psi_n(t_m)`` for a batch of sources.

    ``sources`` is a :class:`geometry.PointBatch` or an array of points.
    """
    pts = getattr(sources, "points", sources)
    return basis_matrix(surface.dimension, L, k, surface.nodes, pts)


def farfield_matrix(dim, L, k, directions, sources):
    """Far-field patterns of every basis column at the given directions.

    In 3D ``psi -> pattern * exp(ikr)/r`` and the pattern of column (j, l, m)
    is ``Y_lm(d) exp(-ik d.x_j)``. In 2D ``psi -> pattern * exp(ikr)/sqrt(r)``
    with pattern ``sqrt(2/(pi k)) e^{-i pi/4} (-i)^l e^{i l theta} exp(-ik d.x_j)``.
    """
    d = np.atleast_2d(np.asarray(directions, dtype=float))
    src = np.atleast_2d(np.asarray(sources, dtype=float))
    norms = np.linalg.norm(d, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-10):
        raise ValueError("directions must be unit vectors")
    if d.shape[1] != dim or src.shape[1] != dim:
        raise ValueError("dimension mismatch")
    shift = np.exp(-1j * k * (d @ src.T))            # (Q, J)
    if dim == 2:
        theta = np.arctan2(d[:, 1], d[:, 0])
        ls = np.arange(-L, L + 1)
        ang = (np.sqrt(2 / (np.pi * k)) * np.exp(-1j * np.pi / 4)
               * (-1j) ** ls[None, :] * np.exp(1j * ls[None, :] * theta[:, None]))
    else:
        ang = specfun.sph_harmonics_all(L, d).T          # (Q, (L+1)^2)
    return (shift[:, :, None] * ang[:, None, :]).reshape(d.shape[0], -1)


def farfield_pattern(index, sources, k, direction, L=None):
    """Far-field pattern of one basis element (see :func:`farfield_matrix`)."""
    src = np.atleast_2d(getattr(sources, "points", sources))
    dim = src.shape[1]
    if L is None:
        L = abs(index.ell)
    column = farfield_matrix(dim, L, k, direction, src[index.j])
    local = flat_index(BasisIndex(0, index.ell, index.m), dim, L)
    return column[0, local]

"""Fields reconstructed from an :class:`~mrcscatter.mrc.Expansion`.

Far-field conventions: in 3D ``v(r d) ~ A(d) exp(ikr)/r`` and in 2D
``v(r d) ~ A(d) exp(ikr)/sqrt(r)``.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import basis, specfun
from .lsq import normalized_norm

__all__ = [
    "FarField",
    "scattered_field",
    "total_field",
    "farfield",
    "farfield_coefficients",
    "sphere_quadrature",
    "helmholtz_residual",
    "boundary_error",
    "write_field_csv",
    "write_farfield_csv",
]

# entries per basis-matrix chunk during field evaluation
_CHUNK = 2_000_000


@dataclass(frozen=True, eq=False)
class FarField:
    """Scattering amplitude sampled at unit directions.

    ``weights`` and ``exact_degree`` describe the quadrature rule when the
    directions come from :func:`sphere_quadrature`.
    """

    directions: np.ndarray
    amplitudes: np.ndarray
    weights: Optional[np.ndarray] = None
    exact_degree: Optional[int] = None


def _points(x, dim):
    x = np.asarray(x, dtype=float)
    pts = np.atleast_2d(x)
    if pts.shape[1] != dim:
        raise ValueError(f"expected {dim}-dimensional points")
    return pts, x.ndim == 1


def _apply(expansion, x, matrix_fn):
    """Sum coefficient-weighted basis values in source chunks."""
    dim = expansion.dimension
    pts, single = _points(x, dim)
    src, coeffs = expansion.flat()
    out = np.zeros(len(pts), dtype=complex)
    no = expansion.n_orders
    step = max(1, _CHUNK // max(1, len(pts) * no))
    for s0 in range(0, len(src), step):
        block = matrix_fn(pts, src[s0:s0 + step])
        out += block @ coeffs[s0 * no:(s0 + step) * no]
    return out[0] if single else out


def scattered_field(expansion, x):
    """Approximate scattered field at exterior point(s) ``x``."""
    e = expansion
    return _apply(e, x, lambda p, s: basis.basis_matrix(e.dimension, e.L, e.problem.k, p, s))


def total_field(expansion, x):
    """Incident plus scattered field."""
    return expansion.problem.incident(np.asarray(x, dtype=float)) + scattered_field(expansion, x)


def farfield(expansion, directions, weights=None, exact_degree=None):
    """Scattering amplitude of the expansion at the given unit directions."""
    e = expansion
    d = np.atleast_2d(np.asarray(directions, dtype=float))
    if np.any(np.abs(np.linalg.norm(d, axis=1) - 1.0) > 1e-10):
        raise ValueError("directions must be unit vectors")
    amp = _apply(e, d, lambda p, s: basis.farfield_matrix(e.dimension, e.L, e.problem.k, p, s))
    return FarField(d, np.atleast_1d(amp), weights, exact_degree)


def sphere_quadrature(n_polar, n_azimuth=None):
    """Product rule on the unit sphere: Gauss-Legendre in cos(polar) times
    uniform azimuth.

    Returns ``(directions, weights, exact_degree)``; spherical polynomials of
    degree ``<= exact_degree`` are integrated exactly.
    """
    if n_azimuth is None:
        n_azimuth = 2 * n_polar
    x, w = np.polynomial.legendre.leggauss(n_polar)
    phi = 2 * np.pi * np.arange(n_azimuth) / n_azimuth
    ct, ph = np.meshgrid(x, phi, indexing="ij")
    st = np.sqrt(1 - ct ** 2)
    dirs = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=-1).reshape(-1, 3)
    weights = (w[:, None] * np.full(n_azimuth, 2 * np.pi / n_azimuth)).ravel()
    return dirs, weights, min(2 * n_polar - 1, n_azimuth - 1)


def farfield_coefficients(ff, Lmax):
    """Spherical-harmonic moments ``A_lm = sum_q w_q A(d_q) conj(Y_lm(d_q))``.

    Returns an array indexed by ``l*l + l + m``.
    """
    if ff.directions.shape[1] != 3:
        raise ValueError("coefficients are defined for 3D far fields")
    if ff.weights is None or ff.exact_degree is None:
        raise ValueError("far field carries no quadrature rule")
    if ff.exact_degree < 2 * Lmax:
        raise ValueError(f"quadrature exact to degree {ff.exact_degree} < 2*Lmax = {2 * Lmax}")
    ylm = specfun.sph_harmonics_all(Lmax, ff.directions)
    return np.conj(ylm) @ (ff.weights * ff.amplitudes)


def helmholtz_residual(expansion, x, h):
    """Relative finite-difference Helmholtz residual at one point.

    ``|Lap_h v + k^2 v| / (k^2 |v|)`` with the central second difference of
    step ``h`` in each coordinate. A zero field gives 0.

    Raises
    ------
    ValueError
        If a source lies within ``h`` of ``x``.
    """
    dim = expansion.dimension
    x = np.asarray(x, dtype=float)
    src, _ = expansion.flat()
    if len(src) and np.min(np.linalg.norm(src - x, axis=1)) <= h:
        raise ValueError("step h reaches a source point")
    stencil = [x]
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = h
        stencil += [x + e, x - e]
    vals = scattered_field(expansion, np.array(stencil))
    v0 = vals[0]
    k2 = expansion.problem.k ** 2
    lap = (np.sum(vals[1:]) - 2 * dim * v0) / h ** 2
    if v0 == 0 and lap == 0:
        return 0.0
    return float(abs(lap + k2 * v0) / (k2 * max(abs(v0), 1e-300)))


def boundary_error(expansion, problem, surface):
    """Normalized norm of the total field over the boundary nodes."""
    if surface.dimension != problem.dimension:
        raise ValueError("surface and problem dimensions differ")
    u = problem.incident(surface.nodes) + scattered_field(expansion, surface.nodes)
    return normalized_norm(u)


def grid_points(bounds, resolution):
    """Regular grid over ``[x0, x1] x [y0, y1] (x [z0, z1])``."""
    bounds = np.asarray(bounds, dtype=float).reshape(-1, 2)
    axes = [np.linspace(lo, hi, resolution) for lo, hi in bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def write_field_csv(path, points, values):
    coords = ["x", "y", "z"][:points.shape[1]]
    data = np.column_stack([points, values.real, values.imag])
    np.savetxt(path, data, delimiter=",", fmt="%.17g",
               header=",".join(coords + ["re_v", "im_v"]), comments="")


def write_farfield_csv(path, ff):
    d = ff.directions
    if d.shape[1] == 2:
        angles = np.arctan2(d[:, 1], d[:, 0])[:, None]
        names = ["theta"]
    else:
        angles = np.column_stack([np.arctan2(d[:, 1], d[:, 0]), np.arccos(np.clip(d[:, 2], -1, 1))])
        names = ["theta", "phi"]
    data = np.column_stack([angles, ff.amplitudes.real, ff.amplitudes.imag])
    np.savetxt(path, data, delimiter=",", fmt="%.17g",
               header=",".join(names + ["re_A", "im_A"]), comments="")

"""Separation-of-variables solutions for the soft sphere and the soft disk.

Sphere of radius a, plane wave along alpha::

    v(x) = -sum_l (2l+1) i^l [j_l(ka) / h_l(ka)] h_l(k|x|) P_l(alpha . x/|x|)
    A(d) = (i/k) sum_l (2l+1) [j_l(ka) / h_l(ka)] P_l(alpha . d)

with ``v ~ A exp(ikr)/r``. Disk of radius a::

    v(x) = -sum_l eps_l i^l [J_l(ka) / H_l(ka)] H_l(k|x|) cos(l theta_rel)

with ``eps_0 = 1`` and ``eps_l = 2`` otherwise.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special

from .field import FarField

__all__ = [
    "SeriesTruncation",
    "sphere_scattered_exact",
    "sphere_farfield_exact",
    "sphere_farfield_coefficients",
    "sphere_truncation",
    "disk_scattered_exact_2d",
    "disk_truncation",
]


@dataclass(frozen=True)
class SeriesTruncation:
    """Series length and the size of the last kept term relative to the first."""

    Lmax: int = 30
    tail_bound: float = float("nan")


def _ratio_sph(ls, ka):
    return special.spherical_jn(ls, ka) / (special.spherical_jn(ls, ka) + 1j * special.spherical_yn(ls, ka))


def _ratio_cyl(ls, ka):
    return special.jv(ls, ka) / special.hankel1(ls, ka)


def _radius(x, a):
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(np.atleast_2d(x), axis=1)
    if np.any(r <= a):
        raise ValueError("points must lie outside the obstacle (|x| > a)")
    return x, r


def _lmax(trunc):
    return trunc.Lmax if isinstance(trunc, SeriesTruncation) else int(trunc)


def sphere_truncation(a, k, Lmax=30):
    ls = np.arange(Lmax + 1)
    terms = np.abs((2 * ls + 1) * _ratio_sph(ls, k * a))
    return SeriesTruncation(Lmax, float(terms[-1] / terms[0]))


def disk_truncation(a, k, Lmax=30):
    ls = np.arange(Lmax + 1)
    terms = np.abs(_ratio_cyl(ls, k * a))
    return SeriesTruncation(Lmax, float(terms[-1] / terms[0]))


def sphere_scattered_exact(a, k, alpha, x, trunc=30):
    """Scattered field of the soft sphere at exterior point(s) x."""
    x, r = _radius(x, a)
    alpha = np.asarray(alpha, dtype=float)
    cos_g = np.clip(np.atleast_2d(x) @ alpha / r, -1.0, 1.0)
    total = np.zeros(r.shape, dtype=complex)
    for l in range(_lmax(trunc) + 1):
        h = special.spherical_jn(l, k * r) + 1j * special.spherical_yn(l, k * r)
        total -= (2 * l + 1) * (1j ** l) * _ratio_sph(l, k * a) * h * special.eval_legendre(l, cos_g)
    return total[0] if x.ndim == 1 else total


def sphere_farfield_exact(a, k, alpha, directions, trunc=30):
    """Scattering amplitude of the soft sphere."""
    d = np.atleast_2d(np.asarray(directions, dtype=float))
    cos_g = np.clip(d @ np.asarray(alpha, dtype=float), -1.0, 1.0)
    amp = np.zeros(len(d), dtype=complex)
    for l in range(_lmax(trunc) + 1):
        amp += (2 * l + 1) * _ratio_sph(l, k * a) * special.eval_legendre(l, cos_g)
    return FarField(d, (1j / k) * amp)


def sphere_farfield_coefficients(a, k, alpha, Lmax):
    """Moments ``A_lm = (4 pi i / k) [j_l/h_l](ka) conj(Y_lm(alpha))``, indexed by l*l+l+m."""
    from .specfun import sph_harmonics_all

    ls = np.repeat(np.arange(Lmax + 1), 2 * np.arange(Lmax + 1) + 1)
    y = sph_harmonics_all(Lmax, np.asarray(alpha, dtype=float))
    return (4j * np.pi / k) * _ratio_sph(ls, k * a) * np.conj(y)


def disk_scattered_exact_2d(a, k, alpha, x, trunc=30):
    """Scattered field of the soft disk at exterior point(s) x."""
    x, r = _radius(x, a)
    pts = np.atleast_2d(x)
    alpha = np.asarray(alpha, dtype=float)
    theta = np.arctan2(pts[:, 1], pts[:, 0]) - np.arctan2(alpha[1], alpha[0])
    total = np.zeros(r.shape, dtype=complex)
    for l in range(_lmax(trunc) + 1):
        eps = 1.0 if l == 0 else 2.0
        total -= eps * (1j ** l) * _ratio_cyl(l, k * a) * special.hankel1(l, k * r) * np.cos(l * theta)
    return total[0] if x.ndim == 1 else total

"""Special functions for the outgoing-wave basis.

Cylindrical and spherical Bessel/Hankel functions are thin wrappers over
:mod:`scipy.special` with the domain checks and order conventions used in
this package. Orthonormal spherical harmonics are evaluated here with the
standard three-term recurrence for normalized associated Legendre functions
(Condon-Shortley phase included):

    Y_lm(d) = N_lm P_l^m(cos polar) exp(i m azimuth),    d = unit vector

and ``Y_l,-m = (-1)^m conj(Y_lm)``.

The spherical radial factor is normalized so that it behaves like the free
outgoing point source at infinity::

    sph_hankel1_out(l, k, r) = i^(l+1) k h_l^(1)(k r)  ~  exp(i k r) / r
"""

import numpy as np
from scipy import special

__all__ = [
    "cyl_bessel_j",
    "cyl_bessel_y",
    "cyl_hankel1",
    "cyl_hankel1_orders",
    "sph_bessel_j",
    "sph_hankel1",
    "sph_hankel1_out",
    "legendre_p",
    "sph_harmonic",
    "sph_harmonics_all",
    "direction_angles",
]

_UNIT_TOL = 1e-10


def _require_positive(x, name="x"):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError(f"{name} must be > 0")
    return x


def _scalar_or_array(value, like):
    return value.item() if np.ndim(like) == 0 else value


def cyl_bessel_j(l, x):
    """Bessel function of the first kind J_l(x), integer order, x > 0."""
    x = _require_positive(x)
    l = int(l)
    sign = -1.0 if (l < 0 and l % 2) else 1.0
    return _scalar_or_array(sign * special.jv(abs(l), x), x)


def cyl_bessel_y(l, x):
    """Bessel function of the second kind Y_l(x), integer order, x > 0."""
    x = _require_positive(x)
    l = int(l)
    sign = -1.0 if (l < 0 and l % 2) else 1.0
    return _scalar_or_array(sign * special.yv(abs(l), x), x)


def cyl_hankel1(l, x):
    """Hankel function H_l^(1)(x) = J_l(x) + i Y_l(x).

    Negative orders use ``H_{-l} = (-1)^l H_l``.
    """
    x = _require_positive(x)
    l = int(l)
    sign = -1.0 if (l < 0 and l % 2) else 1.0
    return _scalar_or_array(sign * special.hankel1(abs(l), x), x)


def cyl_hankel1_orders(lmax, x):
    """H_l^(1)(x) for l = 0..lmax, shape ``(lmax + 1,) + x.shape``.

    H_0 and H_1 come from the Cephes J0/J1/Y0/Y1 routines and higher orders
    from the upward recurrence ``H_{l+1} = (2l/x) H_l - H_{l-1}``. Upward
    recursion is dominated by the Y part, which grows with l, so the complex
    value keeps full relative accuracy even where J_l itself is tiny.
    """
    x = _require_positive(x)
    out = np.empty((lmax + 1,) + x.shape, dtype=complex)
    out[0] = special.j0(x) + 1j * special.y0(x)
    if lmax >= 1:
        out[1] = special.j1(x) + 1j * special.y1(x)
    for l in range(1, lmax):
        out[l + 1] = (2.0 * l / x) * out[l] - out[l - 1]
    return out


def sph_bessel_j(l, x):
    """Spherical Bessel function j_l(x) for x >= 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be >= 0")
    return _scalar_or_array(special.spherical_jn(int(l), x), x)


def sph_hankel1(l, x):
    """Standard spherical Hankel function h_l^(1)(x) = j_l(x) + i y_l(x)."""
    x = _require_positive(x)
    l = int(l)
    val = special.spherical_jn(l, x) + 1j * special.spherical_yn(l, x)
    return _scalar_or_array(val, x)


def sph_hankel1_out(l, k, r):
    """Outgoing spherical radial factor ``i^(l+1) k h_l^(1)(k r)``.

    For ``l = 0`` this is exactly ``exp(ikr)/r``; for every l it tends to
    ``exp(ikr)/r`` as ``r -> inf``.
    """
    if l < 0:
        raise ValueError("order must be >= 0")
    if not k > 0:
        raise ValueError("k must be > 0")
    r = _require_positive(r, "r")
    if l == 0:
        val = np.exp(1j * k * r) / r
    else:
        val = (1j ** (l + 1)) * k * (special.spherical_jn(l, k * r)
                                     + 1j * special.spherical_yn(l, k * r))
    return _scalar_or_array(val, r)


def legendre_p(l, x):
    """Legendre polynomial P_l(x)."""
    return special.eval_legendre(int(l), x)


def direction_angles(direction):
    """Return ``(cos_polar, azimuth)`` for unit vectors of shape ``(..., 3)``."""
    d = np.asarray(direction, dtype=float)
    if d.shape[-1] != 3:
        raise ValueError("directions must be 3-vectors")
    norm = np.linalg.norm(d, axis=-1)
    if np.any(np.abs(norm - 1.0) > _UNIT_TOL):
        raise ValueError("direction must be a unit vector")
    cos_polar = np.clip(d[..., 2], -1.0, 1.0)
    azimuth = np.arctan2(d[..., 1], d[..., 0])
    return cos_polar, azimuth


def _normalized_legendre_table(lmax, x):
    """Table ``p[l, m]`` of N_lm P_l^m(x) for 0 <= m <= l <= lmax.

    N_lm P_l^m carries the Condon-Shortley phase and the normalization
    sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!).
    """
    x = np.asarray(x, dtype=float)
    sin_t = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    p = np.zeros((lmax + 1, lmax + 1) + x.shape)
    p[0, 0] = 1.0 / np.sqrt(4.0 * np.pi)
    for m in range(1, lmax + 1):
        p[m, m] = -np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * sin_t * p[m - 1, m - 1]
    for m in range(0, lmax):
        p[m + 1, m] = np.sqrt(2.0 * m + 3.0) * x * p[m, m]
    for m in range(0, lmax + 1):
        for l in range(m + 2, lmax + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            p[l, m] = a * (x * p[l - 1, m] - b * p[l - 2, m])
    return p


def sph_harmonics_all(lmax, direction):
    """All Y_lm for l <= lmax at the given unit directions.

    Returns an array of shape ``((lmax+1)**2,) + batch_shape`` ordered by l
    ascending, then m ascending (``index = l*l + l + m``).
    """
    cos_polar, azimuth = direction_angles(direction)
    p = _normalized_legendre_table(lmax, cos_polar)
    out = np.empty(((lmax + 1) ** 2,) + cos_polar.shape, dtype=complex)
    for l in range(lmax + 1):
        for m in range(0, l + 1):
            y = p[l, m] * np.exp(1j * m * azimuth)
            out[l * l + l + m] = y
            if m:
                out[l * l + l - m] = (-1) ** m * np.conj(y)
    return out


def sph_harmonic(l, m, direction):
    """Orthonormal spherical harmonic Y_lm at a unit direction (or array)."""
    if l < 0 or abs(m) > l:
        raise ValueError(f"invalid (l, m) = ({l}, {m})")
    vals = sph_harmonics_all(l, direction)[l * l + l + m]
    return vals.item() if np.ndim(vals) == 0 else vals

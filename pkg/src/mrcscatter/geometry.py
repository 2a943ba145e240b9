"""Benchmark obstacles, boundary node sets and interior point generation.

Supported kinds and their parameters (defaults reproduce the benchmark
obstacles)::

    ellipse2d    a=2.0, b=1.0          r(t) = (a cos t, b sin t)
    disk2d       radius=1.0            r(t) = radius (cos t, sin t)
    kite2d       (none)                r(t) = (-0.65 + cos t + 0.65 cos 2t, 1.5 sin t)
    triangle2d   vertices (-1,0), (1,-1), (1,1)  (arc-length parametrized)
    sphere3d     radius=1.0            spherical Fibonacci nodes
    cube3d       half=1.0              cell-centred s x s grid per face
    ellipsoid3d  a=4.0, b=1.0, c=1.0   Fibonacci nodes scaled by (a, b, c)

Two-dimensional nodes sit at ``t_m = 2 pi m / M``. Membership tests are
analytic per kind and treat points within a relative margin of 1e-12 of the
boundary as outside.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

__all__ = [
    "KINDS",
    "Surface",
    "PointBatch",
    "SamplingError",
    "make_obstacle",
    "contains",
    "sample_interior",
    "sample_graded",
    "deterministic_sources",
    "fibonacci_sphere",
    "write_nodes_csv",
]

BOUNDARY_MARGIN = 1e-12
MAX_REJECTIONS = 1_000_000

_DEFAULT_PARAMS = {
    "ellipse2d": {"a": 2.0, "b": 1.0},
    "disk2d": {"radius": 1.0},
    "kite2d": {},
    "triangle2d": {},
    "sphere3d": {"radius": 1.0},
    "cube3d": {"half": 1.0},
    "ellipsoid3d": {"a": 4.0, "b": 1.0, "c": 1.0},
}
KINDS = tuple(_DEFAULT_PARAMS)

TRIANGLE_VERTICES = np.array([[-1.0, 0.0], [1.0, -1.0], [1.0, 1.0]])


class SamplingError(RuntimeError):
    """Rejection sampling could not produce the requested interior points."""


@dataclass(frozen=True, eq=False)
class Surface:
    """Discretized obstacle boundary.

    Attributes
    ----------
    kind : str
        One of :data:`KINDS`.
    params : dict
        Shape parameters of the kind (defaults filled in).
    nodes : ndarray, shape (M, dim)
        Boundary collocation nodes t_m.
    bbox : tuple of ndarray
        ``(lower, upper)`` corners of the axis-aligned box containing D.
    """

    kind: str
    params: dict
    nodes: np.ndarray
    bbox: tuple
    parameters: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def dimension(self):
        return self.nodes.shape[1]

    @property
    def M(self):
        return self.nodes.shape[0]

    def curve(self, t):
        """Boundary parametrization r(t) for 2D kinds."""
        return _curve(self.kind, self.params, np.asarray(t, dtype=float))

    def contains(self, p):
        return contains(self, p)

    @cached_property
    def node_tree(self):
        """KD-tree over the nodes."""
        return cKDTree(self.nodes)

    @cached_property
    def node_spacing(self):
        """Distance from each node to its nearest neighbour."""
        dist, _ = self.node_tree.query(self.nodes, k=2)
        return dist[:, 1]

    def resolved(self, p, clearance=1.0):
        """True where ``p`` is at least ``clearance`` local node spacings
        away from every node, i.e. where the node set resolves the field of a
        point source placed at ``p``."""
        dist, idx = self.node_tree.query(np.atleast_2d(np.asarray(p, dtype=float)))
        return dist >= clearance * self.node_spacing[idx]


@dataclass(frozen=True, eq=False)
class PointBatch:
    """A batch of source points ``x_j`` strictly inside the obstacle."""

    points: np.ndarray
    batch_index: int = 1

    @property
    def J(self):
        return self.points.shape[0]


def _params_for(kind, params):
    if kind not in _DEFAULT_PARAMS:
        raise ValueError(f"unknown obstacle kind {kind!r}; expected one of {KINDS}")
    merged = dict(_DEFAULT_PARAMS[kind])
    for key, value in (params or {}).items():
        if key not in merged:
            raise ValueError(f"unknown parameter {key!r} for obstacle kind {kind!r}")
        merged[key] = float(value)
    for key, value in merged.items():
        if not value > 0:
            raise ValueError(f"parameter {key!r} must be > 0")
    return merged


def _triangle_arclength(t):
    verts = TRIANGLE_VERTICES
    edges = np.roll(verts, -1, axis=0) - verts
    lengths = np.linalg.norm(edges, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    s = np.mod(t, 2 * np.pi) / (2 * np.pi) * cum[-1]
    idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, 2)
    frac = (s - cum[idx]) / lengths[idx]
    return verts[idx] + frac[..., None] * edges[idx]


def _curve(kind, params, t):
    if kind == "ellipse2d":
        return np.stack([params["a"] * np.cos(t), params["b"] * np.sin(t)], axis=-1)
    if kind == "disk2d":
        rad = params["radius"]
        return np.stack([rad * np.cos(t), rad * np.sin(t)], axis=-1)
    if kind == "kite2d":
        return np.stack([-0.65 + np.cos(t) + 0.65 * np.cos(2 * t), 1.5 * np.sin(t)], axis=-1)
    if kind == "triangle2d":
        return _triangle_arclength(t)
    raise ValueError(f"{kind!r} has no planar parametrization")


def fibonacci_sphere(M):
    """Spherical Fibonacci point set of size M on the unit sphere."""
    i = np.arange(M)
    z = 1.0 - (2.0 * i + 1.0) / M
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    golden = np.pi * (3.0 - np.sqrt(5.0))
    phi = golden * i
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)


def _cube_nodes(M, half):
    s = int(round(np.sqrt(M / 6)))
    if 6 * s * s != M:
        raise ValueError(f"cube3d needs M = 6 s^2, got M={M}")
    g = half * (-1.0 + (2.0 * np.arange(s) + 1.0) / s)
    u, v = [a.ravel() for a in np.meshgrid(g, g, indexing="ij")]
    faces = []
    for axis in range(3):
        others = [ax for ax in range(3) if ax != axis]
        for sign in (-1.0, 1.0):
            face = np.empty((s * s, 3))
            face[:, axis] = sign * half
            face[:, others[0]] = u
            face[:, others[1]] = v
            faces.append(face)
    return np.concatenate(faces)


def make_obstacle(kind, params=None, M=720):
    """Build a :class:`Surface` with M boundary nodes.

    Raises
    ------
    ValueError
        Unknown kind or parameter, or M incompatible with the node layout.
    """
    params = _params_for(kind, params)
    M = int(M)
    planar = kind.endswith("2d")
    if M < (3 if planar else 6):
        raise ValueError(f"M={M} too small for {kind}")
    t = None
    if planar:
        t = 2 * np.pi * np.arange(M) / M
        nodes = _curve(kind, params, t)
        # dense boundary sample; the padding below covers the sampling gap
        fine = _curve(kind, params, np.linspace(0, 2 * np.pi, 4097))
        lo, hi = fine.min(axis=0), fine.max(axis=0)
        pad = 1e-4 * (hi - lo)
        lo, hi = lo - pad, hi + pad
    elif kind == "sphere3d":
        rad = params["radius"]
        nodes = rad * fibonacci_sphere(M)
        lo, hi = -rad * np.ones(3), rad * np.ones(3)
    elif kind == "ellipsoid3d":
        axes = np.array([params["a"], params["b"], params["c"]])
        nodes = fibonacci_sphere(M) * axes
        lo, hi = -axes, axes
    else:
        half = params["half"]
        nodes = _cube_nodes(M, half)
        lo, hi = -half * np.ones(3), half * np.ones(3)
    span = hi - lo
    bbox = (lo - 1e-9 * span, hi + 1e-9 * span)
    return Surface(kind=kind, params=params, nodes=nodes, bbox=bbox, parameters=t)


def contains(surface, p):
    """True where ``p`` lies strictly inside the obstacle.

    ``p`` may be one point or an array of points of shape ``(n, dim)``.
    """
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    pts = np.atleast_2d(p)
    if pts.shape[1] != surface.dimension:
        raise ValueError("point dimension does not match surface")
    kind, prm = surface.kind, surface.params
    lim = 1.0 - BOUNDARY_MARGIN
    x = pts[:, 0]
    y = pts[:, 1]
    if kind == "ellipse2d":
        inside = (x / prm["a"]) ** 2 + (y / prm["b"]) ** 2 < lim
    elif kind == "disk2d":
        inside = (x * x + y * y) / prm["radius"] ** 2 < lim
    elif kind == "kite2d":
        # every horizontal line |y| < 1.5 meets the kite at sin t = y/1.5,
        # i.e. at exactly two parameters t1 and pi - t1
        s = y / 1.5
        ok = np.abs(s) < lim
        t1 = np.arcsin(np.clip(s, -1.0, 1.0))
        xa = -0.65 + np.cos(t1) + 0.65 * np.cos(2 * t1)
        xb = -0.65 - np.cos(t1) + 0.65 * np.cos(2 * t1)
        tol = BOUNDARY_MARGIN * 2.0
        inside = ok & (x > xb + tol) & (x < xa - tol)
    elif kind == "triangle2d":
        v = TRIANGLE_VERTICES
        inside = np.ones(len(pts), dtype=bool)
        for i in range(3):
            a, b = v[i], v[(i + 1) % 3]
            edge = b - a
            cross = edge[0] * (y - a[1]) - edge[1] * (x - a[0])
            inside &= cross > BOUNDARY_MARGIN * np.linalg.norm(edge)
    elif kind == "sphere3d":
        inside = np.sum(pts * pts, axis=1) / prm["radius"] ** 2 < lim
    elif kind == "ellipsoid3d":
        axes = np.array([prm["a"], prm["b"], prm["c"]])
        inside = np.sum((pts / axes) ** 2, axis=1) < lim
    elif kind == "cube3d":
        inside = np.max(np.abs(pts), axis=1) < prm["half"] * lim
    else:  # pragma: no cover - guarded by make_obstacle
        raise ValueError(kind)
    return bool(inside[0]) if single else inside


def sample_interior(surface, J, rng, batch_index=1):
    """Draw J points i.i.d. uniform in the obstacle by rejection from its box.

    ``rng`` is a :class:`numpy.random.Generator`; it is advanced in place, so
    successive calls with the same generator give fresh, reproducible batches.
    """
    J = int(J)
    if J < 1:
        raise ValueError("J must be >= 1")
    lo, hi = surface.bbox
    chunk = max(16, 2 * J)
    accepted = []
    count = 0
    rejected = 0
    while count < J:
        cand = lo + (hi - lo) * rng.random((chunk, surface.dimension))
        keep = cand[contains(surface, cand)]
        rejected += chunk - len(keep)
        if rejected > MAX_REJECTIONS:
            raise SamplingError(
                f"more than {MAX_REJECTIONS} rejections sampling {surface.kind}")
        accepted.append(keep)
        count += len(keep)
    return PointBatch(np.concatenate(accepted)[:J], batch_index)


def sample_graded(surface, J, rng, batch_index=1, radial_fraction=0.5, min_depth=1e-3,
                  clearance=0.0):
    """Draw J interior points along rays from the origin to boundary nodes.

    Each point is ``(1 - delta) * t`` for a boundary node ``t`` picked at
    random. With probability ``radial_fraction`` the depth ``delta`` is
    uniform on (0, 1), which spreads points over the whole interior and
    favours the centre; otherwise ``delta`` is log-uniform on
    ``[min_depth, 1]`` so that every distance scale to the boundary is visited
    equally often. Candidates outside D (possible for obstacles that are not
    star-shaped about the origin) are redrawn, as are candidates closer than
    ``clearance`` local node spacings to the nodes (see :meth:`Surface.resolved`).
    """
    J = int(J)
    if J < 1:
        raise ValueError("J must be >= 1")
    if not 0 < min_depth < 1:
        raise ValueError("min_depth must lie in (0, 1)")
    log_min = np.log10(min_depth)
    parts = []
    need = J
    tries = 0
    while need > 0:
        nodes = surface.nodes[rng.integers(surface.M, size=need)]
        radial = rng.random(need) < radial_fraction
        u = rng.random(need)
        delta = np.where(radial, u, 10.0 ** (log_min * u))
        cand = (1.0 - delta)[:, None] * nodes
        ok = contains(surface, cand)
        if clearance > 0:
            ok &= surface.resolved(cand, clearance)
        keep = cand[ok]
        parts.append(keep)
        need -= len(keep)
        tries += 1
        if tries > 10_000:
            raise SamplingError(f"graded sampling keeps leaving {surface.kind}")
    return PointBatch(np.concatenate(parts), batch_index)


def deterministic_sources(surface, scale, J):
    """Fixed source placement ``x_j = scale * r(2 pi (j - 1) / J)``.

    Only defined for planar obstacles.
    """
    if surface.dimension != 2:
        raise ValueError("deterministic placement is defined for 2D obstacles only")
    if not 0 < scale < 1:
        raise ValueError("scale must lie in (0, 1)")
    t = 2 * np.pi * np.arange(int(J)) / int(J)
    pts = scale * surface.curve(t)
    if not np.all(contains(surface, pts)):
        raise ValueError("scaled boundary points are not all inside the obstacle")
    return PointBatch(pts, 1)


def write_nodes_csv(surface, path):
    """Write boundary nodes, one comma-separated point per line."""
    np.savetxt(path, surface.nodes, delimiter=",", fmt="%.17g")

"""Random Multi-point MRC solver.

Each iteration draws a fresh batch of J interior source points, fits the
current boundary trace ``g`` (initially the incident wave) by the outgoing
basis attached to those points, and replaces ``g`` with the fitted remainder
``g + A c``. Coefficients of every batch are accumulated in an
:class:`Expansion`; their sum is the approximate scattered field.

The deterministic mode performs a single fit with the fixed placement of
:func:`geometry.deterministic_sources`.
"""

import csv
import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import basis, geometry
from .lsq import normalized_norm, svd_min

__all__ = [
    "ScatterProblem",
    "SolverConfig",
    "Batch",
    "Expansion",
    "SolveReport",
    "SolverError",
    "boundary_trace",
    "discrepancy",
    "fit_batch",
    "solve",
    "direction_from_angles",
    "write_coefficients",
    "read_coefficients",
]

logger = logging.getLogger(__name__)

COLUMN_ORDER_TAG = "source-major/l-asc/m-asc"


class SolverError(RuntimeError):
    """A solve failed (sampling or linear algebra) at a given iteration."""


def direction_from_angles(theta, phi):
    """Unit vector for azimuth ``theta`` and polar angle ``phi``."""
    return np.array([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])


@dataclass(frozen=True)
class ScatterProblem:
    """Plane wave ``exp(i k alpha.x)`` hitting a soft obstacle."""

    k: float
    alpha: tuple

    def __post_init__(self):
        alpha = tuple(float(a) for a in np.ravel(self.alpha))
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "k", float(self.k))
        if len(alpha) not in (2, 3):
            raise ValueError("alpha must have 2 or 3 components")
        if not self.k > 0:
            raise ValueError("k must be > 0")
        if abs(np.linalg.norm(alpha) - 1.0) > 1e-12:
            raise ValueError("alpha must be a unit vector")

    @classmethod
    def from_angles(cls, k, theta, phi):
        return cls(k, tuple(direction_from_angles(theta, phi)))

    @property
    def dimension(self):
        return len(self.alpha)

    def incident(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(1j * self.k * (x @ np.asarray(self.alpha)))


@dataclass(frozen=True)
class SolverConfig:
    """Algorithm parameters.

    ``mode`` is ``"random"`` or ``"deterministic"``; the latter needs
    ``scale`` and runs a single iteration. ``sampler`` selects the random
    placement: ``"graded"`` (:func:`geometry.sample_graded`, default) or
    ``"uniform"`` (:func:`geometry.sample_interior`). The graded sampler draws
    its first batch purely radially (well inside D) and later batches with
    ``radial_fraction`` of the points radial, the rest close to the
    boundary. ``clearance`` > 0 additionally keeps every graded source at
    least that many local node spacings away from the nodes; otherwise a
    source can sit so close to S that its field varies between nodes and a
    small node residual no longer means a small boundary error. ``stagnation_window`` (off by
    default) stops a run whose residual improved by less than
    ``stagnation_rtol`` (relative) over that many iterations.
    """

    epsilon: float = 1e-4
    L: int = 5
    J: int = 1
    N_max: int = 20000
    w_min: float = 1e-12
    seed: int = 0
    mode: str = "random"
    sampler: str = "graded"
    radial_fraction: float = 0.5
    clearance: float = 0.0
    scale: Optional[float] = None
    relative_cutoff: bool = False
    stagnation_window: Optional[int] = None
    stagnation_rtol: float = 1e-8

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if self.L < 0 or self.J < 1 or self.N_max < 1:
            raise ValueError("need L >= 0, J >= 1, N_max >= 1")
        if not self.w_min > 0:
            raise ValueError("w_min must be > 0")
        if self.mode not in ("random", "deterministic"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.sampler not in ("graded", "uniform"):
            raise ValueError(f"unknown sampler {self.sampler!r}")
        if not 0 <= self.radial_fraction <= 1:
            raise ValueError("radial_fraction must lie in [0, 1]")
        if self.clearance < 0:
            raise ValueError("clearance must be >= 0")
        if self.mode == "deterministic" and self.scale is None:
            raise ValueError("deterministic mode needs a scale")


@dataclass(frozen=True, eq=False)
class Batch:
    """Sources and fitted coefficients of one iteration."""

    iteration: int
    points: np.ndarray
    coeffs: np.ndarray


@dataclass(eq=False)
class Expansion:
    """Accumulated outgoing expansion approximating the scattered field."""

    problem: ScatterProblem
    L: int
    batches: List[Batch] = field(default_factory=list)

    @property
    def dimension(self):
        return self.problem.dimension

    @property
    def n_orders(self):
        return basis.n_orders(self.dimension, self.L)

    @property
    def n_terms(self):
        return sum(b.coeffs.size for b in self.batches)

    def flat(self):
        """All sources ``(S, dim)`` and coefficients ``(S * n_orders,)``."""
        if not self.batches:
            return np.zeros((0, self.dimension)), np.zeros(0, dtype=complex)
        pts = np.concatenate([b.points for b in self.batches])
        coeffs = np.concatenate([b.coeffs for b in self.batches])
        return pts, coeffs

    def terms(self):
        """Yield ``(iteration, j, l, m, point, coefficient)`` per term."""
        orders = basis.order_list(self.dimension, self.L)
        no = len(orders)
        for b in self.batches:
            for n, c in enumerate(b.coeffs):
                j, o = divmod(n, no)
                l, m = orders[o]
                yield b.iteration, j, l, m, b.points[j], c

    def concatenate(self, other):
        if other.problem != self.problem or other.L != self.L:
            raise ValueError("expansions belong to different problems")
        return Expansion(self.problem, self.L, self.batches + other.batches)


@dataclass(frozen=True)
class SolveReport:
    residual_history: tuple
    final_residual: float
    iterations: int
    converged: bool
    wall_time: float
    epsilon: float


def boundary_trace(problem, surface):
    """Incident field at the boundary nodes."""
    if surface.dimension != problem.dimension:
        raise ValueError("surface and problem dimensions differ")
    return problem.incident(surface.nodes)


def discrepancy(g, A, c):
    """``normalized_norm(g + A c)``."""
    g = np.asarray(g)
    A = np.asarray(A)
    c = np.asarray(c)
    if A.shape != (g.size, c.size):
        raise ValueError(f"dimension mismatch: g {g.shape}, A {A.shape}, c {c.shape}")
    return normalized_norm(g + A @ c)


def fit_batch(A, g, config):
    """Minimize ``||g + A c||`` over the columns of one batch.

    Columns are scaled to unit normalized norm before the SVD, so the cutoff
    compares directions rather than raw magnitudes (near-boundary sources
    make single columns many orders of magnitude larger than the rest).
    Returns the :class:`LsqSolution` of the scaled system and the
    coefficients for the unscaled columns.
    """
    scale = np.sqrt(np.mean(np.abs(A) ** 2, axis=0))
    scale[scale == 0] = 1.0
    sol = svd_min(A / scale, g, config.w_min, relative=config.relative_cutoff)
    return sol, sol.coeffs / scale


def solve(problem, surface, config, progress_every=0):
    """Run the MRC iteration.

    Returns
    -------
    (Expansion, SolveReport)

    Raises
    ------
    SolverError
        Interior sampling or the SVD failed; the message names the iteration.
    """
    if surface.dimension != problem.dimension:
        raise ValueError("surface and problem dimensions differ")
    start = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    g = boundary_trace(problem, surface)
    expansion = Expansion(problem, config.L)
    history = []
    n_max = 1 if config.mode == "deterministic" else config.N_max
    converged = False
    for n in range(1, n_max + 1):
        try:
            if config.mode == "deterministic":
                batch = geometry.deterministic_sources(surface, config.scale, config.J)
            elif config.sampler == "graded":
                frac = 1.0 if n == 1 else config.radial_fraction
                batch = geometry.sample_graded(surface, config.J, rng, batch_index=n,
                                               radial_fraction=frac,
                                               clearance=config.clearance)
            else:
                batch = geometry.sample_interior(surface, config.J, rng, batch_index=n)
            A = basis.assemble(surface, batch, config.L, problem.k)
            sol, coeffs = fit_batch(A, g, config)
        except (geometry.SamplingError, np.linalg.LinAlgError) as exc:
            raise SolverError(f"iteration {n}: {exc}") from exc
        g = g + A @ coeffs
        expansion.batches.append(Batch(n, batch.points, coeffs))
        history.append(sol.residual)
        if progress_every and n % progress_every == 0:
            logger.info("iteration %d residual %.3e", n, sol.residual)
        if sol.residual <= config.epsilon:
            converged = True
            break
        w = config.stagnation_window
        if w and n > w and history[-w - 1] - sol.residual < config.stagnation_rtol * history[-w - 1]:
            logger.info("stagnation stop at iteration %d", n)
            break
    report = SolveReport(
        residual_history=tuple(history),
        final_residual=history[-1],
        iterations=len(history),
        converged=converged,
        wall_time=time.perf_counter() - start,
        epsilon=config.epsilon,
    )
    return expansion, report


def write_coefficients(expansion, path, iterations=None):
    """Write an expansion as CSV.

    Header lines start with ``#`` and carry ``key=value`` pairs; data rows are
    ``iteration, j, l[, m], x_1..x_dim, re, im``.
    """
    dim = expansion.dimension
    p = expansion.problem
    J = expansion.batches[0].points.shape[0] if expansion.batches else 0
    header = {
        "dimension": dim,
        "k": repr(p.k),
        "alpha": " ".join(repr(a) for a in p.alpha),
        "L": expansion.L,
        "J": J,
        "iterations": iterations if iterations is not None else len(expansion.batches),
        "column_order": COLUMN_ORDER_TAG,
    }
    coords = ["x", "y", "z"][:dim]
    cols = ["iteration", "j", "l"] + (["m"] if dim == 3 else []) + coords + ["re", "im"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for key, value in header.items():
            fh.write(f"# {key}={value}\n")
        writer = csv.writer(fh)
        writer.writerow(cols)
        for it, j, l, m, pt, c in expansion.terms():
            row = [it, j, l] + ([m] if dim == 3 else [])
            row += [repr(float(v)) for v in pt] + [repr(float(c.real)), repr(float(c.imag))]
            writer.writerow(row)


def read_coefficients(path):
    """Inverse of :func:`write_coefficients`."""
    header = {}
    rows = []
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            header[key] = value
        elif line.strip():
            body.append(line)
    if header.get("column_order") != COLUMN_ORDER_TAG:
        raise ValueError("unsupported column ordering in coefficient file")
    dim = int(header["dimension"])
    problem = ScatterProblem(float(header["k"]), tuple(float(a) for a in header["alpha"].split()))
    L = int(header["L"])
    reader = csv.reader(body[1:])
    rows = [r for r in reader]
    no = basis.n_orders(dim, L)
    expansion = Expansion(problem, L)
    off = 4 if dim == 3 else 3
    current, pts, coeffs = None, [], []

    def flush():
        if current is not None:
            expansion.batches.append(Batch(current, np.array(pts[::no]), np.array(coeffs)))

    for r in rows:
        it = int(r[0])
        if it != current:
            flush()
            current, pts, coeffs = it, [], []
        pts.append([float(v) for v in r[off:off + dim]])
        coeffs.append(complex(float(r[off + dim]), float(r[off + dim + 1])))
    flush()
    return expansion

"""Soft unit sphere: compare the solver with the separation-of-variables series.

Run: python3 demos/02_sphere_against_series.py
"""

import numpy as np

from mrcscatter import basis, field, geometry, mrc, oracle
from mrcscatter.lsq import normalized_norm

sphere = geometry.make_obstacle("sphere3d", {}, 450)
problem = mrc.ScatterProblem.from_angles(1.0, 0.0, np.pi / 2)   # along +x

expansion, report = mrc.solve(problem, sphere, mrc.SolverConfig(epsilon=5e-4, L=0, J=80, N_max=50, seed=1))
print(f"k=1: residual {report.final_residual:.2e} after {report.iterations} iteration(s), "
      f"{expansion.n_terms} monopoles")

# exterior field on |x| = 2
x = 2 * geometry.fibonacci_sphere(400)
exact = oracle.sphere_scattered_exact(1.0, 1.0, problem.alpha, x)
err = normalized_norm(field.scattered_field(expansion, x) - exact) / normalized_norm(exact)
print(f"relative error on |x|=2: {err:.2e}")

# scattering amplitude
dirs = geometry.fibonacci_sphere(50)
amp = field.farfield(expansion, dirs).amplitudes
ref = oracle.sphere_farfield_exact(1.0, 1.0, problem.alpha, dirs).amplitudes
print(f"far field max error: {np.max(np.abs(amp - ref)):.2e} (max |A| = {np.max(np.abs(ref)):.3f})")

# One source at the centre with L=5 recovers the spherical-harmonic moments of A.
origin = geometry.PointBatch(np.zeros((1, 3)))
A = basis.assemble(sphere, origin, 5, 1.0)
_, c = mrc.fit_batch(A, mrc.boundary_trace(problem, sphere), mrc.SolverConfig(L=5))
centred = mrc.Expansion(problem, 5, [mrc.Batch(1, origin.points, c)])
q_dirs, q_w, q_deg = field.sphere_quadrature(12)
moments = field.farfield_coefficients(field.farfield(centred, q_dirs, q_w, q_deg), 3)
exact_moments = oracle.sphere_farfield_coefficients(1.0, 1.0, problem.alpha, 3)
for l in range(4):
    sl = slice(l * l, (l + 1) ** 2)
    rel = np.linalg.norm(moments[sl] - exact_moments[sl]) / np.linalg.norm(exact_moments[sl])
    print(f"  l={l}: moment error {rel:.1e}")

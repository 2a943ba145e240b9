import numpy as np
import pytest

from mrcscatter import field, geometry, oracle

ALPHA3 = np.array([0.0, 0.6, 0.8])


def test_sphere_boundary_self_check():
    pts = geometry.fibonacci_sphere(200) * (1 + 1e-14)
    v = oracle.sphere_scattered_exact(1.0, 1.0, ALPHA3, pts, 30)
    u0 = np.exp(1j * pts @ ALPHA3)
    assert np.max(np.abs(u0 + v)) < 1e-10


def test_sphere_boundary_self_check_ka5():
    pts = geometry.fibonacci_sphere(200) * 2.0 * (1 + 1e-14)
    v = oracle.sphere_scattered_exact(2.0, 2.5, ALPHA3, pts, 40)
    assert np.max(np.abs(np.exp(2.5j * pts @ ALPHA3) + v)) < 1e-10


def test_sphere_truncation_stable():
    x = 2 * ALPHA3
    assert abs(oracle.sphere_scattered_exact(1, 1.0, ALPHA3, x, 25)
               - oracle.sphere_scattered_exact(1, 1.0, ALPHA3, x, 35)) < 1e-12


def test_boundary_error_decreases_with_lmax():
    pts = geometry.fibonacci_sphere(100) * (1 + 1e-14)
    u0 = np.exp(1j * pts @ ALPHA3)
    errs = [np.max(np.abs(u0 + oracle.sphere_scattered_exact(1, 1.0, ALPHA3, pts, L)))
            for L in (2, 4, 6, 8, 10)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    ring = np.column_stack([np.cos(t), np.sin(t)]) * (1 + 1e-14)
    errs2 = [np.max(np.abs(np.exp(1j * ring[:, 0]) + oracle.disk_scattered_exact_2d(1, 1.0, [1, 0], ring, L)))
             for L in (2, 4, 6, 8)]
    assert all(b < a for a, b in zip(errs2, errs2[1:]))


def test_small_obstacle_limit():
    x = np.array([0.0, 0.0, 3.0])
    assert abs(oracle.sphere_scattered_exact(1e-6, 1.0, ALPHA3, x)) < 1e-5
    ff = oracle.sphere_farfield_exact(1e-6, 1.0, ALPHA3, [[1.0, 0, 0]])
    assert abs(ff.amplitudes[0]) < 1e-5
    assert abs(oracle.disk_scattered_exact_2d(1e-8, 1.0, [1, 0], [0.0, 3.0])) < 0.2


def test_domain_errors():
    with pytest.raises(ValueError):
        oracle.sphere_scattered_exact(1, 1.0, ALPHA3, [0.5, 0, 0])
    with pytest.raises(ValueError):
        oracle.disk_scattered_exact_2d(1, 1.0, [1, 0], [1.0, 0.0])


def test_disk_boundary_self_check():
    t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    ring = np.column_stack([np.cos(t), np.sin(t)]) * (1 + 1e-14)
    alpha = np.array([0.6, 0.8])
    v = oracle.disk_scattered_exact_2d(1.0, 1.0, alpha, ring, 30)
    assert np.max(np.abs(np.exp(1j * ring @ alpha) + v)) < 1e-10


def test_disk_symmetry():
    alpha = np.array([1.0, 1.0]) / np.sqrt(2)
    x = np.array([2.0, -0.5])
    refl = 2 * (x @ alpha) * alpha - x
    assert oracle.disk_scattered_exact_2d(1, 5.0, alpha, x) == pytest.approx(
        oracle.disk_scattered_exact_2d(1, 5.0, alpha, refl), abs=1e-13)


def test_disk_truncation_stable():
    x = np.array([0.0, 2.0])
    a = oracle.disk_scattered_exact_2d(1, 1.0, [1, 0], x, 25)
    b = oracle.disk_scattered_exact_2d(1, 1.0, [1, 0], x, 35)
    assert abs(a - b) < 1e-12


def test_truncation_report():
    tr = oracle.sphere_truncation(1.0, 5.0, 30)
    assert tr.Lmax == 30 and tr.tail_bound < 1e-12
    assert oracle.disk_truncation(1.0, 5.0, 30).tail_bound < 1e-12


def test_near_far_consistency():
    dirs = geometry.fibonacci_sphere(20)
    R = 1e4
    v = oracle.sphere_scattered_exact(1, 1.0, ALPHA3, R * dirs)
    ff = oracle.sphere_farfield_exact(1, 1.0, ALPHA3, dirs)
    assert np.max(np.abs(v * R * np.exp(-1j * R) - ff.amplitudes)) < 1e-3


def test_forward_backward_asymmetry():
    ff = oracle.sphere_farfield_exact(1, 5.0, ALPHA3, [ALPHA3, -ALPHA3])
    assert abs(abs(ff.amplitudes[0]) - abs(ff.amplitudes[1])) > 1e-2


def test_optical_theorem():
    dirs, w, _ = field.sphere_quadrature(40)
    k = 1.0
    ff = oracle.sphere_farfield_exact(1, k, ALPHA3, dirs)
    fwd = oracle.sphere_farfield_exact(1, k, ALPHA3, [ALPHA3]).amplitudes[0]
    assert fwd.imag == pytest.approx(k / (4 * np.pi) * np.sum(w * np.abs(ff.amplitudes) ** 2), rel=1e-6)


def test_coefficients_match_quadrature_of_farfield():
    dirs, w, deg = field.sphere_quadrature(30)
    ff = oracle.sphere_farfield_exact(1, 1.0, ALPHA3, dirs)
    ff = field.FarField(ff.directions, ff.amplitudes, w, deg)
    num = field.farfield_coefficients(ff, 6)
    np.testing.assert_allclose(num, oracle.sphere_farfield_coefficients(1, 1.0, ALPHA3, 6), atol=1e-12)

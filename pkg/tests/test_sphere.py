import cmath
import math

import numpy as np
import pytest

from berezin import sphere
from berezin.sphere import Chart, ModelPoint


def test_basis_norm_examples():
    assert sphere.basis_norm(0, 0) == pytest.approx(math.pi, rel=1e-13)
    assert sphere.basis_norm(2, 1) == pytest.approx(math.pi / 6, rel=1e-13)
    assert sphere.basis_norm(5, 2) == pytest.approx(sphere.basis_norm(5, 3), rel=1e-14)


def test_basis_norm_closed_form_all_j():
    for k in (1, 7, 40, 170, 400):
        table = sphere.basis_table(k)
        for j in (0, k // 3, k):
            exact = math.pi * math.exp(
                math.lgamma(j + 1) + math.lgamma(k - j + 1) - math.lgamma(k + 2)
            )
            assert table[j] == pytest.approx(exact, rel=1e-13)
            assert sphere.basis_norm(k, j) == pytest.approx(exact, rel=1e-13)


def test_basis_norm_index_error():
    with pytest.raises(IndexError):
        sphere.basis_norm(3, 4)
    with pytest.raises(IndexError):
        sphere.log_basis_norm(3, -1)


def test_section_value_examples():
    for k in (0, 1, 5, 12):
        v = sphere.section_value(k, 0, ModelPoint.south(0.0))
        assert v == pytest.approx(math.sqrt((k + 1) / math.pi), rel=1e-13)
    for j in range(1, 6):
        assert sphere.section_value(5, j, ModelPoint.south(0.0)) == 0.0
    v = sphere.section_value(2, 1, ModelPoint.south(1.0))
    assert v == pytest.approx(0.5 * math.sqrt(6 / math.pi), rel=1e-13)


def test_section_value_index_error():
    with pytest.raises(IndexError):
        sphere.section_value(4, 5, ModelPoint.south(0.3))


def test_section_modulus_chart_independent():
    # |z| = 1 points have a canonical representative in either chart
    z = cmath.exp(0.7j)
    south = ModelPoint(Chart.SOUTH, z)
    north = ModelPoint(Chart.NORTH, 1.0 / z)
    for k in (1, 4, 9):
        for j in range(k + 1):
            a = abs(sphere.section_value(k, j, south))
            b = abs(sphere.section_value(k, j, north))
            assert a == pytest.approx(b, abs=1e-13)


def test_bergman_examples():
    assert sphere.bergman_diagonal(5, ModelPoint.south(0.3 - 0.1j)) == pytest.approx(
        6 / math.pi, abs=1e-13
    )
    assert sphere.bergman_diagonal(0, ModelPoint.south(0.9j)) == pytest.approx(
        1 / math.pi, abs=1e-14
    )
    z = 0.6 + 0.4j
    a = sphere.bergman_diagonal(7, ModelPoint(Chart.SOUTH, z))
    b = sphere.bergman_diagonal(7, ModelPoint(Chart.NORTH, 1.0 / z))
    assert a == pytest.approx(b, abs=1e-13)


def test_bergman_identity_random_points():
    rng = np.random.default_rng(11)
    pts = sphere.random_points(100, rng)
    for k in list(range(0, 17)) + [31, 64, 100, 256]:
        for m in pts:
            assert abs(sphere.bergman_diagonal(k, m) - (k + 1) / math.pi) <= 1e-12


def test_parseval_at_a_point():
    rng = np.random.default_rng(3)
    for m in sphere.random_points(20, rng):
        for k in (0, 3, 17, 64):
            v = sphere.section_values(k, m)
            total = float(np.vdot(v, v).real)
            assert abs(total - sphere.bergman_diagonal(k, m)) <= 1e-13


def test_sphere_coords_examples():
    np.testing.assert_allclose(ModelPoint.south(0.0).u, [0, 0, -1], atol=1e-15)
    np.testing.assert_allclose(ModelPoint.south(1.0).u, [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(ModelPoint.north(0.0).u, [0, 0, 1], atol=1e-15)


def test_sphere_coords_unit_norm_and_chart_duality():
    rng = np.random.default_rng(5)
    for m in sphere.random_points(50, rng):
        u = m.u
        assert abs(float(u @ u) - 1.0) <= 1e-14
    z = 0.8 * cmath.exp(1.1j)
    south = ModelPoint(Chart.SOUTH, z)
    north = ModelPoint(Chart.NORTH, 1.0 / z)
    np.testing.assert_allclose(south.u, north.u, atol=1e-14)


def test_canonical_chart_storage():
    m = ModelPoint.south(2.0)
    assert m.chart is Chart.NORTH
    assert abs(m.w) <= 1.0
    np.testing.assert_allclose(m.u, [0.8, 0, 0.6], atol=1e-15)


def test_antipode():
    m = ModelPoint.south(0.3 + 0.2j)
    np.testing.assert_allclose(sphere.antipode(m).u, -m.u, atol=1e-14)


def test_fibonacci_sphere_on_unit_sphere():
    pts = sphere.fibonacci_sphere(500)
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)

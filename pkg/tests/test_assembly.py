import math

import numpy as np
import pytest

from berezin import assembly, observables as obs, spectra
from berezin.assembly import QuadratureScheme
from berezin.errors import UnsupportedClassError

MIXED = obs.linear_u(0.5, 0.0, -0.2, 0.3)


def test_u3_closed_form_diagonal():
    T = assembly.assemble_closed(2, obs.u3())
    np.testing.assert_allclose(np.diag(T.mat).real, [-0.5, 0.0, 0.5], atol=1e-15)
    assert np.count_nonzero(T.mat - np.diag(np.diag(T.mat))) == 0


def test_u1_closed_form_band():
    T = assembly.assemble_closed(2, obs.u1())
    off = math.sqrt(2) / 4
    expected = np.array([[0, off, 0], [off, 0, off], [0, off, 0]])
    np.testing.assert_allclose(T.mat.real, expected, atol=1e-15)
    np.testing.assert_allclose(T.mat.imag, 0.0, atol=1e-15)


def test_constant_closed_form_is_identity_multiple():
    for k in (0, 3, 9):
        T = assembly.assemble_closed(k, obs.constant(2.5))
        np.testing.assert_allclose(T.mat, 2.5 * np.eye(k + 1), atol=1e-14)


def test_u3_squared_closed_form():
    T = assembly.assemble_closed(2, obs.poly_u3([0, 0, 1]))
    np.testing.assert_allclose(np.diag(T.mat).real, [0.4, 0.2, 0.4], atol=1e-14)
    # quantization is not multiplicative at finite k
    T3 = assembly.assemble_closed(2, obs.u3())
    sq = T3.mat @ T3.mat
    assert abs(sq[1, 1]) < 1e-15
    assert abs(T.mat[1, 1] - 0.2) < 1e-14


def test_closed_form_unsupported_class():
    with pytest.raises(UnsupportedClassError):
        assembly.assemble_closed(4, obs.general(lambda u: u[0] ** 2))


@pytest.mark.parametrize("f", [obs.u1(), obs.u2(), obs.u3(),
                               obs.poly_u3([0, 0, 1]), MIXED])
@pytest.mark.parametrize("k", [1, 2, 8, 23, 64])
def test_quadrature_matches_closed_form(f, k):
    Tc = assembly.assemble_closed(k, f)
    Tq = assembly.assemble_quadrature(k, f)
    assert np.max(np.abs(Tc.mat - Tq.mat)) <= 1e-10


def test_quadrature_identity():
    T = assembly.assemble_quadrature(8, obs.constant(1.0))
    np.testing.assert_allclose(T.mat, np.eye(9), atol=1e-12)


def test_quadrature_general_callable_agrees_on_linear():
    f = obs.general(lambda u: 0.3 + 0.5 * u[0] - 0.2 * u[2], bandwidth=1)
    Tg = assembly.assemble_quadrature(8, f)
    Tc = assembly.assemble_closed(8, MIXED)
    assert np.max(np.abs(Tg.mat - Tc.mat)) <= 1e-10


def test_assembly_linearity():
    k = 12
    a = assembly.assemble_closed(k, obs.u1()).mat
    b = assembly.assemble_closed(k, obs.u3()).mat
    combo = assembly.assemble_closed(k, obs.linear_u(0.5, 0.0, -0.2, 0.3)).mat
    np.testing.assert_allclose(combo, 0.5 * a - 0.2 * b + 0.3 * np.eye(k + 1),
                               atol=1e-11)


def test_hermiticity_invariant():
    for f in (obs.u2(), MIXED, obs.general(lambda u: u[0] * u[1], bandwidth=2)):
        T = assembly.assemble(16, f) if assembly.has_closed_form(f) else \
            assembly.assemble_quadrature(16, f)
        scale = 1.0 + float(np.max(np.abs(T.mat)))
        assert np.max(np.abs(T.mat - T.mat.conj().T)) <= 1e-13 * scale


@pytest.mark.parametrize("k", [2, 17, 64, 128])
def test_spectrum_containment(k):
    for f in (obs.u3(), MIXED, obs.poly_u3([0.1, -0.4, 0.8])):
        T = assembly.assemble(k, f)
        lo, hi = obs.symbol_range(f)
        vals = np.linalg.eigvalsh(T.mat)
        assert vals.min() >= lo - 1e-9
        assert vals.max() <= hi + 1e-9


def test_shift_operator():
    T = assembly.assemble_closed(2, obs.u3())
    shifted = assembly.shift_operator(T, 1.0)
    np.testing.assert_allclose(np.diag(shifted.mat).real, [0.5, 1.0, 1.5], atol=1e-15)
    same = assembly.shift_operator(T, 0.0)
    np.testing.assert_allclose(same.mat, T.mat, atol=0)
    assert shifted.provenance == T.provenance
    vals = np.linalg.eigvalsh(shifted.mat)
    np.testing.assert_allclose(vals, np.linalg.eigvalsh(T.mat) + 1.0, atol=1e-14)


def test_quadrature_scheme_moment_exactness():
    for k in (4, 32, 64):
        scheme = QuadratureScheme.default(k)
        for j in range(0, k + 1, max(1, k // 7)):
            assert scheme.moment_error(k, j) <= 1e-12


def test_quadrature_warning_recorded_for_weak_scheme():
    x, w = np.polynomial.legendre.leggauss(6)
    weak = QuadratureScheme(0.5 * (x + 1), 0.5 * w, 5, 2 * 6 - 1 - 16)
    T = assembly.assemble_quadrature(16, obs.u3(), weak)
    assert T.provenance.warnings


def test_gram_matrix_identity():
    for k in (4, 16, 33, 64):
        G = assembly.gram_matrix(k)
        assert np.max(np.abs(G - np.eye(k + 1))) <= 1e-10

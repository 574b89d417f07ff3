import math

import numpy as np
import pytest

from berezin import assembly, observables as obs, spectra
from berezin.assembly import HermitianMatrix, Provenance
from berezin.errors import UnsupportedTransformError
from berezin.sphere import ModelPoint


def decompose(k, f):
    return spectra.eigh(assembly.assemble(k, f))


def test_eigh_examples():
    S = decompose(2, obs.u3())
    np.testing.assert_allclose(S.eigenvalues, [-0.5, 0.0, 0.5], atol=1e-14)
    S = decompose(2, obs.u1())
    np.testing.assert_allclose(S.eigenvalues, [-0.5, 0.0, 0.5], atol=1e-14)
    S = decompose(4, obs.constant(3.0))
    np.testing.assert_allclose(S.eigenvalues, 3.0, atol=1e-14)


def test_eigh_orthonormal_vectors():
    S = decompose(17, obs.linear_u(0.5, 0.1, -0.2, 0.0))
    G = S.vectors.conj().T @ S.vectors
    assert np.max(np.abs(G - np.eye(S.n))) <= 1e-12


def test_u1_and_u3_spectra_coincide():
    for k in (1, 5, 16, 50):
        a = decompose(k, obs.u1()).eigenvalues
        b = decompose(k, obs.u3()).eigenvalues
        np.testing.assert_allclose(a, b, atol=1e-12)


def test_local_measure_examples():
    # at z = 0 only the j = 0 section survives; for u3 its eigenvalue is -k/(k+2)
    k = 2
    S = decompose(k, obs.u3())
    mu = spectra.local_measure(S, ModelPoint.south(0.0))
    i = int(np.argmax(mu.weights))
    assert mu.atoms[i] == pytest.approx(-0.5, abs=1e-14)
    assert mu.weights[i] == pytest.approx(3 / math.pi, abs=1e-13)
    assert mu.weights.sum() == pytest.approx(3 / math.pi, abs=1e-13)


def test_local_measure_mass_is_bergman_density():
    rng = np.random.default_rng(7)
    from berezin.sphere import random_points

    for m in random_points(5, rng):
        for k in (3, 11, 40):
            S = decompose(k, obs.linear_u(0.3, -0.1, 0.6, 0.0))
            mu = spectra.local_measure(S, m)
            assert mu.total_mass == pytest.approx((k + 1) / math.pi, abs=1e-12)


def test_global_measure_mass():
    for k in (0, 6, 30):
        S = decompose(k, obs.u3())
        g = spectra.global_measure(S)
        assert g.total_mass == k + 1
        assert g.kind == "global"


def test_pair_examples():
    k = 2
    S = decompose(k, obs.u3())
    chi = obs.gaussian(0.0, 1.0)
    mu = spectra.local_measure(S, ModelPoint.south(0.0))
    assert spectra.pair(mu, chi) == pytest.approx(
        (3 / math.pi) * math.exp(-1 / 8), abs=1e-13
    )
    g = spectra.global_measure(S)
    expected = math.exp(-1 / 8) + 1.0 + math.exp(-1 / 8)
    assert spectra.pair(g, chi) == pytest.approx(expected, abs=1e-13)


def test_pair_empty_measure():
    mu = spectra.PointMeasure(np.array([]), np.array([]), "global", 0)
    assert spectra.pair(mu, obs.gaussian(0.0, 1.0)) == 0.0


@pytest.mark.parametrize("c", [-1.0, 2.0, 0.37])
def test_shift_covariance_exact(c):
    S = decompose(12, obs.linear_u(0.4, 0.0, -0.7, 0.1))
    chi = obs.gaussian(0.2, 0.9)
    a, b = spectra.shift_covariance_pair(S, ModelPoint.south(0.3 + 0.1j), c, chi)
    assert a == pytest.approx(b, abs=1e-12)
    a, b = spectra.shift_covariance_pair(S, None, c, chi)
    assert a == pytest.approx(b, abs=1e-12)


def test_scale_to_prime():
    S = decompose(8, obs.u3())
    P = spectra.scale_to_prime(S)
    np.testing.assert_allclose(P.eigenvalues, 8 * S.eigenvalues, atol=0)
    assert P.vectors is S.vectors
    # pairing the scaled spectrum with chi equals pairing the original
    # with the compressed test function chi(k .)
    chi = obs.gaussian(0.0, 1.0)
    m = ModelPoint.south(0.4)
    lhs = spectra.pair(spectra.local_measure(P, m), chi)
    rhs = spectra.pair(spectra.local_measure(S, m), chi.scaled(1.0 / 8.0))
    assert lhs == pytest.approx(rhs, abs=1e-13)


def test_pair_via_fourier_single_atom():
    # one atom of weight 1 at lambda: the dual route must return chi(lambda)
    mat = np.array([[0.37]], dtype=complex)
    T = HermitianMatrix(0, mat, Provenance("closed-form"))
    S = spectra.eigh(T)
    m = ModelPoint.south(0.0)
    chi = obs.gaussian(0.1, 0.8)
    direct = spectra.pair(spectra.local_measure(S, m), chi)
    dual = spectra.pair_via_fourier(S, m, chi)
    assert dual == pytest.approx(direct, abs=1e-8)


@pytest.mark.parametrize("sigma", [1.0, 2.0])
def test_pair_via_fourier_matches_direct(sigma):
    S = decompose(8, obs.u3())
    chi = obs.gaussian_hermite(0.3, sigma, (1.0, -0.5, 0.2))
    for m in (ModelPoint.south(0.0), ModelPoint.south(0.6 - 0.6j)):
        direct = spectra.pair(spectra.local_measure(S, m), chi)
        dual = spectra.pair_via_fourier(S, m, chi)
        assert dual == pytest.approx(direct, abs=1e-8)


def test_pair_via_fourier_requires_transform():
    S = decompose(4, obs.u3())
    with pytest.raises(UnsupportedTransformError):
        spectra.pair_via_fourier(S, ModelPoint.south(0.0), obs.bump(-1.0, 1.0))


def test_pairing_basis_independent_under_degenerate_rotation():
    # u3 at k = 4 has a simple spectrum, so build a degenerate operator
    # instead: lambda^2-type symbol gives pairs of equal eigenvalues
    k = 4
    T = assembly.assemble(k, obs.poly_u3([0, 0, 1]))
    S = spectra.eigh(T)
    m = ModelPoint.south(0.5)
    chi = obs.gaussian(0.0, 0.7)
    base = spectra.pair(spectra.local_measure(S, m), chi)
    rng = np.random.default_rng(2)
    # rotate eigenvectors inside each degenerate block
    vals = S.eigenvalues
    vecs = S.vectors.copy()
    start = 0
    while start < len(vals):
        stop = start
        while stop + 1 < len(vals) and abs(vals[stop + 1] - vals[start]) < 1e-12:
            stop += 1
        blk = slice(start, stop + 1)
        d = stop - start + 1
        if d > 1:
            A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            Q, _ = np.linalg.qr(A)
            vecs[:, blk] = vecs[:, blk] @ Q
        start = stop + 1
    rotated = spectra.SpectralData(k, vals.copy(), vecs)
    other = spectra.pair(spectra.local_measure(rotated, m), chi)
    assert other == pytest.approx(base, abs=1e-10)


def test_local_global_compatibility():
    # integrating the local measure over the sphere recovers the global one
    k = 24
    f = obs.u3()
    S = decompose(k, f)
    chi = obs.gaussian(0.1, 0.8)
    nodes, weights = np.polynomial.legendre.leggauss(80)
    u = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    total = 0.0
    # u3 eigenfunctions are monomials, so the angular integral is trivial
    # and the local mass depends only on |z|^2 = t; area element pi du
    for ui, wi in zip(u, w):
        t = ui / (1.0 - ui)
        m = ModelPoint.south(complex(math.sqrt(t)))
        total += wi * math.pi * spectra.pair(spectra.local_measure(S, m), chi)
    glob = spectra.pair(spectra.global_measure(S), chi)
    assert total == pytest.approx(glob, abs=1e-6)

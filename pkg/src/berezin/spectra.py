"""Eigendecomposition and the local / global spectral measures.

The local measure at m puts weight |e_j(m)|^2 at each eigenvalue, where
e_j is the j-th orthonormal eigenfunction expanded over the monomial
sections; its total mass is the pointwise Bergman density.  The global
measure is the plain eigenvalue counting measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .assembly import HermitianMatrix
from .errors import ConvergenceError, UnsupportedTransformError
from .observables import TestFunction
from .sphere import ModelPoint, section_values


@dataclass(frozen=True)
class SpectralData:
    k: int
    eigenvalues: np.ndarray  # ascending
    vectors: np.ndarray  # columns orthonormal

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.vectors.setflags(write=False)

    @property
    def n(self) -> int:
        return self.k + 1


@dataclass(frozen=True)
class PointMeasure:
    atoms: np.ndarray
    weights: np.ndarray
    kind: str  # "local" or "global"
    k: int
    point: Optional[ModelPoint] = None

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())


def _canonicalize_phases(vals: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Fix each eigenvector's overall phase: first component above the
    noise floor is made real positive.  Deterministic per backend."""
    out = vecs.copy()
    n = vecs.shape[0]
    floor = 1e-8
    for j in range(n):
        col = out[:, j]
        idx = np.argmax(np.abs(col) > floor)
        pivot = col[idx]
        if pivot != 0:
            out[:, j] = col * (abs(pivot) / pivot)
    return out


def eigh(T: HermitianMatrix) -> SpectralData:
    """Full spectral decomposition with deterministic ordering and phases."""
    try:
        vals, vecs = np.linalg.eigh(T.mat)
    except np.linalg.LinAlgError as exc:
        off = float(np.max(np.abs(T.mat - np.diag(np.diag(T.mat)))))
        raise ConvergenceError(
            f"eigendecomposition failed at level {T.k}; off-diagonal norm {off:.3e}"
        ) from exc
    vecs = _canonicalize_phases(vals, vecs)
    return SpectralData(T.k, vals, vecs)


def local_measure(S: SpectralData, m: ModelPoint) -> PointMeasure:
    """Weights |e_j(m)|^2 = |sum_i V_ij s_i(m)|^2 at the eigenvalue atoms."""
    s = section_values(S.k, m)
    amps = S.vectors.T @ s
    return PointMeasure(
        atoms=S.eigenvalues.copy(),
        weights=np.abs(amps) ** 2,
        kind="local",
        k=S.k,
        point=m,
    )


def global_measure(S: SpectralData) -> PointMeasure:
    """Counting measure of the spectrum: unit weight per eigenvalue."""
    return PointMeasure(
        atoms=S.eigenvalues.copy(),
        weights=np.ones(S.n),
        kind="global",
        k=S.k,
    )


def pair(mu: PointMeasure, chi: TestFunction) -> float:
    """<mu, chi> = sum_j w_j chi(atom_j), an exact finite sum."""
    if len(mu.atoms) == 0:
        return 0.0
    return float(np.dot(mu.weights, chi.derivs[0](mu.atoms)))


def shift_covariance_pair(
    S: SpectralData, m: Optional[ModelPoint], c: float, chi: TestFunction
) -> tuple[float, float]:
    """Pairing of the shifted spectrum with chi vs original with chi(.-c).

    The two finite sums coincide after relabeling the atoms, which is the
    content of the reduction-to-elliptic trick.
    """
    shifted = SpectralData(S.k, S.eigenvalues + c, S.vectors)
    if m is None:
        a = pair(global_measure(shifted), chi)
        b = pair(global_measure(S), chi.shifted(-c))
    else:
        a = pair(local_measure(shifted, m), chi)
        b = pair(local_measure(S, m), chi.shifted(-c))
    return a, b


def scale_to_prime(S: SpectralData) -> SpectralData:
    """Eigenvalue scaling lambda -> k lambda of the first-order companion
    operator; eigenvectors unchanged."""
    return SpectralData(S.k, S.k * S.eigenvalues, S.vectors)


def pair_via_fourier(S: SpectralData, m: ModelPoint, chi: TestFunction) -> float:
    """Local pairing through the Fourier-dual route.

    Computes (2pi)^(-1/2) int (sum_j w_j e^{i k lambda_j tau})
    chi_k^(tau) dtau with chi_k = chi(./k), using the exact transform of
    chi and a trapezoid rule whose truncation and step are fixed
    analytically from the Gaussian envelope.
    """
    if not chi.has_fourier:
        raise UnsupportedTransformError(
            "pair_via_fourier needs a test function with an exact transform"
        )
    mu = local_measure(S, m)
    k = max(S.k, 1)
    lam = mu.atoms

    # after xi = k tau the integrand is sum_j w_j e^{i lambda_j xi} chi^(xi);
    # envelope |chi^| drops below 1e-18 at xi_max (two fixed-point passes)
    xi_max = 4.0
    while chi.fourier_envelope(xi_max) > 1e-18:
        xi_max *= 1.25
    lam_max = float(np.max(np.abs(lam))) if len(lam) else 0.0
    center = abs(getattr(chi, "center", 0.0))
    freq = lam_max + center + 1.0
    step = min(2.0 * math.pi / (8.0 * freq), xi_max / 64.0)
    n_nodes = int(math.ceil(2.0 * xi_max / step)) + 1
    xi = np.linspace(-xi_max, xi_max, n_nodes)
    h = xi[1] - xi[0]

    phases = np.exp(1j * np.outer(lam, xi))
    s_of_xi = mu.weights @ phases
    integrand = s_of_xi * chi.fourier(xi)
    total = h * (integrand.sum() - 0.5 * (integrand[0] + integrand[-1]))
    return float((total / math.sqrt(2.0 * math.pi)).real)



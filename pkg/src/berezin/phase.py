"""Numerical checks on the complex phase of the inner oscillatory integral.

The phase in the variables (t, theta, vartheta, lambda, tau, r) is

    Psi = -r w0 theta + tau r q + c2 tau^2 r - lambda tau
          + i t (1 - e^{i(theta + vartheta)}) - vartheta,

with parameters w0 in (0,1], q > 0 and an optional quadratic-in-tau
coefficient c2.  It has the unique stationary point
(1, 0, 0, q/w0, 0, 1/w0), where the complex 6x6 Hessian has determinant
-w0^2 independently of c2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

VARS = ("t", "theta", "vartheta", "lam", "tau", "r")


@dataclass(frozen=True)
class PhaseParams:
    omega0: float
    qval: float
    c2: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.omega0 <= 1.0:
            raise ValueError("omega0 must lie in (0, 1]")
        if self.qval <= 0.0:
            raise ValueError("qval must be positive")


@dataclass(frozen=True)
class PhasePoint:
    t: float
    theta: float
    vartheta: float
    lam: float
    tau: float
    r: float

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.theta, self.vartheta, self.lam, self.tau, self.r])


def critical_point(p: PhaseParams) -> PhasePoint:
    return PhasePoint(1.0, 0.0, 0.0, p.qval / p.omega0, 0.0, 1.0 / p.omega0)


def phase_eval(p: PhaseParams, x: PhasePoint):
    """Psi at x; scalar fields may be numpy arrays for vectorized scans."""
    e = np.exp(1j * (x.theta + x.vartheta))
    return (
        -x.r * p.omega0 * x.theta
        + x.tau * x.r * p.qval
        + p.c2 * x.tau**2 * x.r
        - x.lam * x.tau
        + 1j * x.t * (1.0 - e)
        - x.vartheta
    )


def phase_gradient(p: PhaseParams, x: PhasePoint) -> np.ndarray:
    """Analytic complex gradient (d_t, d_theta, d_vartheta, d_lam, d_tau, d_r)."""
    e = np.exp(1j * (x.theta + x.vartheta))
    d_t = 1j * (1.0 - e)
    d_theta = -x.r * p.omega0 + x.t * e
    d_vartheta = x.t * e - 1.0
    d_lam = -x.tau + 0j
    d_tau = x.r * p.qval + 2.0 * p.c2 * x.tau * x.r - x.lam + 0j
    d_r = -p.omega0 * x.theta + x.tau * p.qval + p.c2 * x.tau**2 + 0j
    return np.array([d_t, d_theta, d_vartheta, d_lam, d_tau, d_r])


def gradient_norm(p: PhaseParams, x: PhasePoint):
    g = phase_gradient(p, x)
    return np.sqrt(sum(np.abs(gi) ** 2 for gi in g))


def finite_difference_gradient(
    p: PhaseParams, x: PhasePoint, step: float = 1e-6
) -> np.ndarray:
    vals = x.as_array()
    out = np.empty(6, dtype=complex)
    for i in range(6):
        hi, lo = vals.copy(), vals.copy()
        hi[i] += step
        lo[i] -= step
        out[i] = (phase_eval(p, PhasePoint(*hi)) - phase_eval(p, PhasePoint(*lo))) / (
            2.0 * step
        )
    return out


def hessian(p: PhaseParams, x: Optional[PhasePoint] = None) -> np.ndarray:
    """Analytic complex Hessian in the variable order of VARS."""
    if x is None:
        x = critical_point(p)
    e = np.exp(1j * (x.theta + x.vartheta))
    H = np.zeros((6, 6), dtype=complex)
    # indices: 0 t, 1 theta, 2 vartheta, 3 lam, 4 tau, 5 r
    H[0, 1] = H[1, 0] = e
    H[0, 2] = H[2, 0] = e
    H[1, 1] = 1j * x.t * e
    H[1, 2] = H[2, 1] = 1j * x.t * e
    H[2, 2] = 1j * x.t * e
    H[1, 5] = H[5, 1] = -p.omega0
    H[3, 4] = H[4, 3] = -1.0
    H[4, 4] = 2.0 * p.c2 * x.r
    H[4, 5] = H[5, 4] = p.qval + 2.0 * p.c2 * x.tau
    return H


def hessian_det(p: PhaseParams) -> complex:
    """det of the Hessian at the stationary point; contract: -omega0^2."""
    return complex(np.linalg.det(hessian(p)))


def default_box(p: PhaseParams, width: float = 0.8) -> list[tuple[float, float]]:
    """Box symmetric about the stationary point (so an odd-resolution grid
    has a node exactly on it); t and r stay bounded away from 0."""
    cp = critical_point(p)
    return [
        (cp.t - width, cp.t + width),
        (-2.4, 2.4),
        (-2.4, 2.4),
        (cp.lam - width, cp.lam + width),
        (-width, width),
        (cp.r - width, cp.r + width),
    ]


def scan_stationary(
    p: PhaseParams,
    box: Optional[Sequence[tuple[float, float]]] = None,
    resolution: int = 9,
    threshold: float = 1e-3,
) -> list[tuple[np.ndarray, float]]:
    """Grid scan of |grad Psi|; returns grid-local minima below threshold.

    Each hit is (point, gradient norm).  With the default box the unique
    hit sits on top of the closed-form stationary point.
    """
    from scipy.ndimage import minimum_filter

    if box is None:
        box = default_box(p)
    axes = [np.linspace(lo, hi, resolution) for lo, hi in box]
    grids = np.meshgrid(*axes, indexing="ij")
    x = PhasePoint(*grids)
    norm = gradient_norm(p, x)
    local_min = (norm == minimum_filter(norm, size=3, mode="nearest")) & (
        norm < threshold
    )
    hits = []
    for idx in np.argwhere(local_min):
        pt = np.array([axes[i][idx[i]] for i in range(6)])
        hits.append((pt, float(norm[tuple(idx)])))
    return hits


def min_gradient_norm(
    p: PhaseParams, box: Sequence[tuple[float, float]], resolution: int = 9
) -> float:
    axes = [np.linspace(lo, hi, resolution) for lo, hi in box]
    grids = np.meshgrid(*axes, indexing="ij")
    return float(np.min(gradient_norm(p, PhasePoint(*grids))))

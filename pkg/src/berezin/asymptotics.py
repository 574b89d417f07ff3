"""Extraction of expansion coefficients from normalized pairing sequences.

The normalized sequence is a_k = (pi/k) <local measure, chi>; its large-k
behaviour is c0 + c1/k + c2/k^2 + ... with c0 = chi(f(m)).  Coefficients
are recovered by least squares on the 1/k Vandermonde system or by
Richardson extrapolation, and cross-checked against an exact binomial
oracle (available whenever the symbol is a function of u3, where the
quantization is diagonal) and its Edgeworth 1/k correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.stats import binom

from . import assembly, spectra
from .errors import BerezinError, ConditioningError
from .observables import Observable, TestFunction
from .sphere import ModelPoint

DEFAULT_K_GRID = (32, 48, 64, 96, 128, 192, 256)
DEFAULT_FIT_ORDER = 2
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class ExpansionFit:
    coefficients: np.ndarray  # c0 .. cJ
    grid: tuple[int, ...]
    residual: float  # max |a_k - model(k)| over the grid
    condition: float


def validate_k_grid(grid: Sequence[int], order: int = DEFAULT_FIT_ORDER) -> tuple[int, ...]:
    ks = tuple(int(k) for k in grid)
    if any(k <= 0 for k in ks):
        raise BerezinError("k-grid entries must be positive")
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise BerezinError("k-grid must be strictly increasing")
    if len(ks) < order + 2:
        raise BerezinError(f"k-grid needs at least {order + 2} entries for order {order}")
    return ks


def normalized_pairing_sequence(
    f: Observable,
    chi: TestFunction,
    m: ModelPoint,
    grid: Sequence[int],
    scheme=None,
) -> np.ndarray:
    """a_k = (pi/k) <T_{m,k}, chi> for each k in the grid."""
    out = np.empty(len(grid))
    for idx, k in enumerate(grid):
        try:
            T = assembly.assemble(k, f, scheme)
            S = spectra.eigh(T)
            mu = spectra.local_measure(S, m)
            out[idx] = (math.pi / k) * spectra.pair(mu, chi)
        except BerezinError as exc:
            raise type(exc)(f"level k={k}: {exc}") from exc
    return out


def fit_expansion(
    a: np.ndarray, grid: Sequence[int], order: int = DEFAULT_FIT_ORDER
) -> ExpansionFit:
    """Least squares for a_k ~ sum_j c_j k^-j on the 1/k Vandermonde system."""
    ks = validate_k_grid(grid, order)
    x = 1.0 / np.asarray(ks, dtype=float)
    V = np.vander(x, order + 1, increasing=True)
    cond = float(np.linalg.cond(V))
    if cond > MAX_CONDITION:
        raise ConditioningError(f"fit system condition {cond:.3e} exceeds {MAX_CONDITION:g}")
    coeffs, *_ = np.linalg.lstsq(V, np.asarray(a, dtype=float), rcond=None)
    residual = float(np.max(np.abs(V @ coeffs - a)))
    return ExpansionFit(coefficients=coeffs, grid=ks, residual=residual, condition=cond)


def richardson(values: Sequence[float], ratio: float = 2.0) -> float:
    """Limit of b_i = b(k0 * ratio^i) assuming integer powers of 1/k."""
    row = list(map(float, values))
    level = 1
    while len(row) > 1:
        factor = ratio**level
        row = [
            (factor * b - a) / (factor - 1.0) for a, b in zip(row[:-1], row[1:])
        ]
        level += 1
    return row[0]


def binomial_oracle(k: int, p: float, chi: TestFunction) -> float:
    """Exact normalized local pairing for the u3 symbol, no linear algebra.

    The quantization of u3 is diagonal with eigenvalues (2j-k)/(k+2) and
    local weights proportional to binomial(k, p) masses, p = |z|^2/(1+|z|^2):
    a_k = (1 + 1/k) * E_{j~Bin(k,p)}[chi((2j-k)/(k+2))].
    """
    if not 0.0 <= p <= 1.0:
        raise BerezinError("p must lie in [0, 1]")
    j = np.arange(k + 1)
    pmf = binom.pmf(j, k, p)
    lam = (2 * j - k) / (k + 2)
    return float((1.0 + 1.0 / k) * np.dot(pmf, chi.derivs[0](lam)))


def edgeworth_c1(chi: TestFunction, fval: float) -> float:
    """Closed form of the first correction coefficient at a u3-value fval:

        c1 = chi(f) - 2 f chi'(f) + (1 - f^2)/2 * chi''(f)

    (mean drift of the concentrating binomial plus its variance term plus
    the (1 + 1/k) mass factor).  Confirmed against Richardson-extrapolated
    binomial-oracle sequences in the acceptance suite.
    """
    return float(
        chi(fval)
        - 2.0 * fval * chi(fval, 1)
        + 0.5 * (1.0 - fval * fval) * chi(fval, 2)
    )


def binomial_c1_estimate(
    chi: TestFunction, fval: float, k_powers: Sequence[int] = (7, 8, 9, 10, 11, 12)
) -> float:
    """Independent estimate of c1: Richardson-extrapolate k (a_k - c0) on a
    doubling grid of binomial-oracle values."""
    p = 0.5 * (1.0 + fval)
    c0 = chi(fval)
    b = [2**e * (binomial_oracle(2**e, p, chi) - c0) for e in k_powers]
    return richardson(b)


def szego_limit_check(
    f: Observable,
    chi: TestFunction,
    grid: Sequence[int],
    scheme=None,
) -> tuple[np.ndarray, float]:
    """Global normalized pairings (pi/k) <counting measure, chi> along the
    grid, plus the limit target int_M chi(f) dmu."""
    values = np.empty(len(grid))
    for idx, k in enumerate(grid):
        T = assembly.assemble(k, f, scheme)
        S = spectra.eigh(T)
        values[idx] = (math.pi / k) * spectra.pair(spectra.global_measure(S), chi)
    return values, sphere_integral_of_chi(f, chi)


def sphere_integral_of_chi(f: Observable, chi: TestFunction) -> float:
    """int_M chi(f) dmu (total mass pi) by product quadrature in (u, phi).

    In the coordinates u = t/(1+t), phi the volume form is (1/2) du dphi;
    for symbols depending on u3 alone this collapses to
    (pi/2) int_{-1}^{1} chi(f) ds since u3 = 2u - 1 is uniform.
    """
    nodes, weights = np.polynomial.legendre.leggauss(400)
    u = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    if f.kind == "poly_u3" or (f.kind == "linear_u" and f.a[0] == 0 and f.a[1] == 0):
        s = 2.0 * u - 1.0
        U = np.zeros((len(s), 3))
        U[:, 2] = s
        vals = chi.derivs[0](f.eval_u_array(U))
        return float(math.pi * np.dot(w, vals))
    m_ang = 181
    phi = 2.0 * math.pi * np.arange(m_ang) / m_ang
    t = u / (1.0 - u)
    root = np.sqrt(t)
    denom = (1.0 + t)[:, None]
    U = np.stack(
        [
            2.0 * root[:, None] * np.cos(phi)[None, :] / denom,
            2.0 * root[:, None] * np.sin(phi)[None, :] / denom,
            np.broadcast_to(((t - 1.0) / (1.0 + t))[:, None], (len(u), m_ang)),
        ],
        axis=-1,
    )
    vals = chi.derivs[0](f.eval_u_array(U))
    return float((2.0 * math.pi / m_ang) * 0.5 * np.dot(w, vals.sum(axis=1)))


def fit_from_pipeline(
    f: Observable,
    chi: TestFunction,
    m: ModelPoint,
    grid: Sequence[int] = DEFAULT_K_GRID,
    order: int = DEFAULT_FIT_ORDER,
    scheme=None,
) -> ExpansionFit:
    """Convenience: sequence generation plus fitting in one call."""
    a = normalized_pairing_sequence(f, chi, m, grid, scheme)
    return fit_expansion(a, grid, order)

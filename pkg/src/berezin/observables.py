"""Classical symbols on the sphere and Schwartz-class test functions.

Observables come in three flavours: affine functions of the sphere
coordinates (LinearU), polynomials in u3 (PolynomialU3, always diagonal
after quantization) and arbitrary callables (General).  Test functions are
polynomial-times-Gaussian (with exact Fourier transform) or compactly
supported bumps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import UnsupportedOrderError, UnsupportedTransformError
from .sphere import ModelPoint, fibonacci_sphere, sphere_coords

# ---------------------------------------------------------------------------
# observables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Observable:
    """A real classical symbol f on the sphere.

    kind is one of "linear_u", "poly_u3", "general"; the payload fields
    used depend on the kind.  Angular bandwidth (highest Fourier mode in
    the chart angle) is known exactly for the structured kinds and is a
    declared bound for general callables.
    """

    kind: str
    a: tuple[float, float, float] = (0.0, 0.0, 0.0)
    b: float = 0.0
    coeffs: tuple[float, ...] = ()
    fn: Optional[Callable[[np.ndarray], float]] = None
    bandwidth: int = 0
    label: str = ""

    def __call__(self, m: ModelPoint) -> float:
        return self.eval_u(sphere_coords(m))

    def eval_u(self, u: np.ndarray) -> float:
        if self.kind == "linear_u":
            return float(np.dot(self.a, u) + self.b)
        if self.kind == "poly_u3":
            return float(np.polynomial.polynomial.polyval(u[2], self.coeffs))
        return float(self.fn(u))

    def eval_u_array(self, U: np.ndarray) -> np.ndarray:
        """Vectorized evaluation on an array of u-vectors (last axis length 3)."""
        U = np.asarray(U, dtype=float)
        if self.kind == "linear_u":
            return U @ np.asarray(self.a) + self.b
        if self.kind == "poly_u3":
            return np.polynomial.polynomial.polyval(U[..., 2], self.coeffs)
        flat = U.reshape(-1, 3)
        return np.array([float(self.fn(u)) for u in flat]).reshape(U.shape[:-1])

    def shifted(self, c: float) -> "Observable":
        """The symbol f + c (same class; matches the operator shift T + cI)."""
        if self.kind == "linear_u":
            return linear_u(*self.a, self.b + c)
        if self.kind == "poly_u3":
            cs = list(self.coeffs) or [0.0]
            cs[0] += c
            return poly_u3(cs)
        base = self.fn
        return general(lambda u: base(u) + c, bandwidth=self.bandwidth,
                       label=f"{self.label}+{c:g}")


def linear_u(a1: float, a2: float, a3: float, b: float = 0.0) -> Observable:
    label = f"linear:{a1:g},{a2:g},{a3:g},{b:g}"
    return Observable(kind="linear_u", a=(a1, a2, a3), b=b,
                      bandwidth=1, label=label)


def poly_u3(coeffs: Sequence[float]) -> Observable:
    cs = tuple(float(c) for c in coeffs)
    return Observable(kind="poly_u3", coeffs=cs, bandwidth=0,
                      label="poly:" + ",".join(f"{c:g}" for c in cs))


def general(fn: Callable[[np.ndarray], float], bandwidth: int = 16,
            label: str = "general") -> Observable:
    return Observable(kind="general", fn=fn, bandwidth=bandwidth, label=label)


def constant(c: float) -> Observable:
    return poly_u3([c])


def u1() -> Observable:
    return linear_u(1.0, 0.0, 0.0)


def u2() -> Observable:
    return linear_u(0.0, 1.0, 0.0)


def u3() -> Observable:
    return linear_u(0.0, 0.0, 1.0)


def reduced_symbol(f: Observable, m: ModelPoint) -> float:
    """The reduced symbol of the quantized operator evaluated at m: just f(m)."""
    return f(m)


def symbol_range(f: Observable) -> tuple[float, float]:
    """Enclosure [lo, hi] of f over the sphere.

    Exact for affine symbols; for the other classes a 10^4-point
    quasi-uniform sphere sample widened by 1e-6.
    """
    if f.kind == "linear_u":
        r = math.sqrt(sum(x * x for x in f.a))
        return (f.b - r, f.b + r)
    us = fibonacci_sphere(10_000)
    vals = np.array([f.eval_u(u) for u in us])
    return (float(vals.min()) - 1e-6, float(vals.max()) + 1e-6)


# ---------------------------------------------------------------------------
# test functions
# ---------------------------------------------------------------------------

MAX_DERIVATIVE_ORDER = 4


@dataclass(frozen=True)
class TestFunction:
    """Rapidly decreasing test function with derivatives up to order 4.

    kind "gaussian_hermite": chi(s) = p(s - a) exp(-(s - a)^2 / (2 sigma^2))
    with polynomial p; its Fourier transform is exact.  kind "bump": smooth
    compactly supported bump on [lo, hi] (no exact transform).
    """

    kind: str
    derivs: tuple[Callable[[float], float], ...]
    center: float = 0.0
    sigma: float = 1.0
    poly: tuple[float, ...] = (1.0,)
    support: tuple[float, float] = (0.0, 0.0)
    label: str = ""
    # polynomial factor of the exact Fourier transform (gaussian_hermite only)
    fourier_poly: tuple[complex, ...] = field(default=(), repr=False)

    def __call__(self, s: float, order: int = 0) -> float:
        if not 0 <= order <= MAX_DERIVATIVE_ORDER:
            raise UnsupportedOrderError(f"derivative order {order} not supported")
        return float(self.derivs[order](s))

    @property
    def has_fourier(self) -> bool:
        return self.kind == "gaussian_hermite"

    def fourier(self, xi: np.ndarray) -> np.ndarray:
        """Exact transform (2pi)^(-1/2) int chi(s) e^(-i xi s) ds."""
        if not self.has_fourier:
            raise UnsupportedTransformError(f"{self.kind} has no exact transform")
        q = np.polynomial.polynomial.polyval(xi, np.asarray(self.fourier_poly))
        return q * np.exp(-1j * self.center * xi - 0.5 * (self.sigma * xi) ** 2)

    def fourier_envelope(self, xi: float) -> float:
        """Upper bound for |fourier| at |.| >= xi, used to pick truncation."""
        q = np.asarray(self.fourier_poly)
        bound = float(np.abs(q) @ (abs(xi) + 1.0) ** np.arange(len(q)))
        return bound * math.exp(-0.5 * (self.sigma * xi) ** 2)

    def shifted(self, c: float) -> "TestFunction":
        """chi(. - c)."""
        if self.kind == "gaussian_hermite":
            return gaussian_hermite(self.center + c, self.sigma, self.poly)
        lo, hi = self.support
        return bump(lo + c, hi + c)

    def scaled(self, factor: float) -> "TestFunction":
        """chi(. / factor) for Gaussian-Hermite kinds."""
        if self.kind != "gaussian_hermite":
            raise UnsupportedTransformError("scaling supported for gaussian_hermite only")
        p = np.asarray(self.poly)
        p_scaled = p / factor ** np.arange(len(p))
        return gaussian_hermite(self.center * factor, self.sigma * factor, p_scaled)


def test_eval(chi: TestFunction, s: float, order: int = 0) -> float:
    return chi(s, order)


def _gh_derivative_polys(poly: np.ndarray, sigma: float) -> list[np.ndarray]:
    # chi = p(x) e^(-x^2/2s^2)  =>  chi' = (p' - x p / s^2) e^(...)
    polys = [poly]
    for _ in range(MAX_DERIVATIVE_ORDER):
        p = polys[-1]
        dp = np.polynomial.polynomial.polyder(p) if len(p) > 1 else np.zeros(1)
        xp = np.concatenate([[0.0], p]) / sigma**2
        n = max(len(dp), len(xp))
        nxt = np.zeros(n)
        nxt[: len(dp)] += dp
        nxt[: len(xp)] -= xp
        polys.append(nxt)
    return polys


def _gh_fourier_poly(poly: np.ndarray, sigma: float) -> np.ndarray:
    # transform of x^n e^(-x^2/2s^2) is (i d/dxi)^n [s e^(-s^2 xi^2/2)];
    # on the polynomial factor the step is q -> i (q' - s^2 xi q)
    q_n = np.array([sigma], dtype=complex)
    out = np.zeros(1, dtype=complex)
    for n, c in enumerate(poly):
        if n > 0:
            dq = (np.polynomial.polynomial.polyder(q_n)
                  if len(q_n) > 1 else np.zeros(1, dtype=complex))
            xq = np.concatenate([[0.0], q_n]) * sigma**2
            m = max(len(dq), len(xq))
            nxt = np.zeros(m, dtype=complex)
            nxt[: len(dq)] += dq
            nxt[: len(xq)] -= xq
            q_n = 1j * nxt
        if c != 0.0:
            m = max(len(out), len(q_n))
            new = np.zeros(m, dtype=complex)
            new[: len(out)] += out
            new[: len(q_n)] += c * q_n
            out = new
    return out


def gaussian_hermite(center: float = 0.0, sigma: float = 1.0,
                     poly: Sequence[float] = (1.0,)) -> TestFunction:
    """chi(s) = p(s - center) exp(-(s - center)^2 / (2 sigma^2))."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    p = np.asarray(poly, dtype=float)
    polys = _gh_derivative_polys(p, sigma)

    def make(order: int) -> Callable[[float], float]:
        q = polys[order]

        def ev(s):
            x = np.asarray(s, dtype=float) - center
            return np.polynomial.polynomial.polyval(x, q) * np.exp(
                -0.5 * (x / sigma) ** 2
            )

        return ev

    return TestFunction(
        kind="gaussian_hermite",
        derivs=tuple(make(n) for n in range(MAX_DERIVATIVE_ORDER + 1)),
        center=float(center),
        sigma=float(sigma),
        poly=tuple(float(c) for c in p),
        label=f"gaussian:{center:g},{sigma:g}"
        + ("" if list(p) == [1.0] else ":" + ",".join(f"{c:g}" for c in p)),
        fourier_poly=tuple(_gh_fourier_poly(p, sigma)),
    )


def gaussian(center: float = 0.0, sigma: float = 1.0) -> TestFunction:
    return gaussian_hermite(center, sigma)


def cubic_probe(at: float, sigma: float = 1.0) -> TestFunction:
    """(s - at)^3 times a Gaussian centered at `at`: vanishes to second order there."""
    return gaussian_hermite(at, sigma, (0.0, 0.0, 0.0, 1.0))


def combine(parts: Sequence[tuple[float, TestFunction]]) -> TestFunction:
    """Linear combination sum_i alpha_i chi_i as a single test function."""
    parts = [(float(a), chi) for a, chi in parts]

    def make(order: int) -> Callable[[float], float]:
        def ev(s):
            return sum(a * chi.derivs[order](s) for a, chi in parts)

        return ev

    label = "+".join(f"{a:g}*({chi.label})" for a, chi in parts)
    return SumTestFunction(
        kind="sum",
        derivs=tuple(make(n) for n in range(MAX_DERIVATIVE_ORDER + 1)),
        label=label,
        parts=tuple(parts),
    )


@dataclass(frozen=True)
class SumTestFunction(TestFunction):
    """Weighted sum of test functions; transforms and shifts distribute."""

    parts: tuple[tuple[float, TestFunction], ...] = ()

    @property
    def has_fourier(self) -> bool:
        return all(chi.has_fourier for _, chi in self.parts)

    def fourier(self, xi: np.ndarray) -> np.ndarray:
        if not self.has_fourier:
            raise UnsupportedTransformError("a summand has no exact transform")
        return sum(a * chi.fourier(xi) for a, chi in self.parts)

    def fourier_envelope(self, xi: float) -> float:
        return sum(abs(a) * chi.fourier_envelope(xi) for a, chi in self.parts)

    def shifted(self, c: float) -> "TestFunction":
        return combine([(a, chi.shifted(c)) for a, chi in self.parts])


def bump(lo: float, hi: float) -> TestFunction:
    """Smooth bump exp(1 - 1/(1 - x^2)) on (lo, hi), zero outside."""
    if not hi > lo:
        raise ValueError("bump needs hi > lo")
    import sympy

    s = sympy.symbols("s")
    x = (2 * s - (lo + hi)) / (hi - lo)
    expr = sympy.exp(1 - 1 / (1 - x**2))
    lams = []
    cur = expr
    for _ in range(MAX_DERIVATIVE_ORDER + 1):
        lams.append(sympy.lambdify(s, cur, modules="numpy"))
        cur = sympy.diff(cur, s)

    def make(lam):
        def ev(sv):
            sv = np.asarray(sv, dtype=float)
            inside = (sv > lo + 1e-300) & (sv < hi - 1e-300)
            out = np.zeros_like(sv)
            if np.any(inside):
                with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
                    vals = lam(sv[inside])
                out[inside] = np.nan_to_num(vals, nan=0.0, posinf=0.0, neginf=0.0)
            return out if out.ndim else float(out)

        return ev

    return TestFunction(
        kind="bump",
        derivs=tuple(make(l) for l in lams),
        support=(float(lo), float(hi)),
        label=f"bump:{lo:g},{hi:g}",
    )

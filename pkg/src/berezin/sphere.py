"""Exact geometry of the projective line with the Fubini-Study form.

Conventions: total volume pi, i.e. dA = dx dy / (1+|z|^2)^2 in the south
chart.  The level-k holomorphic sections are spanned by the monomials z^j
(j = 0..k) with squared norms n_{k,j} = pi * j! (k-j)! / (k+1)!.  All
powers and factorials are handled in log-space so every level up to a few
thousand is safe.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

LOG_PI = math.log(math.pi)


class Chart(Enum):
    SOUTH = "south"
    NORTH = "north"


@dataclass(frozen=True)
class ModelPoint:
    """A point of the sphere stored in the chart where |coordinate| <= 1.

    The transition between charts is w_north = 1 / w_south, so the
    canonical representative always has a bounded coordinate and powers
    like (1+|w|^2)^(k/2) never overflow relative scale 2^(k/2).
    """

    chart: Chart
    w: complex

    @staticmethod
    def from_chart(chart: Chart, w: complex) -> "ModelPoint":
        w = complex(w)
        if abs(w) > 1.0:
            other = Chart.NORTH if chart is Chart.SOUTH else Chart.SOUTH
            return ModelPoint(other, 1.0 / w)
        return ModelPoint(chart, w)

    @staticmethod
    def south(z: complex) -> "ModelPoint":
        return ModelPoint.from_chart(Chart.SOUTH, z)

    @staticmethod
    def north(w: complex) -> "ModelPoint":
        return ModelPoint.from_chart(Chart.NORTH, w)

    @property
    def u(self) -> np.ndarray:
        return sphere_coords(self)


def sphere_coords(m: ModelPoint) -> np.ndarray:
    """Unit-sphere coordinates (u1, u2, u3) of a point.

    South chart: u = (2 Re z, 2 Im z, |z|^2 - 1) / (1 + |z|^2); the north
    chart formulas follow from z = 1/w.
    """
    w = m.w
    t = abs(w) ** 2
    d = 1.0 + t
    if m.chart is Chart.SOUTH:
        return np.array([2.0 * w.real / d, 2.0 * w.imag / d, (t - 1.0) / d])
    return np.array([2.0 * w.real / d, -2.0 * w.imag / d, (1.0 - t) / d])


def antipode(m: ModelPoint) -> ModelPoint:
    """Point with sphere coordinates -u (chart swap, coordinate conjugated)."""
    other = Chart.NORTH if m.chart is Chart.SOUTH else Chart.SOUTH
    return ModelPoint.from_chart(other, -m.w.conjugate())


def log_basis_norm(k: int, j: int) -> float:
    """log of n_{k,j} = pi * j! (k-j)! / (k+1)!."""
    if not 0 <= j <= k:
        raise IndexError(f"basis index {j} out of range for level {k}")
    return LOG_PI + math.lgamma(j + 1) + math.lgamma(k - j + 1) - math.lgamma(k + 2)


def basis_norm(k: int, j: int) -> float:
    """Squared Fubini-Study norm of the monomial section z^j at level k."""
    return math.exp(log_basis_norm(k, j))


def basis_table(k: int) -> np.ndarray:
    """All squared norms n_{k,j}, j = 0..k, of one level; build once, share."""
    j = np.arange(k + 1)
    from scipy.special import gammaln

    return np.exp(LOG_PI + gammaln(j + 1) + gammaln(k - j + 1) - gammaln(k + 2))


def _monomial_index(k: int, j: int, chart: Chart) -> int:
    # the north-chart trivialization swaps z^j into w^(k-j)
    return j if chart is Chart.SOUTH else k - j


def section_value(k: int, j: int, m: ModelPoint) -> complex:
    """Value of the normalized monomial section s_{k,j} at m.

    In the stored chart: w^p / (sqrt(n_{k,p}) (1+|w|^2)^(k/2)) with
    p = j (south) or p = k - j (north); the modulus is chart-independent.
    """
    if not 0 <= j <= k:
        raise IndexError(f"basis index {j} out of range for level {k}")
    return complex(section_values(k, m)[j])


def section_values(k: int, m: ModelPoint) -> np.ndarray:
    """Vector of all section values s_{k,j}(m), j = 0..k.

    Moduli come from |s_p|^2 = ((k+1)/pi) C(k,p) t^p / (1+t)^k evaluated
    with the extended-precision term recurrence (see bergman_diagonal);
    the phase is p * arg(w) in the stored chart.
    """
    t = np.longdouble(abs(m.w)) ** 2
    p = np.arange(1, k + 1, dtype=np.longdouble)
    ratios = t * (k - p + 1) / p
    pmf = np.concatenate([[np.longdouble(1.0)], np.cumprod(ratios)])
    pmf *= (1.0 + t) ** np.longdouble(-k)
    mod = np.sqrt(pmf * (k + 1) / np.longdouble(math.pi)).astype(float)
    theta = cmath.phase(m.w)
    vals = mod * np.exp(1j * np.arange(k + 1) * theta)
    if m.chart is Chart.NORTH:
        vals = vals[::-1]
    return vals


def bergman_diagonal(k: int, m: ModelPoint) -> float:
    """Pointwise density sum_j |s_{k,j}(m)|^2; equals (k+1)/pi identically.

    Summed in extended precision with the exact binomial-term recurrence
    (term ratio t (k-j)/(j+1)) so the identity holds to well below 1e-12
    even at k = 256 where the density is ~80.
    """
    t = np.longdouble(abs(m.w)) ** 2
    j = np.arange(1, k + 1, dtype=np.longdouble)
    ratios = t * (k - j + 1) / j
    terms = np.concatenate([[np.longdouble(1.0)], np.cumprod(ratios)])
    total = terms.sum() * (1.0 + t) ** np.longdouble(-k)
    return float(total * (k + 1) / np.longdouble(math.pi))


def standard_grid() -> list[ModelPoint]:
    """Nine reference points spread over both charts, used by default m-grids."""
    return [
        ModelPoint.south(0.0),
        ModelPoint.south(0.25),
        ModelPoint.south(0.5j),
        ModelPoint.south(-0.3 + 0.4j),
        ModelPoint.south(1.0),
        ModelPoint.south(0.6 - 0.6j),
        ModelPoint.north(0.0),
        ModelPoint.north(0.5),
        ModelPoint.north(-0.2 + 0.7j),
    ]


def random_points(n: int, rng: np.random.Generator) -> list[ModelPoint]:
    """n points uniformly distributed on the sphere (area measure)."""
    u3 = rng.uniform(-1.0, 1.0, n)
    phi = rng.uniform(0.0, 2.0 * math.pi, n)
    pts = []
    for c, a in zip(u3, phi):
        # |z|^2 = (1+u3)/(1-u3) in the south chart
        t = (1.0 + c) / (1.0 - c) if c < 1.0 else math.inf
        if t <= 1.0:
            pts.append(ModelPoint.south(math.sqrt(t) * cmath.exp(1j * a)))
        else:
            pts.append(ModelPoint.north(cmath.exp(-1j * a) / math.sqrt(t)))
    return pts


def fibonacci_sphere(n: int) -> np.ndarray:
    """Quasi-uniform n-point sample of the unit sphere (rows are u-vectors)."""
    i = np.arange(n) + 0.5
    u3 = 1.0 - 2.0 * i / n
    phi = math.pi * (1.0 + math.sqrt(5.0)) * i
    s = np.sqrt(1.0 - u3**2)
    return np.column_stack([s * np.cos(phi), s * np.sin(phi), u3])

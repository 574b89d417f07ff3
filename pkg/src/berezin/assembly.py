"""Assembly of level-k Berezin-Toeplitz matrices.

Entries are (T_k)_{ij} = <f s_j, s_i> in the orthonormal monomial basis.
Affine symbols and polynomials in u3 have exact Beta-integral closed
forms; everything else goes through Fubini-Study quadrature (angular
trapezoid, then Gauss-Legendre radially after the u = t/(1+t) map).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .errors import AssemblyError, UnsupportedClassError
from .observables import Observable
from .sphere import log_basis_norm

CLOSED_FORM = "closed-form"
QUADRATURE = "quadrature"


@dataclass(frozen=True)
class Provenance:
    path: str
    radial_order: int = 0
    angular_order: int = 0
    herm_defect: float = 0.0
    warnings: tuple[str, ...] = ()

    def tag(self) -> str:
        if self.path == CLOSED_FORM:
            return CLOSED_FORM
        return f"{self.path}(radial={self.radial_order},angular={self.angular_order})"


@dataclass(frozen=True)
class HermitianMatrix:
    k: int
    mat: np.ndarray
    provenance: Provenance

    def __post_init__(self):
        self.mat.setflags(write=False)

    @property
    def n(self) -> int:
        return self.k + 1


@dataclass(frozen=True)
class QuadratureScheme:
    """Product rule: Gauss-Legendre in u = t/(1+t) on (0,1) x uniform angles.

    radial_order points integrate u-polynomials up to degree
    2*radial_order - 1 exactly; angular_order nodes are exact for
    trigonometric polynomials of degree < angular_order / 2.
    """

    radial_nodes: np.ndarray
    radial_weights: np.ndarray
    angular_order: int
    exactness_degree: int

    @property
    def radial_order(self) -> int:
        return len(self.radial_nodes)

    @staticmethod
    def default(k: int, bandwidth: int = 1) -> "QuadratureScheme":
        radial = max(k + 24, 32)
        angular = 2 * (k + max(bandwidth, 1)) + 1
        x, w = np.polynomial.legendre.leggauss(radial)
        u = 0.5 * (x + 1.0)
        return QuadratureScheme(u, 0.5 * w, angular, 2 * radial - 1 - k)

    def radial_moment(self, k: int, j: int) -> float:
        """Quadrature value of int_0^inf t^j/(1+t)^(k+2) dt = int u^j (1-u)^(k-j) du."""
        u = self.radial_nodes
        return float(np.sum(self.radial_weights * u**j * (1.0 - u) ** (k - j)))

    def moment_error(self, k: int, j: int) -> float:
        """Relative deviation of radial_moment from the Beta closed form."""
        exact = math.exp(gammaln(j + 1) + gammaln(k - j + 1) - gammaln(k + 2))
        return abs(self.radial_moment(k, j) - exact) / exact


def _band(k: int) -> np.ndarray:
    j = np.arange(k)
    return np.sqrt((j + 1) * (k - j)) / (k + 2)


def _poly_u3_diagonal(k: int, coeffs: np.ndarray) -> np.ndarray:
    """Diagonal of the quantization of sum_n c_n u3^n via finite Beta sums."""
    j = np.arange(k + 1)
    diag = np.zeros(k + 1)
    log_jfac = gammaln(j + 1) + gammaln(k - j + 1)
    for n, c in enumerate(coeffs):
        if c == 0.0:
            continue
        # int t^j (t-1)^n (1+t)^-(k+2+n) dA / n_{k,j}
        acc = np.zeros(k + 1)
        for a in range(n + 1):
            sign = (-1.0) ** (n - a)
            term = np.exp(
                gammaln(n + 1) - gammaln(a + 1) - gammaln(n - a + 1)
                + gammaln(j + a + 1) + gammaln(k + n - j - a + 1)
                - gammaln(k + n + 2) - log_jfac + gammaln(k + 2)
            )
            acc += sign * term
        diag += c * acc
    return diag


def assemble_closed(k: int, f: Observable) -> HermitianMatrix:
    """Closed-form Toeplitz matrix for affine symbols and polynomials in u3.

    u3 quantizes to diag((2j-k)/(k+2)); u1 and u2 to the tridiagonal band
    sqrt((j+1)(k-j))/(k+2) (u2 with factor -i below the diagonal).
    """
    n = k + 1
    if f.kind == "linear_u":
        a1, a2, a3 = f.a
        mat = np.zeros((n, n), dtype=complex)
        j = np.arange(n)
        mat[j, j] = a3 * (2 * j - k) / (k + 2) + f.b
        if k > 0 and (a1 != 0.0 or a2 != 0.0):
            band = _band(k)
            lower = (a1 - 1j * a2) * band
            mat[j[1:], j[:-1]] = lower
            mat[j[:-1], j[1:]] = np.conj(lower)
        return HermitianMatrix(k, mat, Provenance(CLOSED_FORM))
    if f.kind == "poly_u3":
        mat = np.diag(_poly_u3_diagonal(k, np.asarray(f.coeffs, dtype=float))).astype(
            complex
        )
        return HermitianMatrix(k, mat, Provenance(CLOSED_FORM))
    raise UnsupportedClassError(
        f"no closed-form assembly for observable kind {f.kind!r}"
    )


def has_closed_form(f: Observable) -> bool:
    return f.kind in ("linear_u", "poly_u3")


def assemble_quadrature(
    k: int, f: Observable, scheme: Optional[QuadratureScheme] = None
) -> HermitianMatrix:
    """Quadrature Toeplitz matrix: angular Fourier modes first, then radial.

    The angle integral isolates the (j - i)-th Fourier mode of f; the
    radial factor u^((i+j)/2) (1-u)^(k-(i+j)/2) / sqrt(n_i n_j) is
    combined in log-space so nothing overflows.
    """
    if scheme is None:
        scheme = QuadratureScheme.default(k, f.bandwidth)
    n = k + 1
    warnings = ()
    if scheme.angular_order < 2 * (k + f.bandwidth) + 1 or scheme.exactness_degree < 0:
        warnings = ("quadrature exactness below the declared requirement",)

    m_ang = scheme.angular_order
    phi = 2.0 * math.pi * np.arange(m_ang) / m_ang
    u = scheme.radial_nodes
    t = u / (1.0 - u)
    sqrt_t = np.sqrt(t)

    # samples f[q, a] on the polar grid; u-coordinates from chart formulas
    cosphi, sinphi = np.cos(phi), np.sin(phi)
    denom = (1.0 + t)[:, None]
    grid = np.stack(
        [
            2.0 * sqrt_t[:, None] * cosphi[None, :] / denom,
            2.0 * sqrt_t[:, None] * sinphi[None, :] / denom,
            np.broadcast_to(((t - 1.0) / (1.0 + t))[:, None], (len(u), m_ang)),
        ],
        axis=-1,
    )
    fvals = f.eval_u_array(grid)

    # angular modes A[q, d] = (2pi/M) sum_a f[q,a] e^{i d phi_a}, d = j - i
    modes = np.fft.fft(fvals, axis=1) * (2.0 * math.pi / m_ang)  # index -d mod M

    idx = np.arange(n)
    log_norm = np.array([log_basis_norm(k, j) for j in idx])
    i_grid, j_grid = np.meshgrid(idx, idx, indexing="ij")
    s = 0.5 * (i_grid + j_grid)

    log_u = np.log(u)
    log_1u = np.log1p(-u)
    mat = np.zeros((n, n), dtype=complex)
    # fft gives F[m] = sum_a f_a e^{-2 pi i m a / M}; the (j-i)-th angular
    # mode sum_a f_a e^{+i (j-i) phi_a} is F[(i-j) mod M]
    d = (i_grid - j_grid) % m_ang
    for q in range(len(u)):
        radial = np.exp(
            s * log_u[q]
            + (k - s) * log_1u[q]
            - 0.5 * (log_norm[i_grid] + log_norm[j_grid])
        )
        mat += scheme.radial_weights[q] * radial * modes[q, d]
    mat *= 0.5  # dA = (1/2) dt dphi

    if not np.all(np.isfinite(mat)):
        raise AssemblyError("quadrature assembly produced non-finite entries")
    herm_defect = float(np.max(np.abs(mat - mat.conj().T)))
    mat = 0.5 * (mat + mat.conj().T)
    prov = Provenance(
        QUADRATURE,
        radial_order=scheme.radial_order,
        angular_order=scheme.angular_order,
        herm_defect=herm_defect,
        warnings=warnings,
    )
    return HermitianMatrix(k, mat, prov)


def assemble(k: int, f: Observable,
             scheme: Optional[QuadratureScheme] = None) -> HermitianMatrix:
    """Closed form when available, quadrature otherwise."""
    if has_closed_form(f):
        return assemble_closed(k, f)
    return assemble_quadrature(k, f, scheme)


def shift_operator(T: HermitianMatrix, c: float) -> HermitianMatrix:
    """T + c * Identity; provenance preserved."""
    return HermitianMatrix(T.k, T.mat + c * np.eye(T.n), T.provenance)


def gram_matrix(k: int, scheme: Optional[QuadratureScheme] = None) -> np.ndarray:
    """Quadrature Gram matrix of the normalized monomial sections (identity check)."""
    from .observables import constant

    return assemble_quadrature(k, constant(1.0), scheme).mat

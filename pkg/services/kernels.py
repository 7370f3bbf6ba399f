"""Reproducing kernels of H^2 and H(b), Gram matrices and Takenaka coordinates on K_B"""
import logging
from typing import Optional, Sequence, Union

import numpy as np
from scipy import linalg

from services.disk_functions import (
    AnalyticFunction,
    BlaschkeProduct,
    NoLimit,
    SchurFunction,
    SzegoKernel,
    UnitCirclePoint,
    product_rule,
    radial_boundary_value,
)
from services.exceptions import BoundaryValueMissing, UnsupportedRepresentation
from services.quadrature import QuadratureConfig, uniform_angles

logger = logging.getLogger(__name__)

UNIMODULAR_TOL = 1e-8


def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def boundary_value(b: AnalyticFunction, zeta: UnitCirclePoint, require_unimodular: bool = True) -> complex:
    """Radial limit b(zeta), checked to be unimodular"""
    value = radial_boundary_value(b, zeta)
    if isinstance(value, NoLimit):
        raise BoundaryValueMissing(f"no radial limit at angle {zeta.angle:.12g}: {value.reason}")
    if require_unimodular and abs(abs(value) - 1.0) > UNIMODULAR_TOL:
        raise BoundaryValueMissing(
            f"radial limit at angle {zeta.angle:.12g} has modulus {abs(value):.3e}, not 1"
        )
    return value


class DbrKernel(AnalyticFunction):
    """k^b_w(z) = (1 - conj(b(w)) b(z)) / (1 - conj(w) z), for interior or boundary anchors"""

    provenance = 'kernel'

    def __init__(self, b: SchurFunction, anchor: Union[complex, UnitCirclePoint]):
        self.b = b
        if isinstance(anchor, UnitCirclePoint):
            self.boundary_anchor = True
            self.anchor = anchor.point
            self.zeta = anchor
            self.b_anchor = boundary_value(b, anchor)
        else:
            anchor = complex(anchor)
            if abs(anchor) >= 1:
                raise ValueError(f"interior kernel anchor must lie in the open disk, got {anchor}")
            self.boundary_anchor = False
            self.anchor = anchor
            self.zeta = None
            self.b_anchor = complex(b(anchor))

    @property
    def exact_boundary(self):
        return self.b.exact_boundary

    @property
    def norm_sq(self) -> float:
        if self.boundary_anchor:
            raise UnsupportedRepresentation("boundary kernel norms need the angular derivative")
        return (1.0 - abs(self.b_anchor) ** 2) / (1.0 - abs(self.anchor) ** 2)

    def _combine(self, z, values):
        return (1.0 - np.conj(self.b_anchor) * values) / (1.0 - np.conj(self.anchor) * z)

    def _evaluate(self, z):
        out = self._combine(z, self.b._evaluate(z))
        if self.boundary_anchor:
            near = np.abs(z - self.anchor) < 1e-13
            if np.any(near):
                # 0/0 at the anchor: limit conj(b(zeta)) b'(zeta) zeta
                out[near] = np.conj(self.b_anchor) * self.b._derivative(z[near]) * self.anchor
        return out

    def _boundary(self, points):
        return self._combine(points, self.b._boundary(points))

    def _derivative(self, z):
        c = 1.0 / (1.0 - np.conj(self.anchor) * z)
        numerator = 1.0 - np.conj(self.b_anchor) * self.b._evaluate(z)
        return -np.conj(self.b_anchor) * self.b._derivative(z) * c + numerator * np.conj(self.anchor) * c ** 2

    def hot_spots(self):
        spots = self.b.hot_spots()
        if not self.boundary_anchor:
            spots = spots + SzegoKernel(self.anchor).hot_spots()
        return spots

    def breakpoints(self):
        return self.b.breakpoints()

    def is_continuous_at(self, zeta):
        return self.b.is_continuous_at(zeta)

    def to_spec(self):
        anchor = {'angle': self.zeta.angle} if self.boundary_anchor else _pair(self.anchor)
        return {'kind': 'kernel', 'schur': self.b.to_spec(), 'anchor': anchor}

    def __repr__(self):
        return f"DbrKernel({self.b!r}, {self.zeta if self.boundary_anchor else self.anchor})"


def dbr_kernel_eval(b: SchurFunction, omega, z) -> complex:
    if not isinstance(omega, UnitCirclePoint) and complex(z) == complex(omega):
        return complex(dbr_kernel_norm_sq(b, omega))
    return complex(DbrKernel(b, omega)(z))


def dbr_kernel_norm_sq(b: SchurFunction, omega: complex) -> float:
    omega = complex(omega)
    if abs(omega) >= 1:
        raise ValueError("kernel norms are defined for interior anchors only")
    return (1.0 - abs(complex(b(omega))) ** 2) / (1.0 - abs(omega) ** 2)


def quotient_identity_residual(b: SchurFunction, omega: complex, zeta: UnitCirclePoint, z: complex) -> float:
    """Gap in (k_w(z) - k_w(zeta)) / (z - zeta) = conj(w) c_w(z) k_w(zeta) - conj(b(w)) c_w(z) b(zeta) conj(zeta) k_zeta(z)"""
    omega, z = complex(omega), complex(z)
    k_omega = DbrKernel(b, omega)
    k_zeta = DbrKernel(b, zeta)
    point = zeta.point
    c_omega = 1.0 / (1.0 - omega.conjugate() * z)
    at_zeta = complex(k_omega.boundary(point))
    lhs = (complex(k_omega(z)) - at_zeta) / (z - point)
    rhs = (omega.conjugate() * c_omega * at_zeta
           - k_omega.b_anchor.conjugate() * c_omega * k_zeta.b_anchor * point.conjugate() * complex(k_zeta(z)))
    return abs(lhs - rhs)


class ModelSpaceFunction(AnalyticFunction):
    """f = sum_k coefficients[k] e_k in the Takenaka basis of K_B"""

    provenance = 'rational'

    def __init__(self, basis, coefficients):
        coefficients = np.asarray(coefficients, dtype=complex)
        if coefficients.shape != (basis.dimension,):
            raise ValueError(f"expected {basis.dimension} coefficients, got {coefficients.shape}")
        self.basis = basis
        self.coefficients = coefficients

    def _evaluate(self, z):
        return self.coefficients @ self.basis.evaluate(z)

    def _derivative(self, z):
        return self.coefficients @ self.basis.derivative(z)

    def hot_spots(self):
        return self.basis.blaschke.hot_spots()

    def exact_h2_norm_sq(self):
        return float(np.sum(np.abs(self.coefficients) ** 2))

    def to_spec(self):
        return {
            'kind': 'model_space',
            'zeros': [_pair(a) for a in self.basis.zeros],
            'coefficients': [_pair(c) for c in self.coefficients],
        }


class TakenakaBasis:
    """Orthonormal basis e_k = d_k / (1 - conj(a_k) z) * prod_{j<k} (z - a_j) / (1 - conj(a_j) z) of K_B"""

    def __init__(self, blaschke: BlaschkeProduct):
        if blaschke.degree == 0:
            raise ValueError("model space of a constant Blaschke product is trivial")
        self.blaschke = blaschke
        self.zeros = blaschke.zeros
        self.norms = np.sqrt(1.0 - np.abs(self.zeros) ** 2)

    @property
    def dimension(self) -> int:
        return int(self.zeros.size)

    def _parts(self, z):
        a = self.zeros[:, None]
        zz = np.atleast_1d(z)[None, :]
        denom = 1.0 - np.conj(a) * zz
        kernel = self.norms[:, None] / denom
        kernel_slope = self.norms[:, None] * np.conj(a) / denom ** 2
        factor = (zz - a) / denom
        factor_slope = (1.0 - np.abs(a) ** 2) / denom ** 2
        return kernel, kernel_slope, factor, factor_slope

    def evaluate(self, z) -> np.ndarray:
        """Array of shape (N, len(z)) with e_k(z) in row k"""
        kernel, _, factor, _ = self._parts(np.asarray(z, dtype=complex).ravel())
        ones = np.ones_like(factor[:1])
        prefix = np.cumprod(np.concatenate([ones, factor[:-1]]), axis=0)
        return kernel * prefix

    def derivative(self, z) -> np.ndarray:
        kernel, kernel_slope, factor, factor_slope = self._parts(np.asarray(z, dtype=complex).ravel())
        rows = []
        for k in range(self.dimension):
            values = np.concatenate([factor[:k], kernel[k:k + 1]])
            slopes = np.concatenate([factor_slope[:k], kernel_slope[k:k + 1]])
            rows.append(product_rule(values, slopes))
        return np.array(rows)

    def kernel_coordinates(self, point) -> np.ndarray:
        """Coordinates of the K_B reproducing kernel at ``point`` (disk or circle)"""
        if isinstance(point, UnitCirclePoint):
            point = point.point
        return np.conj(self.evaluate(complex(point))[:, 0])

    def function(self, coefficients) -> ModelSpaceFunction:
        return ModelSpaceFunction(self, coefficients)

    def functions(self) -> list:
        return [self.function(np.eye(self.dimension)[k]) for k in range(self.dimension)]

    def to_json(self, z) -> list:
        values = self.evaluate(z)
        return [[_pair(v) for v in row] for row in values]


def takenaka_basis(blaschke: BlaschkeProduct) -> TakenakaBasis:
    return TakenakaBasis(blaschke)


def compressed_shift_matrix(blaschke: BlaschkeProduct) -> np.ndarray:
    """Matrix of f -> (f - f(0)) / z on K_B in the Takenaka basis.

    This is the adjoint of the compressed shift, whose Takenaka matrix is
    lower triangular with the zeros on the diagonal.
    """
    a = blaschke.zeros
    d = np.sqrt(1.0 - np.abs(a) ** 2)
    n = a.size
    shift = np.zeros((n, n), dtype=complex)
    for k in range(n):
        shift[k, k] = a[k]
        for j in range(k + 1, n):
            shift[j, k] = d[j] * d[k] * np.prod(-np.conj(a[k + 1:j]))
    return shift.conj().T


class GramMatrix:
    """Hermitian matrix of inner products in a stated space"""

    def __init__(self, entries, space: str = 'H(b)'):
        self.entries = np.asarray(entries, dtype=complex)
        self.space = space

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.entries))))
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol * scale)

    def eigenvalues(self) -> np.ndarray:
        hermitian = (self.entries + self.entries.conj().T) / 2.0
        return linalg.eigvalsh(hermitian)

    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues()[0])

    def is_psd(self, tol: float = 1e-10) -> bool:
        return self.min_eigenvalue() >= -tol

    def quadratic_form(self, coefficients) -> float:
        c = np.asarray(coefficients, dtype=complex)
        return float(np.real(np.conj(c) @ self.entries @ c))

    def to_json(self) -> dict:
        return {'space': self.space, 'entries': [[_pair(v) for v in row] for row in self.entries]}


def gram_in_hb(b: SchurFunction, anchors: Sequence[complex]) -> GramMatrix:
    """G[i][j] = k^b(w_i, w_j) = <k_{w_j}, k_{w_i}>_b"""
    omega = np.asarray(anchors, dtype=complex)
    if np.any(np.abs(omega) >= 1):
        raise ValueError("Gram anchors must lie in the open disk")
    values = np.asarray(b(omega), dtype=complex).reshape(omega.shape)
    entries = (1.0 - np.conj(values)[None, :] * values[:, None]) / (1.0 - np.conj(omega)[None, :] * omega[:, None])
    diagonal = (1.0 - np.abs(values) ** 2) / (1.0 - np.abs(omega) ** 2)
    entries[np.diag_indices_from(entries)] = diagonal
    return GramMatrix(entries, space='H(b)')


def hb_gram_by_quadrature(b: SchurFunction, anchors: Sequence[complex],
                          quad: Optional[QuadratureConfig] = None) -> GramMatrix:
    """H(b) Gram matrix of kernels from boundary samples.

    Uses k_w = (I - T_b T_conj(b)) c_w, so <k_j, k_i>_b equals
    <c_j, c_i> - <P(conj(b) c_j), P(conj(b) c_i)> in H^2, with the Riesz
    projection P taken on FFT coefficients.
    """
    quad = quad or QuadratureConfig.from_settings()
    omega = np.asarray(anchors, dtype=complex)
    scales = [1.0 - abs(w) for w in omega] + [s.scale for s in b.hot_spots()]
    if min(scales) <= 0:
        raise UnsupportedRepresentation("boundary-quadrature Gram needs b smooth on the circle")
    n = quad.circle_samples
    while n < 40.0 / min(scales) and n < 2 ** 20:
        n *= 2
    points = np.exp(1j * uniform_angles(n))
    szego = 1.0 / (1.0 - np.conj(omega)[:, None] * points[None, :])
    conj_b = np.conj(np.asarray(b.boundary(points), dtype=complex))
    coefficients = np.fft.fft(conj_b[None, :] * szego, axis=1) / n
    analytic = coefficients[:, np.fft.fftfreq(n, d=1.0 / n) >= 0]
    h2 = szego.conj() @ szego.T / n
    projected = analytic.conj() @ analytic.T
    logger.debug(f"quadrature Gram on {n} circle samples for {omega.size} anchors")
    return GramMatrix(h2 - projected, space='H(b)')

"""Embeddings of H(b) and model spaces into local and weighted Dirichlet spaces.

Finite-dimensional certificates come from the quotient operator on K_B;
non-embedding is exhibited by sweeps of kernel Rayleigh ratios toward a
spectral point.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy import linalg

from services.dirichlet import h2_norm_sq, local_dirichlet_douglas, weighted_dirichlet
from services.disk_functions import (
    AnalyticFunction,
    BlaschkeProduct,
    ProductFunction,
    SchurFunction,
    SzegoKernel,
    UnitCirclePoint,
)
from services.exceptions import (
    BoundaryValueMissing,
    SeparationViolated,
    SingularResolvent,
    TooCloseToBoundary,
)
from services.kernels import DbrKernel, TakenakaBasis, compressed_shift_matrix
from services.measures import BoundaryMeasure
from services.quadrature import (
    TWO_PI,
    IntegralResult,
    QuadratureConfig,
    assess_growth,
    circle_rule,
    shell_sums,
    uniform_angles,
)
from services.spectrum import boundary_spectrum, support_distance

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12
DEFAULT_SWEEP_LEVELS = 20


def _explosion_threshold() -> float:
    try:
        from django.conf import settings
        if settings.configured:
            return float(getattr(settings, 'RATIO_EXPLOSION_THRESHOLD', 1e3))
    except ImportError:
        pass
    return 1e3


def _resolvent(blaschke: BlaschkeProduct, zeta: UnitCirclePoint, adjoint: bool = False):
    shift = compressed_shift_matrix(blaschke)
    if adjoint:
        operator = np.eye(shift.shape[0]) - np.conj(zeta.point) * shift.conj().T
    else:
        operator = np.eye(shift.shape[0]) - zeta.point * shift
    condition = np.linalg.cond(operator)
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise SingularResolvent(f"I - zeta X has condition number {condition:.3e}")
    return shift, operator


def quotient_operator_matrix(blaschke: BlaschkeProduct, zeta: UnitCirclePoint) -> np.ndarray:
    """Matrix of f -> (f - f(zeta)) / (z - zeta) on K_B, i.e. (I - zeta X)^-1 X"""
    shift, operator = _resolvent(blaschke, zeta)
    return linalg.solve(operator, shift)


def embedding_constant(blaschke: BlaschkeProduct, zeta: UnitCirclePoint) -> float:
    """1 + ||Q||^2, so that ||f||^2 + D_zeta(f) <= constant * ||f||^2 on K_B"""
    quotient = quotient_operator_matrix(blaschke, zeta)
    return 1.0 + float(linalg.norm(quotient, 2)) ** 2


def resolvent_kernel_check(blaschke: BlaschkeProduct, zeta: UnitCirclePoint) -> float:
    """|| (I - conj(zeta) X*)^-1 k_0 - k_zeta || in Takenaka coordinates"""
    _, operator = _resolvent(blaschke, zeta, adjoint=True)
    basis = TakenakaBasis(blaschke)
    solved = linalg.solve(operator, basis.kernel_coordinates(0.0))
    return float(linalg.norm(solved - basis.kernel_coordinates(zeta)))


def default_path(toward: UnitCirclePoint, levels: int = DEFAULT_SWEEP_LEVELS) -> list:
    return [(1.0 - 2.0 ** -n) * toward.point for n in range(1, levels + 1)]


@dataclass
class RatioSweep:
    """Kernel Rayleigh ratios D_zeta(k_w) / ||k_w||_b^2 along a path w_n"""

    zeta: UnitCirclePoint
    path: list
    dirichlet: list
    norms: list
    lower_bounds: list
    upper_bounds: list

    @property
    def ratios(self) -> list:
        return [d / n if n > 0 else math.inf for d, n in zip(self.dirichlet, self.norms)]

    @property
    def max_ratio(self) -> float:
        return max(self.ratios)

    def first_exceeding(self, threshold: float) -> Optional[int]:
        for n, ratio in enumerate(self.ratios, start=1):
            if ratio > threshold:
                return n
        return None

    def lower_bound_holds(self, tol: float = 1e-6) -> bool:
        return all(low <= ratio + tol for low, ratio in zip(self.lower_bounds, self.ratios))

    def upper_bound_holds(self, tol: float = 1e-6) -> bool:
        return all(up is None or d <= up + tol * max(1.0, up)
                   for d, up in zip(self.dirichlet, self.upper_bounds))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'n': range(1, len(self.path) + 1),
            're': [complex(w).real for w in self.path],
            'im': [complex(w).imag for w in self.path],
            'ratio': self.ratios,
            'lower': self.lower_bounds,
            'upper': [math.nan if u is None else u for u in self.upper_bounds],
        })

    def to_dict(self) -> dict:
        return {
            'zeta': self.zeta.angle,
            'rows': [
                {
                    'n': n,
                    'omega': [complex(w).real, complex(w).imag],
                    'ratio': 'diverged' if math.isinf(r) else r,
                    'lower': low,
                    'upper': up,
                }
                for n, (w, r, low, up) in enumerate(
                    zip(self.path, self.ratios, self.lower_bounds, self.upper_bounds), start=1)
            ],
        }


def ratio_lower_bound(b: SchurFunction, omega: complex, zeta: UnitCirclePoint) -> float:
    """[(1 - |b(w)|)^2 / |1 - conj(w) zeta|^2] * [(|w| - |b(w)|)^2 / (1 - |b(w)|^2)]"""
    modulus = abs(complex(b(omega)))
    gap = abs(1.0 - np.conj(omega) * zeta.point) ** 2
    return (1.0 - modulus) ** 2 / gap * (abs(omega) - modulus) ** 2 / (1.0 - modulus ** 2)


def kernel_upper_bound(kernel: DbrKernel, boundary_kernel: DbrKernel, zeta: UnitCirclePoint,
                       quad: QuadratureConfig) -> float:
    """(|k_w(zeta)| ||c_w|| + ||c_w k_zeta||)^2, bounding D_zeta(k_w)"""
    szego = SzegoKernel(kernel.anchor)
    at_zeta = abs(complex(kernel.boundary(zeta.point)))
    product = h2_norm_sq(ProductFunction((szego, boundary_kernel)), quad)
    return (at_zeta * math.sqrt(szego.norm_sq) + math.sqrt(product)) ** 2


def ratio_sweep(b: SchurFunction, zeta: UnitCirclePoint, path: Optional[Sequence[complex]] = None,
                quad: Optional[QuadratureConfig] = None, require_boundary_kernel: bool = True) -> RatioSweep:
    """Rayleigh ratios of H(b) kernels in D_zeta along ``path`` (radial toward zeta by default).

    Without a unimodular radial limit at zeta the boundary kernel does not
    exist and BoundaryValueMissing is raised, unless
    ``require_boundary_kernel`` is off: then the sweep runs without upper
    bounds and reports the Dirichlet integrals directly.
    """
    quad = quad or QuadratureConfig.from_settings()
    path = list(path) if path is not None else default_path(zeta)
    try:
        boundary_kernel = DbrKernel(b, zeta)
    except BoundaryValueMissing:
        if require_boundary_kernel:
            raise
        logger.warning(f"no boundary kernel at angle {zeta.angle:.6f}; reporting direct Dirichlet integrals")
        boundary_kernel = None

    dirichlet, norms, lower, upper = [], [], [], []
    for n, omega in enumerate(path, start=1):
        omega = complex(omega)
        kernel = DbrKernel(b, omega)
        local = local_dirichlet_douglas(kernel, zeta, quad)
        dirichlet.append(local.value)
        norms.append(kernel.norm_sq)
        lower.append(ratio_lower_bound(b, omega, zeta))
        upper.append(None if boundary_kernel is None else kernel_upper_bound(kernel, boundary_kernel, zeta, quad))
        logger.debug(f"sweep point {n}: omega={omega:.6g}, D={local.value:.6g}, norm={kernel.norm_sq:.6g}")
    sweep = RatioSweep(zeta, path, dirichlet, norms, lower, upper)
    logger.info(f"ratio sweep at angle {zeta.angle:.6f}: max ratio {sweep.max_ratio:.6g}")
    return sweep


@dataclass
class EmbeddingReport:
    verdict: str
    constant: float
    evidence: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            'verdict': self.verdict,
            'constant': 'unbounded' if math.isinf(self.constant) else self.constant,
            'evidence': self.evidence,
            'metadata': self.metadata,
        }


def embedding_report(b: SchurFunction, zeta: UnitCirclePoint, quad: Optional[QuadratureConfig] = None,
                     path: Optional[Sequence[complex]] = None, threshold: Optional[float] = None) -> EmbeddingReport:
    """Embeds (finite-dimensional certificate), FailsToEmbed (ratio explosion) or Inconclusive"""
    threshold = threshold or _explosion_threshold()
    metadata = {'zeta': zeta.angle, 'threshold': threshold}
    if b.is_finite_blaschke and b.blaschke is not None and b.blaschke.degree:
        constant = embedding_constant(b.blaschke, zeta)
        return EmbeddingReport('Embeds', constant, {'operator_norm_sq': constant - 1.0}, metadata)
    sweep = ratio_sweep(b, zeta, path, quad, require_boundary_kernel=False)
    evidence = {'sweep': sweep.to_dict(), 'max_ratio': sweep.max_ratio}
    if sweep.max_ratio > threshold:
        evidence['first_exceeding'] = sweep.first_exceeding(threshold)
        return EmbeddingReport('FailsToEmbed', math.inf, evidence, metadata)
    return EmbeddingReport('Inconclusive', sweep.max_ratio, evidence, metadata)


@dataclass
class SeparatedBound:
    lhs: float
    rhs: float
    holds: bool
    delta: float
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            'lhs': 'diverged' if math.isinf(self.lhs) else self.lhs,
            'rhs': self.rhs,
            'holds': self.holds,
            'delta': 'infinite' if math.isinf(self.delta) else self.delta,
            **self.details,
        }


def _derivative_max_outside(f: AnalyticFunction, spectrum, delta: float, quad: QuadratureConfig) -> float:
    """max |f'| over the closed disk minus the delta/2-neighbourhood of the spectrum"""
    radii = np.concatenate([np.linspace(0.0, 0.9, 10), 1.0 - 2.0 ** -np.arange(4, 31), [1.0]])
    angles = [uniform_angles(2 * quad.circle_samples)]
    if math.isfinite(delta):
        # oversample around the edge of the excluded neighbourhood
        reach = 2.0 * math.asin(min(delta / 4.0, 1.0))
        for edge in spectrum.boundary_angles():
            angles.append(edge + reach * np.linspace(-2.0, 2.0, 257))
    angles = np.concatenate(angles)
    z = radii[:, None] * np.exp(1j * angles)[None, :]
    keep = spectrum.distance_from_disk(z) >= delta / 2.0 if math.isfinite(delta) else np.ones(z.shape, bool)
    points = z[keep]
    try:
        slopes = np.abs(np.asarray(f.derivative(points)))
    except TooCloseToBoundary:
        points = points[np.abs(points) <= 1.0 - quad.outer_margin]
        slopes = np.abs(np.asarray(f.derivative(points)))
    return float(np.max(slopes)) if slopes.size else 0.0


def separated_embedding_bound(u: SchurFunction, mu: BoundaryMeasure, f: AnalyticFunction,
                              quad: Optional[QuadratureConfig] = None, tol: float = 1e-6) -> SeparatedBound:
    """D_mu(f) <= (8 / delta^2) mu(T) ||f||^2 + max |f'|^2 mu(T) for supp(mu) at distance delta from sigma(u).

    The first term is absent when the spectrum is empty (delta infinite).
    """
    quad = quad or QuadratureConfig.from_settings()
    if not u.is_inner:
        raise ValueError("separated embedding bound is stated for inner functions")
    spectrum = boundary_spectrum(u, quad)
    delta = support_distance(mu, spectrum, quad)
    if delta == 0:
        raise SeparationViolated("the support of mu meets the spectrum")
    mass = mu.total_mass(quad)
    lhs = weighted_dirichlet(f, mu, quad)
    norm = h2_norm_sq(f, quad)
    slope = _derivative_max_outside(f, spectrum, delta, quad)
    first = 0.0 if math.isinf(delta) else 8.0 / delta ** 2 * mass * norm
    rhs = first + slope ** 2 * mass
    holds = lhs.finite and lhs.value <= rhs + tol * max(1.0, rhs)
    logger.info(f"separated bound: lhs={lhs.value:.6g}, rhs={rhs:.6g}, delta={delta:.4g}, holds={holds}")
    details = {'mass': mass, 'h2_norm_sq': norm, 'max_derivative': slope, 'method': lhs.method}
    return SeparatedBound(lhs.value, rhs, holds, delta, details)


def quadratic_potential(mu: BoundaryMeasure, omega, quad: Optional[QuadratureConfig] = None) -> IntegralResult:
    """integral of |lambda - w|^-2 d mu(lambda) for w in the closed disk"""
    quad = quad or QuadratureConfig.from_settings()
    on_circle = isinstance(omega, UnitCirclePoint)
    point = omega.point if on_circle else complex(omega)
    if on_circle and mu.mass_at(omega) > 0:
        return IntegralResult.divergent('potential', (), None, reason='atom at the evaluation point')
    if on_circle and mu.lebesgue > 0:
        return IntegralResult.divergent('potential', (), None, reason='Lebesgue part at the evaluation point')
    if not on_circle and abs(point) >= 1:
        raise ValueError("potential is evaluated on the closed disk")
    total = sum(m / abs(p.point - point) ** 2 for p, m in mu.atoms)
    if mu.lebesgue:
        total += mu.lebesgue / (1.0 - abs(point) ** 2)
    evidence = (total,)
    if mu.density is not None:
        rho = abs(point)
        alpha = math.atan2(point.imag, point.real) % TWO_PI if rho > 0 else 0.0
        levels = quad.radial_levels
        if not on_circle and rho > 0.75:
            levels = max(levels, int(math.ceil(math.log2(math.pi / (1.0 - rho)))) + 8)
        rule = circle_rule(quad, center=alpha, center_depth=levels, breakpoints=mu.breakpoints())
        gap = (1.0 - rho) ** 2 + 4.0 * rho * np.sin(rule.offsets / 2.0) ** 2
        contributions = rule.weights * mu.density(rule.angles) / gap
        sums = shell_sums(contributions, rule, levels)
        diverged, exponent = assess_growth(sums)
        if diverged:
            return IntegralResult.divergent('potential', sums, exponent)
        total += float(sums[-1])
        evidence = tuple(total - float(sums[-1]) + s for s in sums)
    return IntegralResult(float(total), 'potential', evidence)


def compactness_classifier(u: SchurFunction) -> str:
    """CompactEmbedding exactly when K_u is finite dimensional"""
    if not u.is_inner:
        raise ValueError("compactness is classified for inner functions only")
    return 'CompactEmbedding' if u.is_finite_blaschke else 'NotCompact'


def kernel_norm_equality_check(b: SchurFunction, zeta: UnitCirclePoint, omega: complex,
                               quad: Optional[QuadratureConfig] = None) -> dict:
    """||k_w||^2_{H^2} + D_zeta(k_w) against k^b(w, w)"""
    quad = quad or QuadratureConfig.from_settings()
    kernel = DbrKernel(b, complex(omega))
    h2 = h2_norm_sq(kernel, quad)
    local = local_dirichlet_douglas(kernel, zeta, quad)
    total = h2 + local.value
    return {
        'h2_norm_sq': h2,
        'dirichlet': local.value,
        'total': total,
        'kernel_norm_sq': kernel.norm_sq,
        'relative_gap': abs(total - kernel.norm_sq) / kernel.norm_sq,
    }


def inclusion_criterion_ratio(b2: SchurFunction, b1: SchurFunction, point: UnitCirclePoint) -> float:
    """(1 - |b2(lambda)|^2) / (1 - |b1(lambda)|^2) from boundary moduli"""
    def defect(b):
        if isinstance(b, SchurFunction):
            return float(-np.expm1(2.0 * b.boundary_log_modulus(point.angle)))
        return 1.0 - abs(complex(b.boundary(point.point))) ** 2
    denominator = defect(b1)
    if denominator <= 0:
        raise BoundaryValueMissing(f"|b1| = 1 at angle {point.angle:.6g}")
    return defect(b2) / denominator

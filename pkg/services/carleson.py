"""Carleson boxes, Carleson constants and multiplier tests"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from services.dirichlet import local_dirichlet_douglas
from services.disk_functions import AnalyticFunction, BlaschkeProduct, ProductFunction, UnitCirclePoint
from services.exceptions import QuadratureDiverged
from services.kernels import TakenakaBasis
from services.measures import BoundaryMeasure
from services.quadrature import (
    TWO_PI,
    QuadratureConfig,
    assess_growth,
    circle_rule,
    gauss_jacobi,
    shell_sums,
    uniform_angles,
    wrap_angle,
)

logger = logging.getLogger(__name__)

UNIFORM_CENTERS = 64
GROWTH_WINDOW = 5
BOX_GROWTH_EXPONENT = 0.25
SUP_GROWTH_EXPONENT = 0.1
HINF_LEVELS = 20
RAY_ORDER = 64


def default_delta_grid() -> list:
    return [2.0 ** -k for k in range(0, 21)]


@dataclass(frozen=True)
class CarlesonBox:
    """S(I) = {r e^{it}: e^{it} in I, 1 - |I| < r < 1} for the arc I of given center and length"""

    center: float
    length: float

    def __post_init__(self):
        if not 0 < self.length <= TWO_PI:
            raise ValueError(f"arc length must lie in (0, 2 pi], got {self.length}")

    @property
    def radial_floor(self) -> float:
        return 1.0 - self.length

    def contains_angle(self, angle) -> np.ndarray:
        if self.length >= TWO_PI:
            return np.ones(np.shape(angle), dtype=bool)
        return np.abs(wrap_angle(np.asarray(angle) - self.center)) <= self.length / 2.0

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        radius = np.abs(z)
        # the origin lies in every box reaching below radius zero
        angular = np.where(radius > 0, self.contains_angle(np.angle(z)), True)
        return (radius > self.radial_floor) & (radius < 1.0) & angular


class DiskMeasure:
    """Finite positive measure on the open disk"""

    def box_mass(self, box: CarlesonBox) -> float:
        raise NotImplementedError

    def discretize(self, quad: QuadratureConfig):
        """(points, weights) integrating smooth functions against the measure"""
        raise NotImplementedError

    def reweighted(self, zeta: UnitCirclePoint):
        """The measure |z - zeta|^2 d nu"""
        raise NotImplementedError

    def landmarks(self) -> tuple:
        return ()

    def total_mass(self) -> float:
        return self.box_mass(CarlesonBox(0.0, TWO_PI))


class PowerLawRayMeasure(DiskMeasure):
    """coefficient * (1 - s)^exponent ds on the segment s e^{i angle}, 0 <= s < 1"""

    def __init__(self, angle: float = 0.0, exponent: float = -0.5, coefficient: float = 1.0,
                 weight_center: Optional[UnitCirclePoint] = None):
        if exponent <= -1:
            raise ValueError("ray density exponent must exceed -1")
        if coefficient <= 0:
            raise ValueError("ray density coefficient must be positive")
        self.angle = float(angle) % TWO_PI
        self.exponent = float(exponent)
        self.coefficient = float(coefficient)
        self.weight_center = weight_center

    def _reach(self, box: CarlesonBox) -> float:
        if not box.contains_angle(self.angle):
            return 0.0
        return min(box.length, 1.0)

    def box_mass(self, box):
        """Closed form of the box mass"""
        ell = self._reach(box)
        if ell == 0:
            return 0.0
        p = self.exponent
        if self.weight_center is None:
            return self.coefficient * ell ** (p + 1) / (p + 1)
        c = math.cos(self.angle - self.weight_center.angle)
        # |z - zeta|^2 = 2(1 - c) - 2(1 - c) t + t^2 with t = 1 - s
        return self.coefficient * (
            2.0 * (1.0 - c) * ell ** (p + 1) / (p + 1)
            - 2.0 * (1.0 - c) * ell ** (p + 2) / (p + 2)
            + ell ** (p + 3) / (p + 3)
        )

    def _segment_rule(self, ell: float, order: int = RAY_ORDER):
        """Nodes t in (0, ell) and weights for the weight t^exponent"""
        x, w = gauss_jacobi(order, 0.0, self.exponent)
        t = ell * (1.0 + x) / 2.0
        return t, w * (ell / 2.0) ** (self.exponent + 1)

    def box_mass_quadrature(self, box: CarlesonBox) -> float:
        """Same box mass by Gauss-Jacobi integration along the ray"""
        ell = self._reach(box)
        if ell == 0:
            return 0.0
        t, w = self._segment_rule(ell)
        z = (1.0 - t) * np.exp(1j * self.angle)
        return float(self.coefficient * np.sum(w * self._weight(z)))

    def _weight(self, z):
        if self.weight_center is None:
            return np.ones(np.shape(z))
        return np.abs(z - self.weight_center.point) ** 2

    def discretize(self, quad):
        t, w = self._segment_rule(1.0)
        z = (1.0 - t) * np.exp(1j * self.angle)
        return z, self.coefficient * w * self._weight(z)

    def reweighted(self, zeta):
        if self.weight_center is not None:
            raise ValueError("ray measure is already reweighted")
        return PowerLawRayMeasure(self.angle, self.exponent, self.coefficient, zeta)

    def landmarks(self):
        return (self.angle,)

    def to_spec(self) -> dict:
        spec = {'kind': 'ray', 'angle': self.angle, 'exponent': self.exponent, 'coefficient': self.coefficient}
        if self.weight_center is not None:
            spec['weight_center'] = self.weight_center.angle
        return spec


class DiskAtoms(DiskMeasure):
    def __init__(self, points, masses):
        points = np.atleast_1d(np.asarray(points, dtype=complex))
        masses = np.atleast_1d(np.asarray(masses, dtype=float))
        if points.shape != masses.shape:
            raise ValueError("disk atoms need one mass per point")
        if np.any(np.abs(points) >= 1) or np.any(masses <= 0):
            raise ValueError("disk atoms must lie in the open disk with positive masses")
        self.points = points
        self.masses = masses

    def box_mass(self, box):
        return float(np.sum(self.masses[box.contains(self.points)]))

    def discretize(self, quad):
        return self.points, self.masses

    def reweighted(self, zeta):
        return DiskAtoms(self.points, self.masses * np.abs(self.points - zeta.point) ** 2)

    def landmarks(self):
        return tuple(float(a) % TWO_PI for a in np.angle(self.points[np.abs(self.points) > 0]))

    def to_spec(self) -> dict:
        return {'kind': 'atoms', 'points': [[p.real, p.imag] for p in self.points], 'masses': self.masses.tolist()}


class PushedBoundaryDensity(DiskMeasure):
    """A boundary measure transported to the circle of radius 1 - epsilon"""

    def __init__(self, measure: BoundaryMeasure, epsilon: float, quad: Optional[QuadratureConfig] = None,
                 weight_center: Optional[UnitCirclePoint] = None):
        if not 0 < epsilon < 1:
            raise ValueError("push-in distance must lie in (0, 1)")
        self.measure = measure
        self.epsilon = float(epsilon)
        self.quad = quad or QuadratureConfig.from_settings()
        self.weight_center = weight_center

    def _weight(self, z):
        if self.weight_center is None:
            return np.ones(np.shape(z))
        return np.abs(z - self.weight_center.point) ** 2

    def discretize(self, quad=None):
        quad = quad or self.quad
        radius = 1.0 - self.epsilon
        points, weights = [], []
        for p, m in self.measure.atoms:
            points.append(radius * p.point)
            weights.append(m)
        if self.measure.density is not None or self.measure.lebesgue:
            rule = circle_rule(quad, breakpoints=self.measure.breakpoints())
            density = np.full(rule.size, self.measure.lebesgue)
            if self.measure.density is not None:
                density = density + self.measure.density(rule.angles)
            points.extend(radius * rule.points)
            weights.extend(rule.weights * density)
        points = np.asarray(points, dtype=complex)
        return points, np.asarray(weights, dtype=float) * self._weight(points)

    def box_mass(self, box):
        if self.epsilon >= box.length:
            return 0.0
        points, weights = self.discretize()
        return float(np.sum(weights[box.contains_angle(np.angle(points))]))

    def reweighted(self, zeta):
        return PushedBoundaryDensity(self.measure, self.epsilon, self.quad, zeta)

    def landmarks(self):
        points, arcs = self.measure.support(self.quad)
        return tuple(p.angle for p in points) + tuple(a % TWO_PI for arc in arcs for a in arc)

    def to_spec(self) -> dict:
        return {'kind': 'pushed', 'measure': self.measure.to_spec(), 'epsilon': self.epsilon}


def box_measure(nu: DiskMeasure, box: CarlesonBox) -> float:
    return nu.box_mass(box)


@dataclass
class CarlesonVerdict:
    carleson: object
    constant: float
    argmax: dict
    level_sups: list
    growth_exponent: Optional[float] = None
    certificates: dict = field(default_factory=dict)

    @property
    def bounded(self) -> bool:
        return self.carleson is True

    def to_dict(self) -> dict:
        return {
            'carleson': self.carleson,
            'constant': 'unbounded' if math.isinf(self.constant) else self.constant,
            'argmax': self.argmax,
            'certificates': {**self.certificates, 'level_sups': self.level_sups,
                             'growth_exponent': self.growth_exponent},
        }


def _fitted_exponent(lengths, sups) -> float:
    """Slope of log(sup ratio) against log(1/|I|)"""
    x = np.log(1.0 / np.asarray(lengths))
    y = np.log(np.maximum(np.asarray(sups), 1e-300))
    if np.ptp(x) == 0:
        return 0.0
    return float(np.polyfit(x, y, 1)[0])


def carleson_constant_h2(nu: DiskMeasure, delta_grid: Optional[Sequence[float]] = None) -> CarlesonVerdict:
    """sup of nu(S(I)) / |I| over the arc-length grid, with an Unbounded flag on sustained growth"""
    grid = sorted(delta_grid or default_delta_grid(), reverse=True)
    if not grid:
        raise ValueError("arc-length grid must not be empty")
    centers = tuple(nu.landmarks()) + tuple(uniform_angles(UNIFORM_CENTERS))
    sups, best = [], {'center': 0.0, 'length': grid[0], 'ratio': 0.0}
    for length in grid:
        level = 0.0
        for center in centers:
            ratio = nu.box_mass(CarlesonBox(float(center), length)) / length
            if ratio > level:
                level = ratio
            if ratio > best['ratio']:
                best = {'center': float(center), 'length': length, 'ratio': ratio}
        sups.append(level)
    tail = sups[-GROWTH_WINDOW:]
    exponent = _fitted_exponent(grid[-GROWTH_WINDOW:], tail) if len(tail) == GROWTH_WINDOW else None
    increasing = len(tail) == GROWTH_WINDOW and all(b > a for a, b in zip(tail[:-1], tail[1:]))
    if increasing and exponent is not None and exponent >= BOX_GROWTH_EXPONENT:
        logger.info(f"Carleson ratios grow like |I|^-{exponent:.3f}: unbounded")
        return CarlesonVerdict('unbounded', math.inf, best, sups, exponent, {'max_observed': best['ratio']})
    return CarlesonVerdict(True, max(sups), best, sups, exponent)


def is_carleson_for_dz(nu: DiskMeasure, zeta: UnitCirclePoint,
                       delta_grid: Optional[Sequence[float]] = None) -> CarlesonVerdict:
    """Carleson test of |z - zeta|^2 d nu"""
    verdict = carleson_constant_h2(nu.reweighted(zeta), delta_grid)
    verdict.certificates['zeta'] = zeta.angle
    return verdict


@dataclass
class MultiplierVerdict:
    result: bool
    certificates: dict = field(default_factory=dict)

    def __bool__(self):
        return self.result

    def to_dict(self) -> dict:
        return {'multiplier': self.result, 'certificates': self.certificates}


def sup_norm_test(phi: AnalyticFunction, quad: QuadratureConfig, levels: int = HINF_LEVELS) -> dict:
    """sup |phi| on circles of radius 1 - 2^-j; unbounded on sustained power growth"""
    angles = np.concatenate([
        uniform_angles(2 * quad.circle_samples),
        np.array([s.angle for s in phi.hot_spots()], dtype=float),
    ])
    points = np.exp(1j * angles)
    sups = []
    for j in range(1, levels + 1):
        sups.append(float(np.max(np.abs(phi((1.0 - 2.0 ** -j) * points)))))
    tail = sups[-GROWTH_WINDOW:]
    exponent = float(np.polyfit(np.arange(GROWTH_WINDOW), np.log2(np.maximum(tail, 1e-300)), 1)[0])
    increasing = all(b > a for a, b in zip(tail[:-1], tail[1:]))
    bounded = not (increasing and exponent >= SUP_GROWTH_EXPONENT)
    return {'bounded': bounded, 'sup': max(sups), 'level_sups': sups, 'growth_exponent': exponent}


def is_multiplier_of_dz(phi: AnalyticFunction, zeta: UnitCirclePoint,
                        quad: Optional[QuadratureConfig] = None) -> MultiplierVerdict:
    """phi multiplies D_zeta iff phi is bounded and D_zeta(phi) is finite"""
    quad = quad or QuadratureConfig.from_settings()
    sup = sup_norm_test(phi, quad)
    local = local_dirichlet_douglas(phi, zeta, quad)
    result = sup['bounded'] and local.finite
    logger.info(f"multiplier of D_zeta at {zeta.angle:.6f}: {result} (sup {sup['sup']:.4g}, D {local.value:.4g})")
    return MultiplierVerdict(result, {'sup_norm': sup, 'dirichlet': local.to_dict()})


def _boundary_mass_diverges(phi: AnalyticFunction, quad: QuadratureConfig) -> bool:
    """Non-integrability of |phi|^2 near its boundary singularities"""
    for spot in phi.hot_spots():
        if spot.scale > 0:
            continue
        rule = circle_rule(quad, center=spot.angle, center_depth=quad.radial_levels)
        values = np.abs(np.asarray(phi.boundary(rule.points))) ** 2
        if not np.all(np.isfinite(values)):
            return True
        diverged, _ = assess_growth(shell_sums(rule.weights * values, rule, quad.radial_levels))
        if diverged:
            return True
    return False


def _distinct(zeros: np.ndarray) -> bool:
    gaps = np.abs(zeros[:, None] - zeros[None, :]) + np.eye(zeros.size)
    return bool(np.all(gaps > 1e-12))


def is_multiplier_ku_to_dz(phi: AnalyticFunction, blaschke: BlaschkeProduct, zeta: UnitCirclePoint,
                           quad: Optional[QuadratureConfig] = None) -> MultiplierVerdict:
    """phi maps K_B into D_zeta iff |phi|^2 dm is Carleson for K_B and phi lies in D_zeta"""
    quad = quad or QuadratureConfig.from_settings()
    if not _distinct(blaschke.zeros):
        raise ValueError("multiplier test expects distinct Blaschke zeros")
    basis = TakenakaBasis(blaschke)
    if _boundary_mass_diverges(phi, quad):
        logger.warning("|phi|^2 is not integrable on the circle")
        constant = math.inf
    else:
        rule = circle_rule(quad, hot_spots=tuple(phi.hot_spots()) + blaschke.hot_spots(),
                           breakpoints=tuple(phi.breakpoints()))
        weight = np.abs(np.asarray(phi.boundary(rule.points))) ** 2
        if not np.all(np.isfinite(weight)):
            raise QuadratureDiverged("|phi|^2 is not finite on the quadrature nodes")
        values = basis.evaluate(rule.points)
        gram = (np.conj(values) * (rule.weights * weight)[None, :]) @ values.T
        constant = float(linalg.eigvalsh((gram + gram.conj().T) / 2.0)[-1])
    local = local_dirichlet_douglas(phi, zeta, quad)
    result = math.isfinite(constant) and local.finite
    logger.info(f"multiplier K_B -> D_zeta: {result} (Carleson constant {constant:.4g}, D {local.value:.4g})")
    return MultiplierVerdict(result, {
        'carleson_constant': 'unbounded' if math.isinf(constant) else constant,
        'dirichlet': local.to_dict(),
    })


def model_space_carleson_constant(nu: DiskMeasure, blaschke: BlaschkeProduct,
                                  quad: Optional[QuadratureConfig] = None) -> float:
    """Largest eigenvalue of G[j][k] = integral of e_k conj(e_j) d nu over the Takenaka basis"""
    quad = quad or QuadratureConfig.from_settings()
    basis = TakenakaBasis(blaschke)
    points, weights = nu.discretize(quad)
    values = basis.evaluate(points)
    gram = (np.conj(values) * weights[None, :]) @ values.T
    return float(linalg.eigvalsh((gram + gram.conj().T) / 2.0)[-1])


def model_space_dz_constant(nu: DiskMeasure, blaschke: BlaschkeProduct, zeta: UnitCirclePoint,
                            quad: Optional[QuadratureConfig] = None) -> float:
    """Constant C with integral |f|^2 d nu <= C (||f||^2 + D_zeta(f)) on K_B.

    Splitting f = f(zeta) + (z - zeta) g keeps g in K_B with ||g||^2 = D_zeta(f),
    and |f(zeta)|^2 <= 2 (||f||^2 + D_zeta(f)), so C = 4 nu(D) + 2 C' where C'
    is the model-space constant of |z - zeta|^2 d nu.
    """
    reweighted = model_space_carleson_constant(nu.reweighted(zeta), blaschke, quad)
    return 4.0 * nu.total_mass() + 2.0 * reweighted


def multiplier_bound(phi: AnalyticFunction, f: AnalyticFunction, zeta: UnitCirclePoint,
                     carleson_constant: float, phi_dirichlet: float,
                     quad: Optional[QuadratureConfig] = None, tol: float = 1e-6) -> dict:
    """D_zeta(phi f) against 2 (C D_zeta(f) + |f(zeta)|^2 D_zeta(phi)) for f in K_B"""
    quad = quad or QuadratureConfig.from_settings()
    product = local_dirichlet_douglas(ProductFunction((phi, f)), zeta, quad)
    local = local_dirichlet_douglas(f, zeta, quad)
    at_zeta = abs(complex(f.boundary(zeta.point)))
    rhs = 2.0 * (carleson_constant * local.value + at_zeta ** 2 * phi_dirichlet)
    return {
        'lhs': product.value,
        'rhs': rhs,
        'holds': product.finite and product.value <= rhs + tol * max(1.0, rhs),
    }

"""H^2 norms and local / harmonically weighted Dirichlet integrals.

Three independent routes compute the local Dirichlet integral D_zeta(f):

* ``douglas``: circle integral of |(f(lambda) - f(zeta)) / (lambda - zeta)|^2
* ``area``: (1/pi) * integral of |f'|^2 (1 - |z|^2) / |z - zeta|^2 dA
* ``decomposition``: ||g||^2 in H^2 where f = f(zeta) + (z - zeta) g

Divergence is a result, not an error: partial sums over dyadic shells
or radial levels are classified by ``assess_growth``.
"""
import logging
import math
from typing import Optional

import numpy as np

from services.disk_functions import (
    AnalyticFunction,
    NoLimit,
    UnitCirclePoint,
    radial_boundary_value,
)
from services.exceptions import AtomEvaluation, QuadratureDiverged, TooCloseToBoundary
from services.measures import BoundaryMeasure
from services.quadrature import (
    HotSpot,
    IntegralResult,
    QuadratureConfig,
    area_levels,
    assess_growth,
    circle_rule,
    shell_sums,
)

logger = logging.getLogger(__name__)

DirichletResult = IntegralResult

MAX_SHELLS = 50
SHELL_MARGIN = 12
# Independent routes agree within max(1e-3 * value, 1e-4) unless the config asks for more slack
ROUTE_REL_FLOOR = 1e-3
ROUTE_ABS_FLOOR = 1e-4


def _config(quad: Optional[QuadratureConfig]) -> QuadratureConfig:
    return quad or QuadratureConfig.from_settings()


def routes_agree(values, quad: Optional[QuadratureConfig] = None) -> bool:
    """Pairwise agreement of finite route values within the configured tolerance"""
    quad = _config(quad)
    values = [float(v) for v in values]
    if any(math.isinf(v) for v in values):
        return all(math.isinf(v) for v in values)
    if len(values) < 2:
        return True
    tol = quad.agreement_tolerance(max(values, key=abs), ROUTE_REL_FLOOR, ROUTE_ABS_FLOOR)
    return max(values) - min(values) <= tol


def _shell_depth(f: AnalyticFunction, quad: QuadratureConfig) -> int:
    scales = [s.scale for s in f.hot_spots() if s.scale > 0]
    depth = quad.radial_levels
    if scales:
        depth = max(depth, int(math.ceil(math.log2(1.0 / min(scales)))) + SHELL_MARGIN)
    return min(depth, MAX_SHELLS)


def _shell_result(contributions: np.ndarray, rule, levels: int, method: str, **details) -> IntegralResult:
    if not np.all(np.isfinite(contributions)):
        return IntegralResult.divergent(method, (), None, reason='non-finite integrand', **details)
    sums = shell_sums(contributions, rule, levels)
    diverged, exponent = assess_growth(sums)
    if diverged:
        logger.warning(f"{method}: shell sums grow with exponent {exponent:.3f}")
        return IntegralResult.divergent(method, sums, exponent, **details)
    return IntegralResult(float(sums[-1]), method, tuple(float(s) for s in sums), exponent, details)


def _radial_h2(f: AnalyticFunction, quad: QuadratureConfig, method: str) -> IntegralResult:
    """Circle means of |f(r lambda)|^2 along r = 1 - q^-k, Aitken-extrapolated"""
    means = []
    for k in range(1, quad.radial_levels + 1):
        r = 1.0 - quad.level_scale(k)
        rule = circle_rule(quad, hot_spots=tuple(
            HotSpot(s.angle, max(s.scale, 1.0 - r), s.oscillation) for s in f.hot_spots()
        ))
        try:
            values = np.asarray(f(r * rule.points))
        except TooCloseToBoundary:
            break
        means.append(float(np.sum(rule.weights * np.abs(values) ** 2)))
    if len(means) < 3:
        raise QuadratureDiverged("too few radial levels to extrapolate the H^2 norm")
    diverged, exponent = assess_growth(means)
    if diverged:
        return IntegralResult.divergent(method, means, exponent)
    a, b, c = means[-3:]
    denom = (c - b) - (b - a)
    value = c - (c - b) ** 2 / denom if abs(denom) > 1e-300 else c
    return IntegralResult(float(value), method, tuple(means), exponent)


def h2_norm_result(f: AnalyticFunction, quad: Optional[QuadratureConfig] = None,
                   center: Optional[UnitCirclePoint] = None, method: str = 'h2') -> IntegralResult:
    quad = _config(quad)
    exact = f.exact_h2_norm_sq()
    if exact is not None:
        return IntegralResult(float(exact), method, (float(exact),))
    if center is None:
        edges = [s for s in f.hot_spots() if s.scale == 0]
        if edges:
            center = UnitCirclePoint(edges[0].angle)
    levels = _shell_depth(f, quad)
    rule = circle_rule(
        quad,
        center=center.angle if center is not None else 0.0,
        center_depth=levels if center is not None else 0,
        hot_spots=tuple(f.hot_spots()),
        breakpoints=tuple(f.breakpoints()),
    )
    try:
        values = np.asarray(f.boundary(rule.points))
    except (TooCloseToBoundary, AtomEvaluation) as exc:
        logger.info(f"boundary values unavailable ({exc}); using radial means")
        return _radial_h2(f, quad, method)
    contributions = rule.weights * np.abs(values) ** 2
    if center is None:
        if not np.all(np.isfinite(contributions)):
            return IntegralResult.divergent(method, (), None, reason='non-finite integrand')
        value = float(np.sum(contributions))
        return IntegralResult(value, method, (value,))
    return _shell_result(contributions, rule, levels, method)


def h2_norm_sq(f: AnalyticFunction, quad: Optional[QuadratureConfig] = None) -> float:
    """||f||^2 in H^2"""
    result = h2_norm_result(f, quad)
    if result.diverged:
        raise QuadratureDiverged(f"H^2 norm of {f!r} does not stabilize")
    return result.value


def _boundary_value_or_none(f: AnalyticFunction, zeta: UnitCirclePoint):
    value = radial_boundary_value(f, zeta)
    if isinstance(value, NoLimit):
        logger.warning(f"no boundary value at angle {zeta.angle:.6f}; Dirichlet integral is infinite")
        return None
    return value


def local_dirichlet_douglas(f: AnalyticFunction, zeta: UnitCirclePoint,
                            quad: Optional[QuadratureConfig] = None) -> DirichletResult:
    """D_zeta(f) by the local Douglas formula"""
    quad = _config(quad)
    value = _boundary_value_or_none(f, zeta)
    if value is None:
        return IntegralResult.divergent('douglas', (), None, reason='no boundary value')
    levels = _shell_depth(f, quad)
    rule = circle_rule(
        quad,
        center=zeta.angle,
        center_depth=levels,
        hot_spots=tuple(f.hot_spots()),
        breakpoints=tuple(f.breakpoints()),
    )
    values = np.asarray(f.boundary(rule.points))
    quotient = np.abs(values - value) ** 2 / np.abs(rule.chords()) ** 2
    result = _shell_result(rule.weights * quotient, rule, levels, 'douglas', boundary_value=value)
    logger.debug(f"douglas at {zeta.angle:.6f}: {result.value} over {rule.size} nodes")
    return result


def local_dirichlet_decomposition(f: AnalyticFunction, zeta: UnitCirclePoint,
                                  quad: Optional[QuadratureConfig] = None) -> DirichletResult:
    """D_zeta(f) = ||g||^2 for f = f(zeta) + (z - zeta) g"""
    quad = _config(quad)
    value = _boundary_value_or_none(f, zeta)
    if value is None:
        return IntegralResult.divergent('decomposition', (), None, reason='no boundary value')
    g = f.divided_difference(zeta, value)
    return h2_norm_result(g, quad, center=zeta, method='decomposition')


def _tail(partial) -> float:
    """Geometric tail beyond the last radial level"""
    if len(partial) < 3:
        return 0.0
    last, before = partial[-1] - partial[-2], partial[-2] - partial[-3]
    if last <= 0 or before <= 0:
        return 0.0
    ratio = last / before
    return last * ratio / (1.0 - ratio) if ratio < 0.9 else 0.0


def _area_integral(f: AnalyticFunction, quad: QuadratureConfig, weight, method: str,
                   center: float = 0.0, graded_center: bool = False, breakpoints=()) -> IntegralResult:
    """(1/pi) * integral of |f'|^2 * weight dA over dyadic radial levels"""
    partial = []
    total = 0.0
    for level, radii, radial_weights, rule in area_levels(
        quad,
        center=center,
        graded_center=graded_center,
        hot_spots=tuple(f.hot_spots()),
        breakpoints=tuple(f.breakpoints()) + tuple(breakpoints),
    ):
        z = radii[:, None] * rule.points[None, :]
        slope = np.asarray(f.derivative(z))
        if not np.all(np.isfinite(slope)):
            raise QuadratureDiverged(f"{method}: non-finite derivative at radial level {level}")
        density = weight(level, radii, rule)
        total += float(np.sum(radial_weights[:, None] * rule.weights[None, :] * np.abs(slope) ** 2 * density))
        partial.append(total)
    diverged, exponent = assess_growth(partial)
    if diverged:
        logger.warning(f"{method}: radial levels grow with exponent {exponent:.3f}")
        return IntegralResult.divergent(method, partial, exponent)
    return IntegralResult(total + _tail(partial), method, tuple(partial), exponent)


def _local_weight(level, radii, rule):
    r = radii[:, None]
    half = np.sin(rule.offsets / 2.0)[None, :]
    return (1.0 - r ** 2) / ((1.0 - r) ** 2 + 4.0 * r * half ** 2)


def local_dirichlet_area(f: AnalyticFunction, zeta: UnitCirclePoint,
                         quad: Optional[QuadratureConfig] = None) -> DirichletResult:
    """D_zeta(f) as a weighted area integral of |f'|^2"""
    return _area_integral(f, _config(quad), _local_weight, 'area', center=zeta.angle, graded_center=True)


def littlewood_paley_integral(f: AnalyticFunction, quad: Optional[QuadratureConfig] = None) -> DirichletResult:
    """(1/pi) * integral of |f'|^2 (1 - |z|^2) dA"""
    return _area_integral(f, _config(quad), lambda level, radii, rule: (1.0 - radii ** 2)[:, None],
                          'littlewood-paley')


def _density_poisson_weight(mu: BoundaryMeasure, quad: QuadratureConfig):
    def weight(level, radii, rule):
        depth = int(math.ceil(math.log2(math.pi / (1.0 - radii.max())))) + 6
        kernel_rule = circle_rule(quad, center_depth=depth)
        t = kernel_rule.offsets
        r = radii[:, None]
        kernel = kernel_rule.weights[None, :] * (1.0 - r ** 2) / (
            (1.0 - r) ** 2 + 4.0 * r * np.sin(t[None, :] / 2.0) ** 2
        )
        density = mu.density(rule.angles[:, None] + t[None, :])
        return kernel @ density.T
    return weight


def _disintegrated(f: AnalyticFunction, density, quad: QuadratureConfig, breakpoints=()) -> IntegralResult:
    """integral of density(lambda) D_lambda(f) dm(lambda) by Douglas at every node"""
    rule = circle_rule(quad, breakpoints=tuple(breakpoints))
    total = 0.0
    weights = rule.weights * density(rule.angles)
    for angle, w in zip(rule.angles, weights):
        if w == 0:
            continue
        local = local_dirichlet_douglas(f, UnitCirclePoint(float(angle)), quad)
        if local.diverged:
            return IntegralResult.divergent('disintegration', local.evidence, local.growth_exponent,
                                            node=float(angle))
        total += w * local.value
    return IntegralResult(float(total), 'disintegration', (float(total),))


def weighted_dirichlet(f: AnalyticFunction, mu: BoundaryMeasure, quad: Optional[QuadratureConfig] = None,
                       method: str = 'auto') -> DirichletResult:
    """D_mu(f): atoms by exact disintegration, absolutely continuous parts by area or disintegration"""
    if method not in ('auto', 'area', 'disintegration'):
        raise ValueError(f"unknown weighted Dirichlet method {method!r}")
    quad = _config(quad)
    total = 0.0
    evidence = []
    exponent = None
    for point, mass in mu.atoms:
        local = local_dirichlet_douglas(f, point, quad)
        if local.diverged:
            return IntegralResult.divergent('disintegration', local.evidence, local.growth_exponent,
                                            atom=point.angle)
        total += mass * local.value
        evidence.append(total)

    tag = 'disintegration'
    if method == 'disintegration':
        if mu.lebesgue:
            part = _disintegrated(f, lambda angles: np.full(np.shape(angles), mu.lebesgue), quad)
            if part.diverged:
                return part
            total += part.value
        if mu.density is not None:
            part = _disintegrated(f, mu.density, quad, mu.breakpoints())
            if part.diverged:
                return part
            total += part.value
        return IntegralResult(float(total), tag, tuple(evidence) + (float(total),))

    if mu.lebesgue:
        tag = 'area'
        part = _area_integral(f, quad, lambda level, radii, rule: np.ones((radii.size, 1)), 'area')
        if part.diverged:
            return part
        base = total
        total += mu.lebesgue * part.value
        exponent = part.growth_exponent
        evidence.extend(base + mu.lebesgue * p for p in part.evidence)
    if mu.density is not None:
        tag = 'area'
        part = _area_integral(f, quad, _density_poisson_weight(mu, quad), 'area', breakpoints=mu.breakpoints())
        if part.diverged:
            return part
        base = total
        total += part.value
        exponent = part.growth_exponent
        evidence.extend(base + p for p in part.evidence)
    logger.info(f"weighted Dirichlet integral ({tag}): {total}")
    return IntegralResult(float(total), tag, tuple(evidence), exponent)

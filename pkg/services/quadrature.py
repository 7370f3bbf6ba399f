"""Circle, disk and segment quadrature shared by the numerical services.

All circle rules integrate against the normalized arc measure dm, so the
weights of a full rule sum to one. Nodes are stored as angular offsets from
a center so that chords to the center can be formed without cancellation.
"""
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import special

from services.exceptions import ConfigError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# Depth (in halvings) of the grading applied below a hot spot's own scale
HOT_SPOT_DEPTH = 12
# Geometric grading used toward hot spots that sit exactly on the circle
EDGE_DEPTH = 40
# Below this multiple of the atom mass, oscillation panels stop tracking phase
OSCILLATION_FLOOR = 1e-4
MAX_OSCILLATION_PANELS = 4000

_SETTING_NAMES = {
    'circle_samples': 'QUADRATURE_CIRCLE_SAMPLES',
    'radial_levels': 'QUADRATURE_RADIAL_LEVELS',
    'gauss_order': 'QUADRATURE_GAUSS_ORDER',
    'refinement_factor': 'QUADRATURE_REFINEMENT_FACTOR',
    'rel_tol': 'QUADRATURE_REL_TOL',
    'abs_tol': 'QUADRATURE_ABS_TOL',
}


@dataclass(frozen=True)
class QuadratureConfig:
    """Grid resolutions, refinement depth and tolerances.

    ``refinement_factor`` is the ratio between successive radial levels:
    level l covers 1 - |z| in [q^-l, q^(1-l)]. ``rel_tol`` and ``abs_tol``
    widen the agreement tolerance between independent routes beyond their
    discretization floor.
    """

    circle_samples: int = 1024
    radial_levels: int = 24
    gauss_order: int = 16
    refinement_factor: int = 2
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12

    def __post_init__(self):
        n = self.circle_samples
        if not isinstance(n, int) or n < 64 or n & (n - 1):
            raise ConfigError("must be a power of two not smaller than 64", field='circle_samples')
        if self.radial_levels < 8:
            raise ConfigError("must be at least 8", field='radial_levels')
        if self.gauss_order < 4:
            raise ConfigError("must be at least 4", field='gauss_order')
        if self.refinement_factor < 2:
            raise ConfigError("must be at least 2", field='refinement_factor')
        if self.radial_levels * math.log2(self.refinement_factor) > 52:
            raise ConfigError(
                f"{self.radial_levels} levels at ratio {self.refinement_factor} fall below double precision",
                field='refinement_factor',
            )
        if self.rel_tol <= 0:
            raise ConfigError("must be positive", field='rel_tol')
        if self.abs_tol <= 0:
            raise ConfigError("must be positive", field='abs_tol')

    @classmethod
    def from_settings(cls, **overrides):
        """Build a config from Django settings, falling back to the defaults"""
        values = {}
        try:
            from django.conf import settings
            if settings.configured:
                for name, setting in _SETTING_NAMES.items():
                    if hasattr(settings, setting):
                        values[name] = getattr(settings, setting)
        except ImportError:
            pass
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @property
    def outer_margin(self) -> float:
        """Distance to the circle below which sampled outer data is unresolved"""
        return 10.0 / self.circle_samples

    def level_scale(self, level: int) -> float:
        """1 - r at the outer edge of radial level ``level``"""
        return float(self.refinement_factor) ** -level

    def agreement_tolerance(self, value: float, rel_floor: float = 0.0, abs_floor: float = 0.0) -> float:
        magnitude = abs(value)
        return max(self.rel_tol * magnitude, self.abs_tol, rel_floor * magnitude, abs_floor)

    def with_overrides(self, **overrides):
        return replace(self, **overrides)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class HotSpot:
    """A boundary angle near which an integrand varies on length ``scale``.

    ``scale == 0`` marks a genuine boundary singularity; ``oscillation`` is
    the mass of a singular inner atom whose phase winds near ``angle``.
    """

    angle: float
    scale: float
    oscillation: float = 0.0


@dataclass(frozen=True)
class IntegralResult:
    """A quadrature value that may legitimately be infinite.

    ``evidence`` holds the cumulative partial sums per refinement level.
    """

    value: float
    method: str
    evidence: tuple = ()
    growth_exponent: Optional[float] = None
    details: dict = field(default_factory=dict, compare=False)

    @property
    def diverged(self) -> bool:
        return math.isinf(self.value)

    @property
    def finite(self) -> bool:
        return not self.diverged

    @classmethod
    def divergent(cls, method, evidence=(), growth_exponent=None, **details):
        return cls(math.inf, method, tuple(evidence), growth_exponent, details)

    def scaled(self, factor):
        if factor == 0:
            return replace(self, value=0.0, evidence=(), growth_exponent=None)
        if self.diverged:
            return self
        return replace(
            self,
            value=self.value * factor,
            evidence=tuple(v * factor for v in self.evidence),
        )

    def to_dict(self):
        return {
            'method': self.method,
            'value': 'diverged' if self.diverged else self.value,
            'evidence': [float(v) for v in self.evidence],
            'growth_exponent': self.growth_exponent,
        }


@dataclass(frozen=True)
class CircleRule:
    center: float
    offsets: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.offsets.size

    @property
    def angles(self) -> np.ndarray:
        return np.mod(self.center + self.offsets, TWO_PI)

    @property
    def points(self) -> np.ndarray:
        return np.exp(1j * self.center) * np.exp(1j * self.offsets)

    def chords(self) -> np.ndarray:
        """lambda - e^{i center}, formed without cancellation"""
        half = self.offsets / 2.0
        return np.exp(1j * self.center) * 2j * np.sin(half) * np.exp(1j * half)

    def levels(self) -> np.ndarray:
        """Dyadic shell index of each node: |t| in [pi 2^-l, pi 2^-(l-1))"""
        t = np.maximum(np.abs(self.offsets), np.finfo(float).tiny)
        return np.maximum(np.floor(np.log2(math.pi / t)).astype(int) + 1, 1)


@lru_cache(maxsize=32)
def gauss_legendre(order: int):
    x, w = special.roots_legendre(order)
    return x, w


@lru_cache(maxsize=32)
def gauss_jacobi(order: int, alpha: float, beta: float):
    """Nodes/weights on [-1, 1] for the weight (1-x)^alpha (1+x)^beta"""
    x, w = special.roots_jacobi(order, alpha, beta)
    return x, w


def wrap_angle(t):
    """Map angles into [-pi, pi)"""
    return np.mod(np.asarray(t, dtype=float) + math.pi, TWO_PI) - math.pi


def uniform_angles(n: int) -> np.ndarray:
    return TWO_PI * np.arange(n) / n


@lru_cache(maxsize=256)
def _spot_offsets(scale: float, oscillation: float) -> np.ndarray:
    """Positive breakpoint offsets graded toward a hot spot"""
    if scale > 0:
        depth = int(math.ceil(math.log2(math.pi / scale))) + HOT_SPOT_DEPTH
    else:
        depth = EDGE_DEPTH
    depth = min(max(depth, 1), 52)
    offsets = [math.pi * 2.0 ** -np.arange(1, depth + 1)]
    if oscillation > 0:
        # one phase turn per panel: the phase of exp(-i s cot(t/2)) moves by ~2s/t^2
        t = math.pi
        floor = max(OSCILLATION_FLOOR * oscillation, math.pi * 2.0 ** -depth)
        extra = []
        while t > floor and len(extra) < MAX_OSCILLATION_PANELS:
            t -= min(t / 2.0, math.pi * t * t / oscillation)
            extra.append(t)
        offsets.append(np.array(extra))
    return np.concatenate(offsets)


@lru_cache(maxsize=512)
def circle_rule(config: QuadratureConfig, center: float = 0.0, center_depth: int = 0,
                hot_spots: tuple = (), breakpoints: tuple = (), order: int = 0) -> CircleRule:
    """Composite Gauss-Legendre rule on the circle in offsets from ``center``.

    Panels start from a uniform partition and are graded geometrically toward
    the center (down to pi 2^-center_depth), toward every hot spot, and
    split at the given breakpoints so no panel straddles a kink.
    """
    order = order or config.gauss_order
    panels = max(8, config.circle_samples // order)
    edges = [np.linspace(-math.pi, math.pi, panels + 1)]
    if center_depth:
        d = math.pi * 2.0 ** -np.arange(1, center_depth + 1)
        edges.extend([d, -d])
    for spot in hot_spots:
        offset = float(wrap_angle(spot.angle - center))
        grading = _spot_offsets(float(spot.scale), float(spot.oscillation))
        edges.extend([wrap_angle(offset + grading), wrap_angle(offset - grading), [offset]])
    for point in breakpoints:
        edges.append([float(wrap_angle(point - center))])
    e = np.unique(np.concatenate([np.ravel(np.asarray(x, dtype=float)) for x in edges]))
    e = np.unique(np.concatenate([[-math.pi], e[(e > -math.pi) & (e < math.pi)], [math.pi]]))

    x, w = gauss_legendre(order)
    half = np.diff(e) / 2.0
    mid = (e[:-1] + e[1:]) / 2.0
    offsets = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel() / TWO_PI
    offsets.flags.writeable = False
    weights.flags.writeable = False
    logger.debug(f"circle rule: {half.size} panels, {offsets.size} nodes, center={center:.6f}")
    return CircleRule(center, offsets, weights)


def half_circle_rule(config: QuadratureConfig, breakpoints: tuple = (), order: int = 0):
    """Rule on (0, pi] graded toward t = 0 for principal-value integrals"""
    order = order or config.gauss_order
    panels = max(8, config.circle_samples // (2 * order))
    edges = [np.linspace(0.0, math.pi, panels + 1), math.pi * 2.0 ** -np.arange(1, EDGE_DEPTH + 1)]
    for point in breakpoints:
        if 0.0 < point < math.pi:
            grading = _spot_offsets(0.0, 0.0)
            edges.extend([[point], point + grading, point - grading])
    e = np.unique(np.concatenate([np.ravel(np.asarray(x, dtype=float)) for x in edges]))
    e = np.unique(np.concatenate([[0.0], e[(e > 0.0) & (e < math.pi)], [math.pi]]))
    x, w = gauss_legendre(order)
    half = np.diff(e) / 2.0
    mid = (e[:-1] + e[1:]) / 2.0
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def radial_panels(levels: int, factor: int = 2):
    """Edges of the geometric radial panels [1-q^{1-l}, 1-q^{-l}], l = 1..levels"""
    q = float(factor)
    return [(1.0 - q ** (1 - level), 1.0 - q ** -level) for level in range(1, levels + 1)]


def area_levels(config: QuadratureConfig, center: float = 0.0, graded_center: bool = True,
                hot_spots: tuple = (), breakpoints: tuple = (), levels: int = 0):
    """Yield (level, radii, radial_weights, rule) for the polar disk grid.

    Radial weights already include the 2r factor, so that
    sum(radial_weights x rule.weights x F) approximates (1/pi) * area integral.
    Angular grading toward ``center`` follows the radial scale of each level.
    """
    levels = levels or config.radial_levels
    halvings = math.log2(config.refinement_factor)
    x, w = gauss_legendre(config.gauss_order)
    for level, (a, b) in enumerate(radial_panels(levels, config.refinement_factor), start=1):
        half = (b - a) / 2.0
        radii = (a + b) / 2.0 + half * x
        radial_weights = 2.0 * radii * half * w
        scale = config.level_scale(level)
        spots = tuple(
            HotSpot(s.angle, max(s.scale, scale), s.oscillation) for s in hot_spots
        )
        rule = circle_rule(
            config,
            center=center,
            center_depth=int(math.ceil(level * halvings)) + 6 if graded_center else 0,
            hot_spots=spots,
            breakpoints=breakpoints,
        )
        yield level, radii, radial_weights, rule


def segment_rule(a: float, b: float, order: int):
    x, w = gauss_legendre(order)
    half = (b - a) / 2.0
    return (a + b) / 2.0 + half * x, half * w


def assess_growth(partial_sums, window: int = 5, threshold: float = 0.1, floor: float = 1e-300):
    """Classify a sequence of cumulative sums.

    Returns (diverged, exponent). The exponent is the mean of log2 of
    successive ratios over the last ``window`` levels; divergence requires
    every one of them to exceed ``threshold``.
    """
    sums = [float(s) for s in partial_sums]
    growth = []
    for prev, cur in zip(sums[:-1], sums[1:]):
        if prev > floor and cur > 0 and math.isfinite(cur):
            growth.append(math.log2(cur / prev))
        elif cur > floor and prev <= floor:
            growth.append(0.0)
        else:
            growth.append(0.0 if math.isfinite(cur) else math.inf)
    tail = growth[-window:]
    if not tail:
        return False, 0.0
    diverged = len(tail) == window and all(g > threshold for g in tail)
    finite_tail = [g for g in tail if math.isfinite(g)]
    exponent = float(np.mean(finite_tail)) if finite_tail else math.inf
    return diverged, exponent


def shell_sums(contributions: np.ndarray, rule: CircleRule, levels: int) -> np.ndarray:
    """Cumulative sums of node contributions over dyadic shells around the center"""
    index = np.minimum(rule.levels(), levels + 1)
    binned = np.bincount(index.ravel(), weights=np.ravel(contributions), minlength=levels + 2)
    # nodes deeper than the last shell are folded into it
    binned[levels] += binned[levels + 1]
    return np.cumsum(binned[1:levels + 1])


def conjugate_samples(values: np.ndarray) -> np.ndarray:
    """Harmonic conjugate of uniformly sampled boundary data (mean zero)"""
    coefficients = np.fft.fft(values)
    frequencies = np.fft.fftfreq(values.size, d=1.0 / values.size)
    return np.real(np.fft.ifft(-1j * np.sign(frequencies) * coefficients))


def periodic_interp(angles, nodes, values):
    return np.interp(np.mod(angles, TWO_PI), nodes, values, period=TWO_PI)

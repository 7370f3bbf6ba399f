"""Analytic functions on the unit disk.

Every function accepts a scalar or a numpy array of points and returns a
value of the same shape. Blaschke products, atomic singular inner
functions, Szego kernels and polynomials are evaluated in closed form, on
the circle included; outer functions are built from boundary log-modulus
data through the Herglotz integral.
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from services.exceptions import (
    AtomEvaluation,
    QuadratureDiverged,
    TooCloseToBoundary,
    UnsupportedRepresentation,
)
from services.quadrature import (
    TWO_PI,
    HotSpot,
    QuadratureConfig,
    circle_rule,
    conjugate_samples,
    half_circle_rule,
    periodic_interp,
    uniform_angles,
    wrap_angle,
)

logger = logging.getLogger(__name__)

# |z| above this is treated as a boundary point
ON_CIRCLE = 1.0 - 1e-14
ATOM_HIT = 1e-14
RADIAL_TOL = 1e-8
MAX_DOUBLINGS = 40


def _as_array(z) -> np.ndarray:
    return np.asarray(z, dtype=complex)


def _shaped(values: np.ndarray, like: np.ndarray):
    values = np.asarray(values).reshape(like.shape)
    return complex(values) if values.ndim == 0 else values


def _pair(z: complex) -> list:
    z = complex(z)
    return [z.real, z.imag]


@dataclass(frozen=True)
class UnitCirclePoint:
    """zeta = e^{i angle}, with the angle kept in [0, 2 pi)"""

    angle: float

    def __post_init__(self):
        object.__setattr__(self, 'angle', float(math.fmod(self.angle, TWO_PI) % TWO_PI))

    @classmethod
    def from_complex(cls, z: complex):
        return cls(math.atan2(complex(z).imag, complex(z).real))

    @property
    def point(self) -> complex:
        return complex(math.cos(self.angle), math.sin(self.angle))

    def chordal_distance(self, other) -> float:
        gap = abs(float(wrap_angle(self.angle - other.angle)))
        return 2.0 * math.sin(gap / 2.0)

    def __repr__(self):
        return f"UnitCirclePoint({self.angle:.12g})"


@dataclass(frozen=True)
class NoLimit:
    """Radial values did not settle; ``evidence`` holds the sampled values"""

    evidence: tuple
    reason: str = 'no convergence'

    def __bool__(self):
        return False


class AnalyticFunction(ABC):
    """Holomorphic function on the open disk with derivative and boundary values"""

    provenance = 'composite'
    # True when boundary() is an exact closed form rather than a limit estimate
    exact_boundary = True

    def __call__(self, z):
        arr = _as_array(z)
        return _shaped(self._evaluate(arr.ravel()), arr)

    def evaluate(self, z):
        return self(z)

    def derivative(self, z):
        arr = _as_array(z)
        return _shaped(self._derivative(arr.ravel()), arr)

    def boundary(self, points):
        """Boundary values at points of the circle"""
        arr = _as_array(points)
        return _shaped(self._boundary(arr.ravel()), arr)

    @abstractmethod
    def _evaluate(self, z: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def _derivative(self, z: np.ndarray) -> np.ndarray:
        ...

    def _boundary(self, points: np.ndarray) -> np.ndarray:
        return self._evaluate(points)

    def hot_spots(self) -> tuple:
        return ()

    def breakpoints(self) -> tuple:
        return ()

    def is_continuous_at(self, zeta: UnitCirclePoint) -> bool:
        for spot in self.hot_spots():
            if spot.scale == 0 and abs(float(wrap_angle(spot.angle - zeta.angle))) < 1e-12:
                return False
        return True

    def exact_h2_norm_sq(self) -> Optional[float]:
        return None

    def divided_difference(self, zeta: UnitCirclePoint, value: complex):
        """g with f(z) = value + (z - zeta) g(z)"""
        return DifferenceQuotient(self, zeta, value)

    def to_spec(self) -> dict:
        raise UnsupportedRepresentation(f"{type(self).__name__} has no JSON form")

    def __add__(self, other):
        if isinstance(other, AnalyticFunction):
            return LinearCombination(((1.0, self), (1.0, other)))
        return LinearCombination(((1.0, self),), constant=complex(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, AnalyticFunction):
            return LinearCombination(((1.0, self), (-1.0, other)))
        return LinearCombination(((1.0, self),), constant=-complex(other))

    def __neg__(self):
        return LinearCombination(((-1.0, self),))

    def __mul__(self, other):
        if isinstance(other, AnalyticFunction):
            return ProductFunction((self, other))
        return LinearCombination(((complex(other), self),))

    __rmul__ = __mul__


class Polynomial(AnalyticFunction):
    """Coefficients in increasing degree"""

    provenance = 'polynomial'

    def __init__(self, coefficients):
        coefficients = np.atleast_1d(np.asarray(coefficients, dtype=complex))
        if coefficients.size == 0:
            coefficients = np.zeros(1, dtype=complex)
        self.coefficients = coefficients

    @classmethod
    def monomial(cls, n: int, coefficient: complex = 1.0):
        c = np.zeros(n + 1, dtype=complex)
        c[n] = coefficient
        return cls(c)

    @property
    def degree(self) -> int:
        nonzero = np.nonzero(self.coefficients)[0]
        return int(nonzero[-1]) if nonzero.size else 0

    def _evaluate(self, z):
        return np.polynomial.polynomial.polyval(z, self.coefficients)

    def _derivative(self, z):
        if self.coefficients.size == 1:
            return np.zeros_like(z)
        return np.polynomial.polynomial.polyval(z, np.polynomial.polynomial.polyder(self.coefficients))

    def exact_h2_norm_sq(self):
        return float(np.sum(np.abs(self.coefficients) ** 2))

    def divided_difference(self, zeta, value):
        numerator = self.coefficients.copy()
        numerator[0] -= value
        if numerator.size == 1:
            return Polynomial([0.0])
        quotient, _ = np.polynomial.polynomial.polydiv(numerator, np.array([-zeta.point, 1.0]))
        return Polynomial(quotient)

    def to_spec(self):
        return {'kind': 'polynomial', 'coefficients': [_pair(c) for c in self.coefficients]}

    def __repr__(self):
        return f"Polynomial({self.coefficients.tolist()})"


class SzegoKernel(AnalyticFunction):
    """c_w(z) = 1 / (1 - conj(w) z)"""

    provenance = 'kernel'

    def __init__(self, pole: complex):
        pole = complex(pole)
        if abs(pole) >= 1:
            raise ValueError(f"Szego kernel pole must lie in the open disk, got {pole}")
        self.pole = pole

    @property
    def norm_sq(self) -> float:
        return 1.0 / (1.0 - abs(self.pole) ** 2)

    def _evaluate(self, z):
        return 1.0 / (1.0 - np.conj(self.pole) * z)

    def _derivative(self, z):
        return np.conj(self.pole) / (1.0 - np.conj(self.pole) * z) ** 2

    def exact_h2_norm_sq(self):
        return self.norm_sq

    def hot_spots(self):
        if abs(self.pole) == 0:
            return ()
        return (HotSpot(math.atan2(self.pole.imag, self.pole.real) % TWO_PI, 1.0 - abs(self.pole)),)

    def divided_difference(self, zeta, value):
        # c(z) - c(zeta) = conj(w) (z - zeta) c(z) c(zeta)
        return LinearCombination(((np.conj(self.pole) * self._evaluate(zeta.point), self),))

    def to_spec(self):
        return {'kind': 'szego', 'pole': _pair(self.pole)}

    def __repr__(self):
        return f"SzegoKernel({self.pole})"


class BlaschkeProduct(AnalyticFunction):
    """Finite Blaschke product; a zero at the origin contributes the factor z"""

    provenance = 'rational'

    def __init__(self, zeros):
        zeros = np.atleast_1d(np.asarray(zeros, dtype=complex))
        if zeros.size and np.any(np.abs(zeros) >= 1):
            raise ValueError("Blaschke zeros must lie strictly inside the disk")
        self.zeros = zeros

    @property
    def degree(self) -> int:
        return int(self.zeros.size)

    def _factors(self, z):
        a = self.zeros[:, None]
        zz = z[None, :]
        at_origin = a == 0
        unit = np.where(at_origin, 1.0, np.abs(a) / np.where(at_origin, 1.0, a))
        denom = 1.0 - np.conj(a) * zz
        values = np.where(at_origin, zz, unit * (a - zz) / denom)
        slopes = np.where(at_origin, 1.0 + 0 * zz, unit * (np.abs(a) ** 2 - 1.0) / denom ** 2)
        return values, slopes

    def _evaluate(self, z):
        if not self.zeros.size:
            return np.ones_like(z)
        values, _ = self._factors(z)
        return np.prod(values, axis=0)

    def _derivative(self, z):
        if not self.zeros.size:
            return np.zeros_like(z)
        values, slopes = self._factors(z)
        return product_rule(values, slopes)

    def hot_spots(self):
        return tuple(
            HotSpot(math.atan2(a.imag, a.real) % TWO_PI, 1.0 - abs(a))
            for a in self.zeros
            if abs(a) > 0
        )

    def to_spec(self):
        return {'zeros': [_pair(a) for a in self.zeros]}

    def __repr__(self):
        return f"BlaschkeProduct({self.zeros.tolist()})"


def product_rule(values: np.ndarray, slopes: np.ndarray) -> np.ndarray:
    """Derivative of prod(values) from per-factor values and derivatives (axis 0)"""
    n = values.shape[0]
    ones = np.ones_like(values[:1])
    prefix = np.cumprod(np.concatenate([ones, values[:-1]]), axis=0)
    suffix = np.cumprod(np.concatenate([ones, values[::-1][:-1]]), axis=0)[::-1]
    return np.sum(prefix * suffix * slopes, axis=0) if n else np.zeros(values.shape[1:], complex)


class AtomicSingularInner(AnalyticFunction):
    """exp(-sum_k s_k (zeta_k + z) / (zeta_k - z)) for finitely many atoms"""

    provenance = 'singular'

    def __init__(self, atoms):
        cleaned = []
        for point, mass in atoms:
            if not isinstance(point, UnitCirclePoint):
                point = UnitCirclePoint(float(point))
            if mass <= 0:
                raise ValueError(f"singular atom masses must be positive, got {mass}")
            cleaned.append((point, float(mass)))
        self.atoms = tuple(cleaned)
        self._points = np.array([p.point for p, _ in cleaned], dtype=complex)
        self._masses = np.array([m for _, m in cleaned], dtype=float)

    def _check_atoms(self, z):
        if not self.atoms:
            return
        hits = np.abs(self._points[:, None] - z[None, :]) < ATOM_HIT
        if np.any(hits):
            raise AtomEvaluation("singular inner factor evaluated at an atom")

    def _exponent(self, z):
        self._check_atoms(z)
        zeta = self._points[:, None]
        return -np.sum(self._masses[:, None] * (zeta + z[None, :]) / (zeta - z[None, :]), axis=0)

    def _evaluate(self, z):
        exponent = self._exponent(z)
        on_circle = np.abs(z) >= ON_CIRCLE
        exponent = np.where(on_circle, 1j * exponent.imag, exponent)
        return np.exp(exponent)

    def _derivative(self, z):
        self._check_atoms(z)
        zeta = self._points[:, None]
        log_slope = -np.sum(2.0 * self._masses[:, None] * zeta / (zeta - z[None, :]) ** 2, axis=0)
        return self._evaluate(z) * log_slope

    def hot_spots(self):
        return tuple(HotSpot(p.angle, 0.0, m) for p, m in self.atoms)

    def to_spec(self):
        return {'atoms': [{'angle': p.angle, 'mass': m} for p, m in self.atoms]}

    def __repr__(self):
        return f"AtomicSingularInner({[(p.angle, m) for p, m in self.atoms]})"


def negative_arcs(angles: np.ndarray, mask: np.ndarray) -> tuple:
    """Closed arcs covering the runs of ``mask`` on a uniform periodic grid.

    Each run is widened to the neighbouring grid angles, which is the
    closure of the set where the linear interpolant is negative.
    """
    n = mask.size
    if not mask.any():
        return ()
    if mask.all():
        return ((0.0, TWO_PI),)
    step = TWO_PI / n
    shift = int(np.argmin(mask))
    rolled = np.roll(mask, -shift)
    arcs = []
    k = 0
    while k < n:
        if rolled[k]:
            start = k
            while k < n and rolled[k]:
                k += 1
            first = (start - 1 + shift) % n
            length = (k - start + 1) * step
            arcs.append((float(angles[first] % TWO_PI), float(angles[first] % TWO_PI) + length))
        else:
            k += 1
    return tuple(arcs)


class OuterFromModulus(AnalyticFunction):
    """Outer function with prescribed boundary log-modulus (always <= 0)"""

    provenance = 'outer'
    exact_boundary = False
    kind = 'outer'

    def __init__(self, quad: Optional[QuadratureConfig] = None):
        self._quad = quad

    @property
    def quad(self) -> QuadratureConfig:
        if self._quad is None:
            self._quad = QuadratureConfig.from_settings()
        return self._quad

    @abstractmethod
    def log_modulus(self, angles) -> np.ndarray:
        ...

    def evaluate(self, z, quad: Optional[QuadratureConfig] = None):
        if quad is not None and quad != self._quad:
            return self.with_quad(quad)(z)
        return self(z)

    def with_quad(self, quad):
        clone = type(self).__new__(type(self))
        clone.__dict__.update(self.__dict__)
        clone._quad = quad
        return clone

    def negative_support(self):
        """(arcs, excluded angles) of the essential support of -log|O|"""
        raise UnsupportedRepresentation(f"{type(self).__name__} does not describe its support")

    @property
    def is_trivial(self) -> bool:
        return False


class ConstantOuter(OuterFromModulus):
    """log|O| = c everywhere, so O is the constant e^c"""

    kind = 'constant'
    exact_boundary = True

    def __init__(self, log_value: float, quad=None):
        super().__init__(quad)
        if log_value > 0:
            raise ValueError("log-modulus of a Schur outer factor must be <= 0")
        self.log_value = float(log_value)

    def log_modulus(self, angles):
        return np.full(np.shape(angles), self.log_value)

    def _evaluate(self, z):
        return np.full(z.shape, math.exp(self.log_value), dtype=complex)

    def _derivative(self, z):
        return np.zeros_like(z)

    def negative_support(self):
        return (((0.0, TWO_PI),) if self.log_value < 0 else ()), ()

    @property
    def is_trivial(self):
        return self.log_value == 0

    def to_spec(self):
        return {'kind': 'constant', 'value': self.log_value}


class SampledOuter(OuterFromModulus):
    """Log-modulus given by N uniform samples, interpolated linearly in angle"""

    kind = 'samples'

    def __init__(self, samples, quad=None):
        super().__init__(quad)
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 1 or samples.size < 8:
            raise ValueError("sampled log-modulus needs at least 8 samples")
        if np.any(samples > 0) or not np.all(np.isfinite(samples)):
            raise ValueError("sampled log-modulus must be finite and <= 0")
        self.samples = samples
        self.angles = uniform_angles(samples.size)
        self._conjugate = conjugate_samples(samples)
        self._nodes = np.exp(1j * self.angles)

    def log_modulus(self, angles):
        return periodic_interp(angles, self.angles, self.samples)

    def _margin_check(self, z):
        limit = 1.0 - 10.0 / self.samples.size
        interior = np.abs(z) < ON_CIRCLE
        if np.any(np.abs(z[interior]) > limit):
            raise TooCloseToBoundary(
                f"|z| exceeds {limit:.6f}, the resolvable radius for {self.samples.size} samples"
            )

    def _herglotz(self, z, kernel):
        out = np.empty(z.shape, dtype=complex)
        for start in range(0, z.size, 2048):
            chunk = z[start:start + 2048]
            lam = self._nodes[None, :]
            out[start:start + 2048] = np.mean(kernel(lam, chunk[:, None]) * self.samples[None, :], axis=1)
        return out

    def _evaluate(self, z):
        self._margin_check(z)
        on_circle = np.abs(z) >= ON_CIRCLE
        out = np.empty(z.shape, dtype=complex)
        if np.any(on_circle):
            out[on_circle] = self._boundary(z[on_circle])
        inside = ~on_circle
        if np.any(inside):
            out[inside] = np.exp(self._herglotz(z[inside], lambda lam, w: (lam + w) / (lam - w)))
        return out

    def _derivative(self, z):
        self._margin_check(z)
        if np.any(np.abs(z) >= ON_CIRCLE):
            raise TooCloseToBoundary("outer derivative requested on the circle")
        slope = self._herglotz(z, lambda lam, w: 2.0 * lam / (lam - w) ** 2)
        return self._evaluate(z) * slope

    def _boundary(self, points):
        angles = np.angle(points)
        phi = self.log_modulus(angles)
        conj = periodic_interp(angles, self.angles, self._conjugate)
        return np.exp(phi + 1j * conj)

    def negative_support(self):
        return negative_arcs(self.angles, self.samples < 0), ()

    @property
    def is_trivial(self):
        return not np.any(self.samples)

    def to_spec(self):
        return {'kind': 'samples', 'value': self.samples.tolist()}


class CallbackOuter(OuterFromModulus):
    """Log-modulus given by a closed-form callback on angles.

    ``breakpoints`` are angles where the callback is not smooth;
    ``support``/``excluded`` describe the essential support of -log|O| when
    known in closed form. ``exact`` is an optional closed-form analytic
    function equal to the outer factor.
    """

    kind = 'callback'

    def __init__(self, log_modulus: Callable, breakpoints=(), support=None, excluded=(),
                 exact: Optional[AnalyticFunction] = None, name: Optional[str] = None,
                 params: Optional[dict] = None, quad=None):
        super().__init__(quad)
        self._log_modulus = log_modulus
        self._breakpoints = tuple(float(b) % TWO_PI for b in breakpoints)
        self.support = support
        self.excluded = tuple(excluded)
        self.exact = exact
        self.name = name
        self.params = dict(params or {})
        if exact is not None:
            self.exact_boundary = True

    def log_modulus(self, angles):
        return np.asarray(self._log_modulus(np.mod(np.asarray(angles, dtype=float), TWO_PI)), dtype=float)

    def breakpoints(self):
        return self._breakpoints

    def hot_spots(self):
        if self.exact is not None:
            return self.exact.hot_spots()
        return tuple(HotSpot(b, 0.0) for b in self._breakpoints)

    def _point_rule(self, rho, alpha, order=0):
        scale = 1.0 - rho
        depth = 0
        if scale < 0.25:
            depth = int(math.ceil(math.log2(math.pi / max(scale, 1e-16)))) + 8
        return circle_rule(self.quad, center=alpha, center_depth=depth,
                           breakpoints=self._breakpoints, order=order)

    def _herglotz_at(self, z: complex, derivative: bool = False) -> complex:
        rho = abs(z)
        alpha = math.atan2(z.imag, z.real) % TWO_PI if rho > 0 else 0.0
        values = []
        for order in (self.quad.gauss_order, max(self.quad.gauss_order // 2, 4)):
            rule = self._point_rule(rho, alpha, order)
            t = rule.offsets
            phi = self.log_modulus(alpha + t)
            half = np.sin(t / 2.0)
            denom = ((1.0 - rho) - 2.0 * half ** 2) + 1j * np.sin(t)
            if derivative:
                kernel = 2.0 * np.exp(-1j * alpha) * np.exp(1j * t) / denom ** 2
            else:
                kernel = ((np.cos(t) + rho) + 1j * np.sin(t)) / denom
            values.append(complex(np.sum(rule.weights * kernel * phi)))
        value, check = values
        if not np.isfinite(value) or abs(value - check) > 1e-6 * max(1.0, abs(value)):
            raise QuadratureDiverged(
                f"Herglotz integral did not stabilize at z={z}: {value} vs {check}"
            )
        return value

    def _conjugate_at(self, alpha: float) -> float:
        gaps = tuple(abs(float(wrap_angle(b - alpha))) for b in self._breakpoints)
        t, w = half_circle_rule(self.quad, breakpoints=gaps)
        odd = self.log_modulus(alpha - t) - self.log_modulus(alpha + t)
        return float(np.sum(w * odd / np.tan(t / 2.0)) / TWO_PI)

    def _evaluate(self, z):
        if self.exact is not None:
            return self.exact._evaluate(z)
        out = np.empty(z.shape, dtype=complex)
        for k, point in enumerate(z):
            if abs(point) >= ON_CIRCLE:
                out[k] = self._boundary(np.array([point]))[0]
            elif abs(point) > 1.0 - 2.0 ** -45:
                raise TooCloseToBoundary(f"|z| = {abs(point)!r} is beyond the graded rule's reach")
            else:
                out[k] = np.exp(self._herglotz_at(complex(point)))
        return out

    def _derivative(self, z):
        if self.exact is not None:
            return self.exact._derivative(z)
        out = np.empty(z.shape, dtype=complex)
        for k, point in enumerate(z):
            if abs(point) > 1.0 - 2.0 ** -45:
                raise TooCloseToBoundary("outer derivative requested too close to the circle")
            point = complex(point)
            out[k] = np.exp(self._herglotz_at(point)) * self._herglotz_at(point, derivative=True)
        return out

    def _boundary(self, points):
        if self.exact is not None:
            return self.exact._boundary(points)
        angles = np.mod(np.angle(points), TWO_PI)
        phi = self.log_modulus(angles)
        conj = np.array([self._conjugate_at(a) for a in angles])
        return np.exp(phi + 1j * conj)

    def negative_support(self):
        if self.support is not None:
            return tuple(self.support), self.excluded
        n = 16 * self.quad.circle_samples
        angles = uniform_angles(n)
        phi = self.log_modulus(angles)
        tol = self.quad.abs_tol
        if not np.any(phi < -tol) and np.any(phi != 0):
            raise UnsupportedRepresentation(
                "log-modulus samples are numerically zero but not identically zero"
            )
        return negative_arcs(angles, phi < -tol), self.excluded

    @property
    def is_trivial(self):
        return self.support == () and not self.excluded

    def to_spec(self):
        if self.name is None:
            raise UnsupportedRepresentation("callback outer factors without a name have no JSON form")
        return {'kind': 'named', 'value': self.name, **({'params': self.params} if self.params else {})}


class SchurFunction(AnalyticFunction):
    """b = constant * outer * blaschke * singular with sup-norm at most one"""

    provenance = 'schur'

    def __init__(self, blaschke: Optional[BlaschkeProduct] = None,
                 singular: Optional[AtomicSingularInner] = None,
                 outer: Optional[OuterFromModulus] = None, constant: complex = 1.0):
        constant = complex(constant)
        if abs(constant) > 1.0 + 1e-12:
            raise ValueError(f"constant factor must have modulus <= 1, got {abs(constant)}")
        self.blaschke = blaschke
        self.singular = singular
        self.outer = outer
        self.constant = constant

    @property
    def factors(self) -> tuple:
        return tuple(f for f in (self.blaschke, self.singular, self.outer) if f is not None)

    @property
    def exact_boundary(self):
        return all(f.exact_boundary for f in self.factors)

    @property
    def is_inner(self) -> bool:
        outer_trivial = self.outer is None or self.outer.is_trivial
        return outer_trivial and abs(abs(self.constant) - 1.0) < 1e-12

    @property
    def is_finite_blaschke(self) -> bool:
        return self.is_inner and self.singular is None

    def inner_part(self):
        return SchurFunction(self.blaschke, self.singular, None, self.constant / abs(self.constant)
                             if self.constant else 1.0)

    def _values(self, z, method):
        if not self.factors:
            return np.full(z.shape, self.constant, dtype=complex)
        out = np.full(z.shape, self.constant, dtype=complex)
        for factor in self.factors:
            out = out * getattr(factor, method)(z)
        return out

    def _evaluate(self, z):
        if self.constant == 0:
            return np.zeros_like(z)
        return self._values(z, '_evaluate')

    def _boundary(self, points):
        if self.constant == 0:
            return np.zeros_like(points)
        return self._values(points, '_boundary')

    def _derivative(self, z):
        if self.constant == 0 or not self.factors:
            return np.zeros_like(z)
        values = np.array([f._evaluate(z) for f in self.factors])
        slopes = np.array([f._derivative(z) for f in self.factors])
        return self.constant * product_rule(values, slopes)

    def hot_spots(self):
        return tuple(s for f in self.factors for s in f.hot_spots())

    def breakpoints(self):
        return tuple(b for f in self.factors for b in f.breakpoints())

    def is_continuous_at(self, zeta):
        return all(f.is_continuous_at(zeta) for f in self.factors)

    def boundary_log_modulus(self, angles) -> np.ndarray:
        """log|b| on the circle; inner factors contribute zero off their atoms"""
        angles = np.asarray(angles, dtype=float)
        if self.constant == 0:
            return np.full(angles.shape, -np.inf)
        base = np.full(angles.shape, math.log(abs(self.constant)))
        if self.outer is not None:
            base = base + self.outer.log_modulus(angles)
        return base

    def max_modulus(self, samples: int = 1000, radius: float = 0.999, seed: int = 0) -> float:
        """Sampled check of the unit-ball constraint"""
        rng = np.random.default_rng(seed)
        r = radius * np.sqrt(rng.random(samples))
        z = r * np.exp(1j * TWO_PI * rng.random(samples))
        return float(np.max(np.abs(self(z))))

    def to_spec(self):
        spec = {}
        if self.blaschke is not None:
            spec['blaschke'] = self.blaschke.to_spec()
        if self.singular is not None:
            spec['singular'] = self.singular.to_spec()
        if self.outer is not None:
            spec['outer'] = self.outer.to_spec()
        if self.constant != 1:
            spec['constant'] = _pair(self.constant)
        return spec

    def __repr__(self):
        return f"SchurFunction({self.blaschke!r}, {self.singular!r}, {self.outer!r}, {self.constant})"


class LinearCombination(AnalyticFunction):
    def __init__(self, terms, constant: complex = 0.0):
        self.terms = tuple((complex(c), f) for c, f in terms)
        self.constant = complex(constant)

    @property
    def provenance(self):
        kinds = {f.provenance for _, f in self.terms}
        return 'rational' if kinds <= {'rational', 'polynomial', 'kernel'} else 'composite'

    @property
    def exact_boundary(self):
        return all(f.exact_boundary for _, f in self.terms)

    def _combine(self, z, method, constant):
        out = np.full(z.shape, constant, dtype=complex)
        for c, f in self.terms:
            out = out + c * getattr(f, method)(z)
        return out

    def _evaluate(self, z):
        return self._combine(z, '_evaluate', self.constant)

    def _derivative(self, z):
        return self._combine(z, '_derivative', 0.0)

    def _boundary(self, points):
        return self._combine(points, '_boundary', self.constant)

    def hot_spots(self):
        return tuple(s for _, f in self.terms for s in f.hot_spots())

    def breakpoints(self):
        return tuple(b for _, f in self.terms for b in f.breakpoints())

    def is_continuous_at(self, zeta):
        return all(f.is_continuous_at(zeta) for _, f in self.terms)

    def exact_h2_norm_sq(self):
        if self.constant == 0 and len(self.terms) == 1:
            c, f = self.terms[0]
            norm = f.exact_h2_norm_sq()
            return None if norm is None else abs(c) ** 2 * norm
        return None

    def divided_difference(self, zeta, value):
        if not (self.exact_boundary and self.is_continuous_at(zeta)):
            return DifferenceQuotient(self, zeta, value)
        parts = [(c, f.divided_difference(zeta, f.boundary(zeta.point))) for c, f in self.terms]
        return LinearCombination(parts)

    def to_spec(self):
        return {
            'kind': 'combination',
            'terms': [{'coefficient': _pair(c), 'function': f.to_spec()} for c, f in self.terms],
            'constant': _pair(self.constant),
        }


class ProductFunction(AnalyticFunction):
    def __init__(self, factors):
        self.factors = tuple(factors)

    @property
    def exact_boundary(self):
        return all(f.exact_boundary for f in self.factors)

    def _evaluate(self, z):
        out = np.ones(z.shape, dtype=complex)
        for f in self.factors:
            out = out * f._evaluate(z)
        return out

    def _boundary(self, points):
        out = np.ones(points.shape, dtype=complex)
        for f in self.factors:
            out = out * f._boundary(points)
        return out

    def _derivative(self, z):
        values = np.array([f._evaluate(z) for f in self.factors])
        slopes = np.array([f._derivative(z) for f in self.factors])
        return product_rule(values, slopes)

    def hot_spots(self):
        return tuple(s for f in self.factors for s in f.hot_spots())

    def breakpoints(self):
        return tuple(b for f in self.factors for b in f.breakpoints())

    def is_continuous_at(self, zeta):
        return all(f.is_continuous_at(zeta) for f in self.factors)

    def to_spec(self):
        return {'kind': 'product', 'factors': [f.to_spec() for f in self.factors]}


class DifferenceQuotient(AnalyticFunction):
    """g(z) = (f(z) - value) / (z - zeta)"""

    def __init__(self, f: AnalyticFunction, zeta: UnitCirclePoint, value: complex):
        self.f = f
        self.zeta = zeta
        self.value = complex(value)

    @property
    def exact_boundary(self):
        return self.f.exact_boundary

    def _quotient(self, z, values, slopes_at):
        gap = z - self.zeta.point
        near = np.abs(gap) < 1e-13
        safe = np.where(near, 1.0, gap)
        out = (values - self.value) / safe
        if np.any(near):
            out[near] = slopes_at(z[near])
        return out

    def _evaluate(self, z):
        return self._quotient(z, self.f._evaluate(z), self.f._derivative)

    def _boundary(self, points):
        return self._quotient(points, self.f._boundary(points), self.f._derivative)

    def _derivative(self, z):
        gap = z - self.zeta.point
        return (self.f._derivative(z) * gap - (self.f._evaluate(z) - self.value)) / gap ** 2

    def hot_spots(self):
        return self.f.hot_spots() + (HotSpot(self.zeta.angle, 0.0),)

    def breakpoints(self):
        return self.f.breakpoints()


class ClosedForm(AnalyticFunction):
    """Function given by vectorized callables (used for named catalog entries)"""

    def __init__(self, func: Callable, deriv: Callable, name: str, hot_spots=(),
                 boundary: Optional[Callable] = None, provenance: str = 'composite',
                 params: Optional[dict] = None):
        self._func = func
        self._deriv = deriv
        self._boundary_func = boundary
        self.name = name
        self._hot_spots = tuple(hot_spots)
        self.provenance = provenance
        self.params = dict(params or {})

    def _evaluate(self, z):
        return np.asarray(self._func(z), dtype=complex)

    def _derivative(self, z):
        return np.asarray(self._deriv(z), dtype=complex)

    def _boundary(self, points):
        if self._boundary_func is not None:
            return np.asarray(self._boundary_func(points), dtype=complex)
        return self._evaluate(points)

    def hot_spots(self):
        return self._hot_spots

    def to_spec(self):
        return {'kind': 'named', 'name': self.name, **({'params': self.params} if self.params else {})}

    def __repr__(self):
        return f"ClosedForm({self.name!r})"


def radial_boundary_value(f: AnalyticFunction, zeta: UnitCirclePoint, tol: float = RADIAL_TOL,
                          max_doublings: int = MAX_DOUBLINGS):
    """Limit of f(r_k zeta) along r_k = 1 - 2^-k, or NoLimit.

    Three successive values must agree in modulus, and in argument unless
    the value is numerically zero.
    """
    point = zeta.point
    values = []
    for k in range(1, max_doublings + 1):
        r = 1.0 - 2.0 ** -k
        try:
            values.append(complex(f(r * point)))
        except TooCloseToBoundary as exc:
            logger.warning(f"radial limit at angle {zeta.angle:.6f} stopped at level {k}: {exc}")
            return NoLimit(tuple(values), reason=str(exc))
        if not np.isfinite(values[-1]):
            return NoLimit(tuple(values), reason='non-finite value')
        if len(values) >= 3 and _settled(values[-3:], tol):
            if f.exact_boundary and f.is_continuous_at(zeta):
                return complex(f.boundary(point))
            return values[-1]
    logger.warning(f"no radial limit at angle {zeta.angle:.6f} after {max_doublings} doublings")
    return NoLimit(tuple(values))


def _settled(values, tol) -> bool:
    moduli = [abs(v) for v in values]
    if max(moduli) - min(moduli) >= tol:
        return False
    if max(moduli) < tol:
        return True
    args = [math.atan2(v.imag, v.real) for v in values]
    spread = max(abs(float(wrap_angle(a - args[-1]))) for a in args)
    return spread < tol


def derivative(f: AnalyticFunction, z):
    """f'(z) for |z| < 1"""
    if np.any(np.abs(_as_array(z)) >= 1):
        raise ValueError("derivative is defined on the open disk only")
    return f.derivative(z)

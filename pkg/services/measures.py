"""Finite positive measures on the unit circle: atoms plus a density plus c*dm"""
import logging
import math
from typing import Callable, Optional

import numpy as np

from services.disk_functions import UnitCirclePoint, negative_arcs
from services.quadrature import TWO_PI, QuadratureConfig, circle_rule, periodic_interp, uniform_angles

logger = logging.getLogger(__name__)


class CircleDensity:
    """Nonnegative piecewise-smooth density on the circle (against dm)"""

    KINDS = ('constant', 'samples', 'callback')

    def __init__(self, kind: str, value=None, func: Optional[Callable] = None, breakpoints=(),
                 support=None, name: Optional[str] = None, params: Optional[dict] = None):
        if kind not in self.KINDS:
            raise ValueError(f"unknown density kind {kind!r}")
        self.kind = kind
        self.name = name
        self.params = dict(params or {})
        self._breakpoints = tuple(float(b) % TWO_PI for b in breakpoints)
        self._support = support
        if kind == 'constant':
            if value is None or value < 0:
                raise ValueError("constant density must be a nonnegative number")
            self.value = float(value)
        elif kind == 'samples':
            samples = np.asarray(value, dtype=float)
            if samples.ndim != 1 or samples.size < 8 or np.any(samples < 0):
                raise ValueError("sampled density needs at least 8 nonnegative samples")
            self.value = samples
            self._nodes = uniform_angles(samples.size)
        else:
            if func is None:
                raise ValueError("callback density needs a function")
            self.value = None
        self._func = func

    @classmethod
    def constant(cls, value: float):
        return cls('constant', value=value)

    @classmethod
    def from_samples(cls, samples):
        return cls('samples', value=samples)

    @classmethod
    def from_callback(cls, func, breakpoints=(), support=None, name=None, params=None):
        return cls('callback', func=func, breakpoints=breakpoints, support=support, name=name,
                   params=params)

    def __call__(self, angles):
        angles = np.mod(np.asarray(angles, dtype=float), TWO_PI)
        if self.kind == 'constant':
            return np.full(angles.shape, self.value)
        if self.kind == 'samples':
            return periodic_interp(angles, self._nodes, self.value)
        return np.asarray(self._func(angles), dtype=float)

    def breakpoints(self) -> tuple:
        return self._breakpoints

    def mass(self, quad: QuadratureConfig) -> float:
        if self.kind == 'constant':
            return self.value
        if self.kind == 'samples':
            # exact for the piecewise-linear interpolant
            return float(np.mean(self.value))
        rule = circle_rule(quad, breakpoints=self._breakpoints)
        return float(np.sum(rule.weights * self(rule.angles)))

    def support(self, quad: QuadratureConfig) -> tuple:
        """Closed arcs carrying the density"""
        if self._support is not None:
            return tuple(self._support)
        if self.kind == 'constant':
            return ((0.0, TWO_PI),) if self.value > 0 else ()
        if self.kind == 'samples':
            return negative_arcs(self._nodes, self.value > 0)
        angles = uniform_angles(16 * quad.circle_samples)
        return negative_arcs(angles, self(angles) > quad.abs_tol)

    def to_spec(self) -> dict:
        if self.kind == 'constant':
            return {'kind': 'constant', 'value': self.value}
        if self.kind == 'samples':
            return {'kind': 'samples', 'value': self.value.tolist()}
        spec = {'kind': 'named', 'value': self.name}
        if self.params:
            spec['params'] = self.params
        return spec


class BoundaryMeasure:
    """mu = sum of atoms + density dm + lebesgue dm"""

    def __init__(self, atoms=(), density: Optional[CircleDensity] = None, lebesgue: float = 0.0):
        cleaned = []
        for point, mass in atoms:
            if not isinstance(point, UnitCirclePoint):
                point = UnitCirclePoint(float(point))
            if mass <= 0:
                raise ValueError(f"atom masses must be positive, got {mass}")
            cleaned.append((point, float(mass)))
        if lebesgue < 0:
            raise ValueError("Lebesgue multiple must be nonnegative")
        self.atoms = tuple(cleaned)
        self.density = density
        self.lebesgue = float(lebesgue)

    @classmethod
    def dirac(cls, angle: float, mass: float = 1.0):
        return cls(atoms=((UnitCirclePoint(angle), mass),))

    @classmethod
    def lebesgue_measure(cls, c: float = 1.0):
        return cls(lebesgue=c)

    @property
    def is_atomic(self) -> bool:
        return self.density is None and self.lebesgue == 0

    @property
    def atom_mass(self) -> float:
        return float(sum(m for _, m in self.atoms))

    def total_mass(self, quad: Optional[QuadratureConfig] = None) -> float:
        quad = quad or QuadratureConfig.from_settings()
        total = self.atom_mass + self.lebesgue
        if self.density is not None:
            total += self.density.mass(quad)
        return total

    def support(self, quad: Optional[QuadratureConfig] = None):
        """(points, arcs): atom locations and closed arcs of the absolutely continuous part"""
        quad = quad or QuadratureConfig.from_settings()
        arcs = ()
        if self.lebesgue > 0:
            arcs = ((0.0, TWO_PI),)
        elif self.density is not None:
            arcs = self.density.support(quad)
        return tuple(p for p, _ in self.atoms), arcs

    def mass_at(self, zeta: UnitCirclePoint, tol: float = 1e-14) -> float:
        return float(sum(m for p, m in self.atoms if p.chordal_distance(zeta) < tol))

    def breakpoints(self) -> tuple:
        return self.density.breakpoints() if self.density is not None else ()

    def poisson(self, z, quad: Optional[QuadratureConfig] = None):
        """P[mu](z) = integral of (1 - |z|^2) / |lambda - z|^2 d mu(lambda)"""
        quad = quad or QuadratureConfig.from_settings()
        arr = np.asarray(z, dtype=complex)
        flat = arr.ravel()
        if np.any(np.abs(flat) >= 1):
            raise ValueError("Poisson integral is evaluated inside the disk only")
        out = np.full(flat.shape, self.lebesgue, dtype=float)
        for point, mass in self.atoms:
            out += mass * (1.0 - np.abs(flat) ** 2) / np.abs(point.point - flat) ** 2
        if self.density is not None:
            for k, w in enumerate(flat):
                out[k] += self._density_poisson(complex(w), quad)
        out = out.reshape(arr.shape)
        return float(out) if out.ndim == 0 else out

    def _density_poisson(self, z: complex, quad: QuadratureConfig) -> float:
        rho = abs(z)
        alpha = math.atan2(z.imag, z.real) % TWO_PI if rho > 0 else 0.0
        depth = 0
        if rho > 0.75:
            depth = int(math.ceil(math.log2(math.pi / (1.0 - rho)))) + 8
        rule = circle_rule(quad, center=alpha, center_depth=depth, breakpoints=self.breakpoints())
        t = rule.offsets
        kernel = (1.0 - rho ** 2) / ((1.0 - rho) ** 2 + 4.0 * rho * np.sin(t / 2.0) ** 2)
        return float(np.sum(rule.weights * kernel * self.density(alpha + t)))

    def to_spec(self) -> dict:
        spec = {'atoms': [{'angle': p.angle, 'mass': m} for p, m in self.atoms]}
        if self.density is not None:
            spec['density'] = self.density.to_spec()
        if self.lebesgue:
            spec['lebesgue'] = self.lebesgue
        return spec

    def __repr__(self):
        return (f"BoundaryMeasure(atoms={[(p.angle, m) for p, m in self.atoms]}, "
                f"density={self.density.kind if self.density else None}, lebesgue={self.lebesgue})")


def poisson(mu: BoundaryMeasure, z, quad: Optional[QuadratureConfig] = None):
    return mu.poisson(z, quad)

"""Named built-in functions and measures usable from scenario configs"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from services.carleson import PowerLawRayMeasure
from services.disk_functions import (
    AtomicSingularInner,
    BlaschkeProduct,
    CallbackOuter,
    ClosedForm,
    SchurFunction,
    SzegoKernel,
    UnitCirclePoint,
)
from services.exceptions import ConfigError
from services.measures import BoundaryMeasure, CircleDensity
from services.quadrature import TWO_PI, HotSpot

logger = logging.getLogger(__name__)

# smallest root of w^2 - 3w + 1
W0 = (3.0 - math.sqrt(5.0)) / 2.0
EXAMPLE2_HALF_WIDTH = math.pi / 6.0


@dataclass(frozen=True)
class NamedEntry:
    name: str
    kind: str
    description: str
    builder: Callable
    defaults: dict = field(default_factory=dict)
    facts: dict = field(default_factory=dict)

    def build(self, **params):
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise ConfigError(f"unknown parameters {sorted(unknown)} for {self.name!r}", field='params')
        return self.builder(**{**self.defaults, **params})

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'kind': self.kind,
            'description': self.description,
            'params': dict(self.defaults),
            'facts': dict(self.facts),
        }


def example1_outer(zeta: float = 0.0) -> CallbackOuter:
    """(1 - w0) / (1 - w0 conj(zeta) z): modulus one at zeta only"""
    point = UnitCirclePoint(zeta)
    exact = (1.0 - W0) * SzegoKernel(W0 * point.point)

    def log_modulus(angles):
        return math.log1p(-W0) - np.log(np.abs(1.0 - W0 * np.exp(1j * (angles - point.angle))))

    return CallbackOuter(log_modulus, support=((0.0, TWO_PI),), excluded=(point.angle,), exact=exact,
                         name='example1-outer', params={'zeta': point.angle})


def example1_b(zeta: float = 0.0) -> SchurFunction:
    """conj(zeta) z (1 - w0) / (1 - w0 conj(zeta) z)"""
    point = UnitCirclePoint(zeta)
    return SchurFunction(blaschke=BlaschkeProduct([0.0]), outer=example1_outer(point.angle),
                         constant=np.conj(point.point))


def _example2_log_modulus(angles):
    offsets = np.abs(np.mod(np.asarray(angles) + math.pi, TWO_PI) - math.pi)
    chord = 2.0 * np.abs(np.sin(offsets / 2.0))
    inside = offsets <= EXAMPLE2_HALF_WIDTH
    return np.where(inside, 0.5 * np.log1p(-np.where(inside, chord, 0.0) ** 1.5), 0.0)


def example2_phi() -> CallbackOuter:
    """|O|^2 = 1 - |1 - lambda|^{3/2} on the arc |arg lambda| <= pi/6, |O| = 1 elsewhere"""
    start = TWO_PI - EXAMPLE2_HALF_WIDTH
    return CallbackOuter(
        _example2_log_modulus,
        breakpoints=(-EXAMPLE2_HALF_WIDTH, 0.0, EXAMPLE2_HALF_WIDTH),
        support=((start, start + 2.0 * EXAMPLE2_HALF_WIDTH),),
        excluded=(0.0,),
        name='example2-phi',
    )


def example2_b2() -> SchurFunction:
    return SchurFunction(outer=example2_phi())


def example4_nu(exponent: float = -0.5, angle: float = 0.0) -> PowerLawRayMeasure:
    """(1 - s)^exponent ds along the ray to e^{i angle}"""
    return PowerLawRayMeasure(angle=angle, exponent=exponent)


def example4_phi() -> ClosedForm:
    """(z - 1) / (z + 1)^{1/3}: in D_1 but unbounded near -1"""
    def func(z):
        return (z - 1.0) / np.power(z + 1.0, 1.0 / 3.0)

    def deriv(z):
        root = np.power(z + 1.0, 1.0 / 3.0)
        return 1.0 / root - (z - 1.0) / (3.0 * root ** 4)

    return ClosedForm(func, deriv, 'example4-phi', hot_spots=(HotSpot(math.pi, 0.0),))


def pole_at_one() -> ClosedForm:
    """1 / (1 - z), without a boundary value at 1"""
    return ClosedForm(lambda z: 1.0 / (1.0 - z), lambda z: 1.0 / (1.0 - z) ** 2, 'pole-at-1',
                      hot_spots=(HotSpot(0.0, 0.0),))


def singular_at_one(mass: float = 1.0, angle: float = 0.0) -> SchurFunction:
    return SchurFunction(singular=AtomicSingularInner(((UnitCirclePoint(angle), mass),)))


def raised_cosine() -> BoundaryMeasure:
    """(1 + cos t) dm"""
    density = CircleDensity.from_callback(lambda t: 1.0 + np.cos(t), support=((0.0, TWO_PI),),
                                          name='raised-cosine')
    return BoundaryMeasure(density=density)


_ENTRIES = (
    NamedEntry('example1-outer', 'outer', 'exact outer factor (1 - w0)/(1 - w0 conj(zeta) z)',
               example1_outer, {'zeta': 0.0}, {'w0': W0}),
    NamedEntry('example1-b', 'schur', 'conj(zeta) z (1 - w0)/(1 - w0 conj(zeta) z), w0 = (3 - sqrt 5)/2',
               example1_b, {'zeta': 0.0}, {'w0': W0}),
    NamedEntry('example2-phi', 'outer', 'outer factor with |O|^2 = 1 - |1 - lambda|^{3/2} near 1',
               example2_phi, {}, {'arc_half_width': EXAMPLE2_HALF_WIDTH}),
    NamedEntry('example2-b2', 'schur', 'outer Schur function built on example2-phi', example2_b2, {},
               {'arc_half_width': EXAMPLE2_HALF_WIDTH}),
    NamedEntry('example4-nu', 'disk-measure', '(1 - s)^{-1/2} ds on [0, 1)', example4_nu,
               {'exponent': -0.5, 'angle': 0.0}, {'box_mass': '2 sqrt(delta)', 'total_mass': 2.0}),
    NamedEntry('example4-phi', 'function', '(z - 1)/(z + 1)^{1/3}', example4_phi, {},
               {'bounded': False, 'in_d1': True}),
    NamedEntry('pole-at-1', 'function', '1/(1 - z)', pole_at_one, {}, {'boundary_value_at_1': None}),
    NamedEntry('singular-at-1', 'schur', 'atomic singular inner function exp(-s (1 + z)/(1 - z))',
               singular_at_one, {'mass': 1.0, 'angle': 0.0}, {}),
    NamedEntry('raised-cosine', 'measure', '(1 + cos t) dm on the circle', raised_cosine, {},
               {'total_mass': 1.0}),
)

CATALOG = {entry.name: entry for entry in _ENTRIES}


def list_named() -> list:
    return [entry.to_dict() for entry in _ENTRIES]


def get_entry(name: str) -> NamedEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise ConfigError(f"unknown named object {name!r}", field='name') from None


def build_named(name: str, params: dict = None, kind: str = None):
    entry = get_entry(name)
    if kind is not None and entry.kind != kind:
        raise ConfigError(f"{name!r} is a {entry.kind}, expected a {kind}", field='name')
    logger.debug(f"building named object {name} with {params or {}}")
    return entry.build(**(params or {}))

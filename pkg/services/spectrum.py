"""Boundary spectrum of Schur functions and chordal distances on the circle"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from services.disk_functions import SchurFunction, UnitCirclePoint
from services.measures import BoundaryMeasure
from services.quadrature import TWO_PI, QuadratureConfig, wrap_angle

logger = logging.getLogger(__name__)

IN_THRESHOLD = 1.0 - 1e-3
OUT_THRESHOLD = 1.0 - 1e-6
STOLZ_WIDTH = 4


def _chord(a: float, b: float) -> float:
    return 2.0 * math.sin(min(abs(float(wrap_angle(a - b))), math.pi) / 2.0)


def _in_arc(angle: float, arc, tol: float = 0.0) -> bool:
    start, end = arc
    if end - start >= TWO_PI - tol:
        return True
    offset = (angle - start) % TWO_PI
    return offset <= (end - start) + tol or offset >= TWO_PI - tol


def _arc_distance(first, second) -> float:
    """Chordal distance between two closed arcs (points are arcs of zero length)"""
    for angle in first:
        if _in_arc(angle, second):
            return 0.0
    for angle in second:
        if _in_arc(angle, first):
            return 0.0
    return min(_chord(a, b) for a in first for b in second)


@dataclass(frozen=True)
class BoundarySpectrum:
    """Finite union of closed arcs and points.

    When ``closure`` is set the stored set is the closure of the spectrum;
    ``excluded`` lists the angles known to lie outside the spectrum itself.
    """

    points: tuple = ()
    arcs: tuple = ()
    closure: bool = False
    excluded: tuple = field(default=())

    @property
    def is_empty(self) -> bool:
        return not self.points and not self.arcs

    @property
    def is_full_circle(self) -> bool:
        return any(end - start >= TWO_PI for start, end in self.arcs)

    def _components(self):
        return [(p.angle, p.angle) for p in self.points] + [tuple(a) for a in self.arcs]

    def contains(self, zeta: UnitCirclePoint, tol: float = 1e-12) -> bool:
        """Membership in the stored closed set"""
        return self.distance(zeta) <= tol

    def in_spectrum(self, zeta: UnitCirclePoint, tol: float = 1e-12) -> bool:
        """Membership in the spectrum itself, honouring excluded points"""
        if any(_chord(zeta.angle, e) <= tol for e in self.excluded):
            return False
        return self.contains(zeta, tol)

    def distance(self, zeta: UnitCirclePoint) -> float:
        if self.is_empty:
            return math.inf
        return min(_arc_distance((zeta.angle, zeta.angle), c) for c in self._components())

    def distance_from_disk(self, z: np.ndarray) -> np.ndarray:
        """Euclidean distance from points of the closed disk to the stored set"""
        z = np.asarray(z, dtype=complex)
        if self.is_empty:
            return np.full(z.shape, np.inf)
        best = np.full(z.shape, np.inf)
        radius = np.abs(z)
        angles = np.mod(np.angle(z), TWO_PI)
        for start, end in self._components():
            for edge in (start, end):
                best = np.minimum(best, np.abs(z - np.exp(1j * edge)))
            if end > start:
                inside = np.mod(angles - start, TWO_PI) <= end - start
                best = np.where(inside, np.minimum(best, 1.0 - radius), best)
        return best

    def boundary_angles(self) -> tuple:
        """Angles where In/Out verdicts may legitimately be undecided"""
        edges = [p.angle for p in self.points]
        for start, end in self.arcs:
            if end - start < TWO_PI:
                edges.extend([start % TWO_PI, end % TWO_PI])
        return tuple(edges) + tuple(self.excluded)

    def union(self, other):
        return BoundarySpectrum(
            points=self.points + other.points,
            arcs=self.arcs + other.arcs,
            closure=self.closure or other.closure,
            excluded=tuple(e for e in self.excluded if not other.contains(UnitCirclePoint(e)))
            + tuple(e for e in other.excluded if not self.contains(UnitCirclePoint(e))),
        )

    def to_dict(self) -> dict:
        return {
            'points': [p.angle for p in self.points],
            'arcs': [[float(a), float(b)] for a, b in self.arcs],
            'closure': self.closure,
            'excluded': [float(e) for e in self.excluded],
        }


def boundary_spectrum(b: SchurFunction, quad: Optional[QuadratureConfig] = None) -> BoundarySpectrum:
    """sigma(b) from the zeros, singular atoms and the support of -log|b| on the circle"""
    if abs(b.constant) < 1.0:
        logger.info("constant factor below one in modulus: spectrum is the whole circle")
        return BoundarySpectrum(arcs=((0.0, TWO_PI),))
    points = ()
    if b.singular is not None:
        points = tuple(p for p, _ in b.singular.atoms)
    arcs, excluded, closure = (), (), False
    if b.outer is not None and not b.outer.is_trivial:
        outer = b.outer.with_quad(quad) if quad is not None else b.outer
        arcs, excluded = outer.negative_support()
        closure = bool(arcs)
    # finite Blaschke products have no zeros accumulating at the circle
    spectrum = BoundarySpectrum(points=points, arcs=tuple(arcs), closure=closure, excluded=tuple(excluded))
    logger.debug(f"boundary spectrum: {spectrum.to_dict()}")
    return spectrum


@dataclass(frozen=True)
class SpectrumVerdict:
    verdict: str
    liminf: float
    level_minima: tuple

    def to_dict(self) -> dict:
        return {'verdict': self.verdict, 'liminf': self.liminf, 'level_minima': list(self.level_minima)}


def in_spectrum_sampled(b: SchurFunction, point: UnitCirclePoint, depth: int = 24) -> SpectrumVerdict:
    """In/Out/Undecided from min |b| over z = (1 - 2^-k) e^{i(arg + j 2^-k)}, |j| <= 4"""
    if depth < 3:
        raise ValueError("sampling depth must be at least 3")
    offsets = np.arange(-STOLZ_WIDTH, STOLZ_WIDTH + 1)
    minima = []
    for k in range(1, depth + 1):
        step = 2.0 ** -k
        z = (1.0 - step) * np.exp(1j * (point.angle + offsets * step))
        minima.append(float(np.min(np.abs(b(z)))))
    estimate = min(minima[-3:])
    if estimate < IN_THRESHOLD:
        verdict = 'In'
    elif estimate >= OUT_THRESHOLD:
        verdict = 'Out'
    else:
        verdict = 'Undecided'
        logger.warning(f"spectrum membership undecided at angle {point.angle:.6f} (liminf ~ {estimate:.8f})")
    return SpectrumVerdict(verdict, estimate, tuple(minima))


def support_distance(mu: BoundaryMeasure, spectrum: BoundarySpectrum,
                     quad: Optional[QuadratureConfig] = None) -> float:
    """Chordal distance between supp(mu) and the spectrum (inf when either is empty)"""
    if spectrum.is_empty:
        return math.inf
    points, arcs = mu.support(quad)
    components = [(p.angle, p.angle) for p in points] + [tuple(a) for a in arcs]
    if not components:
        return math.inf
    return min(_arc_distance(c, s) for c in components for s in spectrum._components())

import math

import pytest

from services.catalog import example1_b, example2_b2, singular_at_one
from services.disk_functions import BlaschkeProduct, SchurFunction, UnitCirclePoint
from services.measures import BoundaryMeasure
from services.spectrum import BoundarySpectrum, boundary_spectrum, in_spectrum_sampled, support_distance


class TestBoundarySpectrum:
    def test_finite_blaschke_has_empty_spectrum(self, quad):
        spectrum = boundary_spectrum(SchurFunction(BlaschkeProduct([0.5, -0.2j])), quad)
        assert spectrum.is_empty
        assert spectrum.distance(UnitCirclePoint(0.0)) == math.inf

    def test_singular_atom_is_a_point(self, quad):
        spectrum = boundary_spectrum(singular_at_one(), quad)
        assert [p.angle for p in spectrum.points] == [0.0]
        assert spectrum.in_spectrum(UnitCirclePoint(0.0))
        assert not spectrum.in_spectrum(UnitCirclePoint(1.0))

    def test_small_constant_fills_the_circle(self, quad):
        spectrum = boundary_spectrum(SchurFunction(constant=0.5), quad)
        assert spectrum.is_full_circle

    def test_outer_arc_excludes_unimodular_point(self, quad):
        spectrum = boundary_spectrum(example2_b2(), quad)
        assert spectrum.closure
        assert len(spectrum.arcs) == 1
        assert spectrum.contains(UnitCirclePoint(0.0))
        assert not spectrum.in_spectrum(UnitCirclePoint(0.0))
        assert spectrum.in_spectrum(UnitCirclePoint(0.3))
        assert not spectrum.contains(UnitCirclePoint(math.pi))

    def test_closure_is_full_circle_for_example1(self, quad):
        spectrum = boundary_spectrum(example1_b(0.5), quad)
        assert spectrum.is_full_circle
        assert spectrum.contains(UnitCirclePoint(0.5))
        assert not spectrum.in_spectrum(UnitCirclePoint(0.5))
        assert 0.5 in spectrum.boundary_angles()

    def test_to_dict(self, quad):
        data = boundary_spectrum(singular_at_one(angle=1.0), quad).to_dict()
        assert data == {'points': [1.0], 'arcs': [], 'closure': False, 'excluded': []}


class TestSampledMembership:
    def test_atom_is_in(self):
        assert in_spectrum_sampled(singular_at_one(), UnitCirclePoint(0.0)).verdict == 'In'

    def test_blaschke_is_out(self):
        verdict = in_spectrum_sampled(SchurFunction(BlaschkeProduct([0.5])), UnitCirclePoint(1.0))
        assert verdict.verdict == 'Out'
        assert len(verdict.level_minima) == 24

    def test_small_constant_is_in(self):
        assert in_spectrum_sampled(SchurFunction(constant=0.5), UnitCirclePoint(2.0)).verdict == 'In'

    def test_depth_must_reach_three(self):
        with pytest.raises(ValueError):
            in_spectrum_sampled(singular_at_one(), UnitCirclePoint(0.0), depth=2)


class TestSupportDistance:
    def test_antipodal_atom(self, quad):
        spectrum = boundary_spectrum(singular_at_one(), quad)
        assert support_distance(BoundaryMeasure.dirac(math.pi), spectrum, quad) == pytest.approx(2.0)

    def test_empty_spectrum(self, quad):
        assert support_distance(BoundaryMeasure.dirac(0.0), BoundarySpectrum(), quad) == math.inf

    def test_overlap(self, quad):
        spectrum = boundary_spectrum(singular_at_one(), quad)
        assert support_distance(BoundaryMeasure.lebesgue_measure(), spectrum, quad) == 0.0

import math

import numpy as np
import pytest
from scipy import integrate

from services.catalog import W0, _example2_log_modulus, example1_outer, example2_phi, pole_at_one, singular_at_one
from services.disk_functions import (
    AtomicSingularInner,
    BlaschkeProduct,
    ConstantOuter,
    NoLimit,
    Polynomial,
    SampledOuter,
    SchurFunction,
    SzegoKernel,
    UnitCirclePoint,
    derivative,
    radial_boundary_value,
)
from services.exceptions import AtomEvaluation, TooCloseToBoundary


def finite_difference(f, z, h=1e-6):
    return (f(z + h) - f(z - h)) / (2 * h)


class TestUnitCirclePoint:
    def test_angle_is_normalized(self):
        assert UnitCirclePoint(-math.pi / 2).angle == pytest.approx(3 * math.pi / 2)
        assert UnitCirclePoint(2 * math.pi).angle == pytest.approx(0.0)

    def test_chordal_distance(self):
        assert UnitCirclePoint(0.0).chordal_distance(UnitCirclePoint(math.pi)) == pytest.approx(2.0)
        assert UnitCirclePoint(0.1).chordal_distance(UnitCirclePoint(0.1)) == 0.0

    def test_from_complex(self):
        assert UnitCirclePoint.from_complex(1j).angle == pytest.approx(math.pi / 2)


class TestBlaschkeProduct:
    def test_vanishes_at_zeros(self):
        zeros = [0.5, -0.3j, 0.2 + 0.6j]
        b = BlaschkeProduct(zeros)
        assert np.max(np.abs(b(np.array(zeros)))) < 1e-15

    def test_unimodular_on_circle(self):
        b = BlaschkeProduct([0.5, -0.3j, 0.9])
        values = b(np.exp(1j * np.linspace(0, 2 * math.pi, 200)))
        assert np.max(np.abs(np.abs(values) - 1.0)) < 1e-13

    def test_zero_at_origin_is_identity_factor(self):
        assert BlaschkeProduct([0.0])(0.3 + 0.1j) == pytest.approx(0.3 + 0.1j)

    def test_derivative_matches_finite_difference(self):
        b = BlaschkeProduct([0.5, -0.3j])
        z = 0.2 + 0.1j
        assert b.derivative(z) == pytest.approx(finite_difference(b, z), rel=1e-7)

    def test_rejects_zero_on_circle(self):
        with pytest.raises(ValueError):
            BlaschkeProduct([1.0])

    def test_hot_spots_skip_origin(self):
        spots = BlaschkeProduct([0.0, 0.5j]).hot_spots()
        assert len(spots) == 1
        assert spots[0].angle == pytest.approx(math.pi / 2)
        assert spots[0].scale == pytest.approx(0.5)


class TestAtomicSingularInner:
    def test_evaluation_at_atom_raises(self):
        with pytest.raises(AtomEvaluation):
            AtomicSingularInner([(UnitCirclePoint(0.0), 1.0)])(1.0)

    def test_unimodular_off_the_atom(self):
        s = AtomicSingularInner([(UnitCirclePoint(0.0), 1.0)])
        values = s(np.exp(1j * np.array([0.5, 2.0, 4.0])))
        assert np.max(np.abs(np.abs(values) - 1.0)) < 1e-13

    def test_value_at_origin(self):
        s = AtomicSingularInner([(UnitCirclePoint(0.0), 2.0)])
        assert s(0.0) == pytest.approx(math.exp(-2.0))

    def test_derivative_matches_finite_difference(self):
        s = AtomicSingularInner([(UnitCirclePoint(1.0), 0.5)])
        z = 0.3 - 0.2j
        assert s.derivative(z) == pytest.approx(finite_difference(s, z), rel=1e-6)

    def test_rejects_nonpositive_mass(self):
        with pytest.raises(ValueError):
            AtomicSingularInner([(0.0, 0.0)])


class TestPolynomial:
    def test_monomial(self):
        p = Polynomial.monomial(3, 2.0)
        assert p(0.5) == pytest.approx(0.25)
        assert p.degree == 3
        assert p.exact_h2_norm_sq() == pytest.approx(4.0)

    def test_divided_difference(self):
        p = Polynomial([1.0, -2.0, 0.5j, 3.0])
        zeta = UnitCirclePoint(0.7)
        value = p(zeta.point)
        g = p.divided_difference(zeta, value)
        z = 0.3 + 0.4j
        assert p(z) == pytest.approx(value + (z - zeta.point) * g(z))


def test_szego_kernel_norm():
    c = SzegoKernel(0.6j)
    assert c.norm_sq == pytest.approx(1.0 / 0.64)
    assert c(0.6j) == pytest.approx(1.0 / 0.64)


class TestSchurFunction:
    def test_rejects_large_constant(self):
        with pytest.raises(ValueError):
            SchurFunction(constant=1.5)

    def test_finite_blaschke_is_inner(self):
        b = SchurFunction(BlaschkeProduct([0.5]), constant=1j)
        assert b.is_inner
        assert b.is_finite_blaschke

    def test_outer_factor_breaks_innerness(self):
        b = SchurFunction(BlaschkeProduct([0.5]), outer=ConstantOuter(-0.1))
        assert not b.is_inner
        assert b(0.5) == 0

    def test_singular_is_inner_but_not_blaschke(self):
        b = singular_at_one()
        assert b.is_inner
        assert not b.is_finite_blaschke

    def test_zero_constant(self):
        b = SchurFunction(constant=0.0)
        assert b(0.3) == 0
        assert b.boundary_log_modulus(np.array([0.0]))[0] == -np.inf

    def test_derivative_of_product(self):
        b = SchurFunction(BlaschkeProduct([0.4]), AtomicSingularInner([(UnitCirclePoint(2.0), 0.3)]), constant=-1)
        z = 0.1 + 0.2j
        assert b.derivative(z) == pytest.approx(finite_difference(b, z), rel=1e-6)

    def test_max_modulus_respects_unit_ball(self):
        assert SchurFunction(BlaschkeProduct([0.3, 0.7j]), constant=0.9).max_modulus() <= 0.9 + 1e-12


class TestOuterFunctions:
    def test_constant_outer(self):
        assert ConstantOuter(-0.5)(0.3) == pytest.approx(math.exp(-0.5))

    def test_sampled_outer_at_origin_is_geometric_mean(self):
        samples = -0.2 - 0.1 * np.cos(np.linspace(0, 2 * math.pi, 256, endpoint=False))
        outer = SampledOuter(samples)
        assert outer(0.0) == pytest.approx(math.exp(-0.2), rel=1e-12)

    def test_sampled_outer_refuses_points_near_circle(self):
        outer = SampledOuter(np.full(64, -0.1))
        with pytest.raises(TooCloseToBoundary):
            outer(0.99)

    def test_sampled_outer_rejects_positive_log_modulus(self):
        with pytest.raises(ValueError):
            SampledOuter(np.full(64, 0.1))

    def test_example1_outer_is_unimodular_at_zeta_only(self):
        outer = example1_outer(0.0)
        assert outer.log_modulus(np.array([0.0]))[0] == pytest.approx(0.0, abs=1e-15)
        assert np.all(outer.log_modulus(np.array([0.5, 2.0, 3.0])) < 0)
        assert abs(outer.boundary(1.0)) == pytest.approx(1.0)

    def test_example1_outer_exact_form(self):
        outer = example1_outer(0.0)
        assert outer(0.5) == pytest.approx((1.0 - W0) / (1.0 - W0 * 0.5))

    def test_callback_outer_at_origin_is_geometric_mean(self):
        half = math.pi / 6
        mean, _ = integrate.quad(lambda t: float(_example2_log_modulus(t)), -half, half, points=[0.0], limit=200)
        outer = example2_phi()
        assert abs(outer(0.0)) == pytest.approx(math.exp(mean / (2 * math.pi)), rel=1e-6)

    def test_callback_outer_support(self):
        arcs, excluded = example2_phi().negative_support()
        assert len(arcs) == 1
        assert excluded == (0.0,)


class TestRadialBoundaryValue:
    def test_blaschke_value_is_exact(self):
        b = BlaschkeProduct([0.5])
        zeta = UnitCirclePoint(1.0)
        assert radial_boundary_value(b, zeta) == pytest.approx(b(zeta.point), abs=1e-12)

    def test_singular_value_at_atom_is_zero(self):
        value = radial_boundary_value(singular_at_one(), UnitCirclePoint(0.0))
        assert abs(value) < 1e-8

    def test_pole_has_no_limit(self):
        value = radial_boundary_value(pole_at_one(), UnitCirclePoint(0.0))
        assert isinstance(value, NoLimit)
        assert not value


def test_derivative_outside_disk_raises():
    with pytest.raises(ValueError):
        derivative(Polynomial([0, 1]), 1.5)


def test_arithmetic_builds_combinations():
    f = Polynomial([0, 1]) + 2.0 * SzegoKernel(0.5)
    assert f(0.2) == pytest.approx(0.2 + 2.0 / 0.9)
    product = Polynomial([0, 1]) * Polynomial([1, 1])
    assert product(0.5) == pytest.approx(0.75)
    assert product.derivative(0.5) == pytest.approx(2.0)

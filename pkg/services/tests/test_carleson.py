import math

import numpy as np
import pytest

from services.carleson import (
    CarlesonBox,
    DiskAtoms,
    PowerLawRayMeasure,
    PushedBoundaryDensity,
    carleson_constant_h2,
    default_delta_grid,
    is_carleson_for_dz,
    is_multiplier_ku_to_dz,
    is_multiplier_of_dz,
    model_space_carleson_constant,
    model_space_dz_constant,
    multiplier_bound,
    sup_norm_test,
)
from services.catalog import example4_nu, example4_phi
from services.disk_functions import BlaschkeProduct, Polynomial, UnitCirclePoint
from services.kernels import TakenakaBasis
from services.measures import BoundaryMeasure


class TestCarlesonBox:
    @pytest.mark.parametrize('length', [0.0, -1.0, 7.0])
    def test_rejects_bad_lengths(self, length):
        with pytest.raises(ValueError):
            CarlesonBox(0.0, length)

    def test_contains(self):
        box = CarlesonBox(0.0, 0.5)
        assert box.contains(0.8)
        assert not box.contains(0.4)
        assert not box.contains(0.8j)

    def test_origin_only_in_boxes_reaching_past_it(self):
        assert CarlesonBox(1.0, 1.5).contains(0.0)
        assert not CarlesonBox(1.0, 1.0).contains(0.0)


def test_default_grid():
    grid = default_delta_grid()
    assert grid[0] == 1.0
    assert grid[-1] == 2.0 ** -20
    assert len(grid) == 21


class TestPowerLawRayMeasure:
    @pytest.mark.parametrize('delta', [1.0, 1e-2, 1e-6])
    def test_box_mass_closed_form(self, delta):
        assert example4_nu().box_mass(CarlesonBox(0.0, delta)) == pytest.approx(2.0 * math.sqrt(delta))

    @pytest.mark.parametrize('delta', [0.5, 1e-3])
    def test_quadrature_agrees(self, delta):
        nu = example4_nu()
        box = CarlesonBox(0.0, delta)
        assert nu.box_mass_quadrature(box) == pytest.approx(nu.box_mass(box), rel=1e-10)

    def test_reweighted_agrees(self):
        nu = PowerLawRayMeasure(angle=0.3).reweighted(UnitCirclePoint(1.0))
        box = CarlesonBox(0.3, 0.25)
        assert nu.box_mass_quadrature(box) == pytest.approx(nu.box_mass(box), rel=1e-10)

    def test_box_missing_the_ray(self):
        assert example4_nu().box_mass(CarlesonBox(math.pi, 0.5)) == 0.0

    def test_cannot_reweight_twice(self):
        with pytest.raises(ValueError):
            example4_nu().reweighted(UnitCirclePoint(0.0)).reweighted(UnitCirclePoint(0.0))

    def test_rejects_nonintegrable_exponent(self):
        with pytest.raises(ValueError):
            PowerLawRayMeasure(exponent=-1.0)


class TestCarlesonConstant:
    def test_ray_measure_is_not_carleson(self):
        verdict = carleson_constant_h2(example4_nu())
        assert verdict.carleson == 'unbounded'
        assert not verdict.bounded
        assert verdict.growth_exponent == pytest.approx(0.5, abs=1e-6)
        assert verdict.to_dict()['constant'] == 'unbounded'

    def test_reweighted_ray_measure_is_carleson(self):
        verdict = is_carleson_for_dz(example4_nu(), UnitCirclePoint(0.0))
        assert verdict.carleson is True
        assert verdict.constant == pytest.approx(0.4)
        assert verdict.certificates['zeta'] == 0.0

    def test_single_atom(self):
        verdict = carleson_constant_h2(DiskAtoms([0.5], [1.0]))
        assert verdict.carleson is True
        assert verdict.constant == pytest.approx(1.0)

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            carleson_constant_h2(example4_nu(), [])


class TestDiskAtoms:
    def test_origin_counts_for_long_arcs_only(self):
        atoms = DiskAtoms([0.0], [2.0])
        assert atoms.box_mass(CarlesonBox(0.0, 1.5)) == 2.0
        assert atoms.box_mass(CarlesonBox(0.0, 1.0)) == 0.0
        assert atoms.total_mass() == 2.0

    def test_reweighted(self):
        atoms = DiskAtoms([0.5], [1.0]).reweighted(UnitCirclePoint(0.0))
        assert atoms.masses[0] == pytest.approx(0.25)

    def test_rejects_points_outside_disk(self):
        with pytest.raises(ValueError):
            DiskAtoms([1.0], [1.0])


def test_pushed_density_keeps_mass(quad):
    nu = PushedBoundaryDensity(BoundaryMeasure.lebesgue_measure(2.0), 0.1, quad)
    points, weights = nu.discretize()
    assert np.sum(weights) == pytest.approx(2.0)
    assert np.allclose(np.abs(points), 0.9)
    assert nu.box_mass(CarlesonBox(0.0, 0.05)) == 0.0


class TestMultipliers:
    def test_sup_norm(self, quad):
        assert sup_norm_test(Polynomial([1.0, 1.0]), quad)['bounded']
        assert not sup_norm_test(example4_phi(), quad)['bounded']

    def test_polynomial_multiplies_local_dirichlet_space(self, quad):
        assert is_multiplier_of_dz(Polynomial([0.0, 1.0]), UnitCirclePoint(0.0), quad)

    def test_unbounded_symbol_is_no_multiplier(self, quad):
        verdict = is_multiplier_of_dz(example4_phi(), UnitCirclePoint(0.0), quad)
        assert not verdict
        assert verdict.to_dict()['multiplier'] is False

    def test_unbounded_symbol_maps_model_space(self, quad):
        blaschke = BlaschkeProduct([0.5, -0.3])
        verdict = is_multiplier_ku_to_dz(example4_phi(), blaschke, UnitCirclePoint(0.0), quad)
        assert verdict
        constant = verdict.certificates['carleson_constant']
        assert math.isfinite(constant)

        f = TakenakaBasis(blaschke).function([1.0, -0.5j])
        bound = multiplier_bound(example4_phi(), f, UnitCirclePoint(0.0), constant,
                                 verdict.certificates['dirichlet']['value'], quad)
        assert bound['holds']

    def test_repeated_zeros(self, quad):
        with pytest.raises(ValueError):
            is_multiplier_ku_to_dz(Polynomial([1.0]), BlaschkeProduct([0.5, 0.5]), UnitCirclePoint(0.0), quad)


def test_model_space_constant_is_finite(quad):
    constant = model_space_carleson_constant(example4_nu(), BlaschkeProduct([0.5, -0.3]), quad)
    assert math.isfinite(constant)
    assert constant > 0


def test_model_space_constant_on_constants(quad):
    # K_z holds the constants only: nu(D) = 2 and the integral of |z - 1|^2 d nu is 2/5
    assert model_space_carleson_constant(example4_nu(), BlaschkeProduct([0.0]), quad) == pytest.approx(2.0)
    assert model_space_dz_constant(example4_nu(), BlaschkeProduct([0.0]), UnitCirclePoint(0.0), quad) == \
        pytest.approx(4.0 * 2.0 + 2.0 * 0.4)


def test_dz_constant_bounds_model_space_constant(quad):
    nu, blaschke, zeta = example4_nu(), BlaschkeProduct([0.5, -0.3]), UnitCirclePoint(0.0)
    dz_constant = model_space_dz_constant(nu, blaschke, zeta, quad)
    assert dz_constant == pytest.approx(
        4.0 * nu.total_mass() + 2.0 * model_space_carleson_constant(nu.reweighted(zeta), blaschke, quad))
    assert model_space_carleson_constant(nu, blaschke, quad) <= dz_constant

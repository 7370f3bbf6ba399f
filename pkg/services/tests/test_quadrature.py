import math

import numpy as np
import pytest

from services.exceptions import ConfigError
from services.quadrature import (
    TWO_PI,
    HotSpot,
    IntegralResult,
    QuadratureConfig,
    area_levels,
    assess_growth,
    circle_rule,
    conjugate_samples,
    gauss_jacobi,
    radial_panels,
    shell_sums,
    uniform_angles,
    wrap_angle,
)


class TestQuadratureConfig:
    def test_defaults(self):
        config = QuadratureConfig()
        assert config.circle_samples == 1024
        assert config.radial_levels == 24
        assert config.gauss_order == 16

    @pytest.mark.parametrize('field,value', [
        ('circle_samples', 100),
        ('circle_samples', 32),
        ('radial_levels', 4),
        ('gauss_order', 2),
        ('rel_tol', 0.0),
    ])
    def test_rejects_bad_values(self, field, value):
        with pytest.raises(ConfigError) as excinfo:
            QuadratureConfig(**{field: value})
        assert excinfo.value.field == field

    def test_from_settings_reads_django_settings(self, settings):
        settings.QUADRATURE_CIRCLE_SAMPLES = 512
        assert QuadratureConfig.from_settings().circle_samples == 512

    def test_from_settings_overrides_win(self, settings):
        settings.QUADRATURE_CIRCLE_SAMPLES = 512
        assert QuadratureConfig.from_settings(circle_samples=2048).circle_samples == 2048

    def test_with_overrides_keeps_other_fields(self):
        config = QuadratureConfig(gauss_order=8).with_overrides(radial_levels=30)
        assert config.gauss_order == 8
        assert config.radial_levels == 30

    def test_level_scale_follows_refinement_factor(self):
        assert QuadratureConfig().level_scale(3) == 0.125
        assert QuadratureConfig(refinement_factor=4).level_scale(3) == 4.0 ** -3

    def test_rejects_levels_below_double_precision(self):
        with pytest.raises(ConfigError) as excinfo:
            QuadratureConfig(radial_levels=24, refinement_factor=8)
        assert excinfo.value.field == 'refinement_factor'

    def test_agreement_tolerance(self):
        config = QuadratureConfig(rel_tol=1e-2, abs_tol=1e-6)
        assert config.agreement_tolerance(10.0) == pytest.approx(0.1)
        assert config.agreement_tolerance(0.0) == 1e-6
        assert config.agreement_tolerance(10.0, rel_floor=0.5) == 5.0
        assert QuadratureConfig().agreement_tolerance(2.0, 1e-3, 1e-4) == pytest.approx(2e-3)


class TestRadialLevels:
    def test_dyadic_panels(self):
        assert radial_panels(3) == [(0.0, 0.5), (0.5, 0.75), (0.75, 0.875)]

    def test_panels_follow_factor(self):
        panels = radial_panels(3, factor=4)
        assert panels[0] == (0.0, 0.75)
        assert panels[2][1] == pytest.approx(1.0 - 4.0 ** -3)

    def test_area_levels_use_config_factor(self):
        config = QuadratureConfig(refinement_factor=4, radial_levels=10)
        radii = [radii for _, radii, _, _ in area_levels(config)]
        assert len(radii) == 10
        assert radii[0].max() < 0.75 < radii[1].min()
        assert radii[-1].max() < 1.0 - 4.0 ** -10

    def test_radial_weights_integrate_disk_area(self):
        config = QuadratureConfig(refinement_factor=4, radial_levels=20)
        total = sum(float(np.sum(w[:, None] * rule.weights[None, :])) for _, _, w, rule in area_levels(config))
        assert total == pytest.approx(1.0, abs=1e-11)


class TestCircleRule:
    def test_weights_sum_to_one(self, quad):
        rule = circle_rule(quad)
        assert np.sum(rule.weights) == pytest.approx(1.0, abs=1e-13)

    def test_integrates_trigonometric_polynomial(self, quad):
        rule = circle_rule(quad, center=0.3, center_depth=20)
        assert np.sum(rule.weights * np.cos(rule.angles) ** 2) == pytest.approx(0.5, abs=1e-13)

    def test_grades_toward_boundary_hot_spot(self, quad):
        rule = circle_rule(quad, hot_spots=(HotSpot(1.0, 0.0),))
        gaps = np.abs(wrap_angle(rule.angles - 1.0))
        assert gaps.min() < 1e-10
        assert np.sum(rule.weights) == pytest.approx(1.0, abs=1e-13)

    def test_chords_match_direct_difference(self, quad):
        rule = circle_rule(quad, center=2.0)
        direct = rule.points - np.exp(2.0j)
        assert np.max(np.abs(rule.chords() - direct)) < 1e-13

    def test_levels_are_dyadic_shells(self, quad):
        rule = circle_rule(quad, center_depth=10)
        levels = rule.levels()
        t = np.abs(rule.offsets)
        assert np.all(t[levels == 1] >= math.pi / 2)
        assert np.all(t[levels == 3] <= math.pi / 4)


def test_uniform_angles_cover_circle():
    angles = uniform_angles(8)
    assert angles[0] == 0.0
    assert angles[-1] == pytest.approx(TWO_PI * 7 / 8)


def test_wrap_angle_range():
    wrapped = wrap_angle(np.array([-4.0, 0.0, 3.5, 7.0]))
    assert np.all(wrapped >= -math.pi)
    assert np.all(wrapped < math.pi)
    assert wrapped[3] == pytest.approx(7.0 - TWO_PI)


def test_gauss_jacobi_integrates_inverse_square_root():
    x, w = gauss_jacobi(32, 0.0, -0.5)
    # integral of (1 + x)^(-1/2) over [-1, 1]
    assert np.sum(w) == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-14)


def test_conjugate_of_cosine_is_sine():
    angles = uniform_angles(64)
    assert np.max(np.abs(conjugate_samples(np.cos(angles)) - np.sin(angles))) < 1e-12


class TestAssessGrowth:
    def test_geometric_growth_diverges(self):
        diverged, exponent = assess_growth([2.0 ** k for k in range(12)])
        assert diverged
        assert exponent == pytest.approx(1.0)

    def test_convergent_sums_are_finite(self):
        diverged, exponent = assess_growth([1.0 - 2.0 ** -k for k in range(1, 20)])
        assert not diverged
        assert exponent < 0.01

    def test_short_sequences_never_diverge(self):
        diverged, _ = assess_growth([1.0, 2.0, 4.0])
        assert not diverged


def test_shell_sums_end_at_total(quad):
    rule = circle_rule(quad, center_depth=12)
    contributions = rule.weights * np.ones(rule.size)
    sums = shell_sums(contributions, rule, 12)
    assert sums.size == 12
    assert sums[-1] == pytest.approx(1.0, abs=1e-13)
    assert np.all(np.diff(sums) >= 0)


class TestIntegralResult:
    def test_divergent_reports_diverged(self):
        result = IntegralResult.divergent('douglas', (1.0, 2.0), 1.0)
        assert result.diverged
        assert not result.finite
        assert result.to_dict()['value'] == 'diverged'

    def test_scaled(self):
        result = IntegralResult(2.0, 'area', (1.0, 2.0))
        assert result.scaled(3.0).value == 6.0
        assert result.scaled(3.0).evidence == (3.0, 6.0)
        assert result.scaled(0).value == 0.0

    def test_scaled_divergent_stays_divergent(self):
        result = IntegralResult.divergent('area')
        assert result.scaled(2.0).diverged

import math

import pytest
from rest_framework import serializers

from api.serializers import (
    ComplexField,
    build_blaschke,
    build_disk_measure,
    build_function,
    build_measure,
    build_schur,
    parse_config,
)
from services.carleson import DiskAtoms, PowerLawRayMeasure
from services.disk_functions import Polynomial, SchurFunction, UnitCirclePoint
from services.exceptions import ConfigError
from services.kernels import DbrKernel


class TestComplexField:
    @pytest.mark.parametrize('data,expected', [
        (0.5, 0.5 + 0j),
        ([0.1, -0.2], 0.1 - 0.2j),
        ({'re': 0.3, 'im': 0.4}, 0.3 + 0.4j),
        ({'im': 1}, 1j),
    ])
    def test_forms(self, data, expected):
        assert ComplexField().to_internal_value(data) == expected

    @pytest.mark.parametrize('data', [True, 'half', [1, 2, 3], None])
    def test_rejects(self, data):
        with pytest.raises(serializers.ValidationError):
            ComplexField().to_internal_value(data)

    def test_representation(self):
        assert ComplexField().to_representation(1 - 2j) == [1.0, -2.0]


class TestBuilders:
    def test_polynomial(self):
        f = build_function({'kind': 'polynomial', 'coefficients': [1, [0, 1]]})
        assert isinstance(f, Polynomial)
        assert f(0.5) == pytest.approx(1 + 0.5j)

    def test_bare_schur_spec_is_a_function(self):
        assert isinstance(build_function({'blaschke': [0.5]}), SchurFunction)

    def test_kernel_with_boundary_anchor(self):
        kernel = build_function({'kind': 'kernel', 'schur': {'blaschke': [0.5]}, 'anchor': {'angle': 0.0}})
        assert isinstance(kernel, DbrKernel)
        assert isinstance(kernel.anchor, UnitCirclePoint)

    def test_named_function(self):
        f = build_function({'kind': 'named', 'name': 'example4-phi'})
        assert math.isfinite(abs(f(0.5)))

    def test_named_measure_is_not_a_function(self):
        with pytest.raises(ConfigError) as excinfo:
            build_function({'kind': 'named', 'name': 'raised-cosine'}, 'scenarios[0].function')
        assert excinfo.value.field == 'scenarios[0].function.name'

    def test_szego_pole_outside_disk(self):
        with pytest.raises(ConfigError) as excinfo:
            build_function({'kind': 'szego', 'pole': [2, 0]}, 'scenarios[0].function')
        assert excinfo.value.field == 'scenarios[0].function.pole'

    def test_blaschke_zero_outside_disk(self):
        with pytest.raises(ConfigError) as excinfo:
            build_blaschke([0.5, 1.5], 'schur.blaschke')
        assert excinfo.value.field == 'schur.blaschke.zeros[1]'

    def test_schur_constant_too_large(self):
        with pytest.raises(ConfigError) as excinfo:
            build_schur({'constant': 2.0})
        assert excinfo.value.field == 'schur.constant'

    def test_schur_with_outer_and_singular(self):
        b = build_schur({
            'singular': {'atoms': [{'angle': 1.0, 'mass': 0.5}]},
            'outer': {'kind': 'constant', 'value': -0.1},
        })
        assert not b.is_inner
        assert b.singular is not None

    def test_positive_outer_log_modulus(self):
        with pytest.raises(ConfigError) as excinfo:
            build_schur({'outer': {'kind': 'constant', 'value': 0.5}})
        assert excinfo.value.field == 'schur.outer.value'

    def test_unknown_named_params(self):
        with pytest.raises(ConfigError) as excinfo:
            build_schur({'named': 'example1-b', 'params': {'w': 1}})
        assert excinfo.value.field == 'schur.params'

    def test_measure(self):
        mu = build_measure({'atoms': [{'angle': 0.0, 'mass': 2.0}], 'lebesgue': 1.0})
        assert mu.total_mass() == pytest.approx(3.0)

    def test_measure_with_negative_mass(self):
        with pytest.raises(ConfigError) as excinfo:
            build_measure({'atoms': [{'angle': 0.0, 'mass': -1.0}]})
        assert excinfo.value.field == 'measure.atoms[0].mass'

    def test_disk_measures(self):
        assert isinstance(build_disk_measure({'kind': 'ray', 'exponent': -0.25}), PowerLawRayMeasure)
        atoms = build_disk_measure({'kind': 'atoms', 'points': [[0, 0.5]], 'masses': [1.0]})
        assert isinstance(atoms, DiskAtoms)

    def test_disk_atoms_need_masses(self):
        with pytest.raises(ConfigError) as excinfo:
            build_disk_measure({'kind': 'atoms', 'points': [0.5]})
        assert excinfo.value.field == 'disk_measure.masses'


class TestParseConfig:
    def test_scenario_quadrature_inherits_document_defaults(self):
        config = parse_config({
            'quadrature': {'gauss_order': 8},
            'scenarios': [{'id': 'a', 'kind': 'verify', 'suite': 'smoke', 'quadrature': {'radial_levels': 30}}],
        })
        quad = config['scenarios'][0]['quadrature']
        assert quad.gauss_order == 8
        assert quad.radial_levels == 30
        assert config['scenarios'][0]['_path'] == 'scenarios[0]'

    def test_empty_scenarios(self):
        with pytest.raises(ConfigError) as excinfo:
            parse_config({'scenarios': []})
        assert excinfo.value.field == 'scenarios'

    def test_not_an_object(self):
        with pytest.raises(ConfigError):
            parse_config([1, 2])

    def test_bad_delta_grid(self):
        with pytest.raises(ConfigError) as excinfo:
            parse_config({'scenarios': [{'id': 'c', 'kind': 'carleson', 'disk_measure': {'kind': 'ray'},
                                         'delta_grid': [0.5, 7.0]}]})
        assert excinfo.value.field == 'scenarios[0].delta_grid'

import json
import math

import numpy as np
import pytest

from core.models import ScenarioRun
from services.exceptions import ConfigError
from services.scenarios import ScenarioRunner, jsonable, run_scenario

pytestmark = pytest.mark.django_db

MONOMIAL = {'kind': 'polynomial', 'coefficients': [0, 0, 1]}


def dirichlet_scenario(**overrides):
    spec = {
        'id': 'z-squared',
        'kind': 'dirichlet',
        'function': MONOMIAL,
        'zeta': 0.0,
        'methods': ['douglas', 'decomposition'],
        'expect': {'value': 2.0},
    }
    spec.update(overrides)
    return spec


def write_config(tmp_path, document):
    path = tmp_path / 'config.json'
    path.write_text(json.dumps(document), encoding='utf-8')
    return str(path)


class TestDirichletScenario:
    def test_value_artifact_and_run_record(self, out_dir):
        report = ScenarioRunner.from_document({'scenarios': [dirichlet_scenario()]}, out_dir=out_dir).run()
        assert report['success'] and report['passed']
        scenario = report['scenarios'][0]
        assert scenario['results']['value'] == pytest.approx(2.0)
        assert scenario['results']['agree'] is True
        assert scenario['failures'] == []

        artifact = (out_dir / 'z-squared.csv').read_text(encoding='utf-8').splitlines()
        assert artifact[0] == '# dbr_lab dirichlet schema v1'
        assert artifact[1] == 'method,value,diverged,growth_exponent,levels'
        assert len(artifact) == 4

        run = ScenarioRun.objects.get(scenario_id='z-squared')
        assert run.status == 'completed'
        assert run.passed is True
        assert run.artifacts == scenario['artifacts']
        assert run.processing_log['logs']

    def test_reruns_write_identical_bytes(self, tmp_path):
        outputs = []
        for name in ('first', 'second'):
            directory = tmp_path / name
            ScenarioRunner.from_document({'seed': 7, 'scenarios': [dirichlet_scenario()]}, out_dir=directory).run()
            outputs.append((directory / 'z-squared.csv').read_bytes())
        assert outputs[0] == outputs[1]

    def test_json_artifact(self, out_dir):
        ScenarioRunner.from_document({'seed': 4, 'scenarios': [dirichlet_scenario()]}, out_dir=out_dir,
                                     fmt='json').run()
        document = json.loads((out_dir / 'z-squared.json').read_text(encoding='utf-8'))
        assert document['schema'] == 1
        assert document['seed'] == 4
        assert document['kind'] == 'dirichlet'
        assert document['results']['value'] == pytest.approx(2.0)
        assert len(document['rows']) == 2

    def test_failed_expectation(self, out_dir):
        spec = dirichlet_scenario(expect={'value': 3.0})
        report = ScenarioRunner.from_document({'scenarios': [spec]}, out_dir=out_dir).run()
        assert report['success']
        assert not report['passed']
        assert report['scenarios'][0]['failures'][0].startswith('value:')
        assert ScenarioRun.objects.get().passed is False

    def test_route_agreement_expectation(self, out_dir):
        spec = dirichlet_scenario(methods=['douglas', 'area', 'decomposition'], expect={'agree': True})
        assert ScenarioRunner.from_document({'scenarios': [spec]}, out_dir=out_dir).run()['passed']

    def test_one_sided_expectations(self, out_dir):
        spec = dirichlet_scenario(expect={'value_above': 1.5, 'value_below': 2.5, 'diverged': False})
        assert ScenarioRunner.from_document({'scenarios': [spec]}, out_dir=out_dir).run()['passed']

    def test_unknown_expectation_field_fails_the_scenario(self, out_dir):
        spec = dirichlet_scenario(expect={'spline': 1.0})
        scenario = ScenarioRunner.from_document({'scenarios': [spec]}, out_dir=out_dir).run()['scenarios'][0]
        assert scenario['status'] == 'failed'
        assert scenario['error_type'] == 'ConfigError'
        assert 'scenarios[0].expect.spline' in scenario['error']

    def test_pole_reports_divergence(self, out_dir):
        spec = dirichlet_scenario(function={'kind': 'named', 'name': 'pole-at-1'}, methods=['douglas'],
                                  expect={'diverged': True})
        report = ScenarioRunner.from_document({'scenarios': [spec]}, out_dir=out_dir).run()
        assert report['passed']
        assert report['scenarios'][0]['results']['value'] == 'inf'


class TestConfigErrors:
    def test_unknown_kind(self, out_dir):
        with pytest.raises(ConfigError) as excinfo:
            ScenarioRunner.from_document({'scenarios': [{'id': 'a', 'kind': 'fourier'}]}, out_dir=out_dir)
        assert excinfo.value.field == 'scenarios[0].kind'

    def test_missing_required_field(self, out_dir):
        with pytest.raises(ConfigError) as excinfo:
            ScenarioRunner.from_document({'scenarios': [{'id': 'a', 'kind': 'dirichlet'}]}, out_dir=out_dir)
        assert excinfo.value.field == 'scenarios[0].function'

    def test_duplicate_ids(self, out_dir):
        document = {'scenarios': [dirichlet_scenario(), dirichlet_scenario()]}
        with pytest.raises(ConfigError) as excinfo:
            ScenarioRunner.from_document(document, out_dir=out_dir)
        assert excinfo.value.field == 'scenarios[1].id'

    def test_bad_quadrature(self, out_dir):
        with pytest.raises(ConfigError) as excinfo:
            ScenarioRunner.from_document({'quadrature': {'circle_samples': 100},
                                          'scenarios': [dirichlet_scenario()]}, out_dir=out_dir)
        assert excinfo.value.field == 'quadrature.circle_samples'

    def test_pole_outside_disk_fails_the_scenario(self, out_dir):
        spec = dirichlet_scenario(function={'kind': 'szego', 'pole': [2, 0]})
        scenario = ScenarioRunner.from_document({'scenarios': [spec]}, out_dir=out_dir).run()['scenarios'][0]
        assert scenario['status'] == 'failed'
        assert 'scenarios[0].function.pole' in scenario['error']
        assert scenario['artifacts'] == []
        assert ScenarioRun.objects.get().status == 'failed'

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError) as excinfo:
            ScenarioRunner.from_file(str(tmp_path / 'missing.json'))
        assert excinfo.value.field == 'config'

    def test_invalid_json(self, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"scenarios": [', encoding='utf-8')
        with pytest.raises(ConfigError) as excinfo:
            ScenarioRunner.from_file(str(path))
        assert excinfo.value.field == 'config'

    def test_unknown_format(self, out_dir):
        with pytest.raises(ConfigError) as excinfo:
            ScenarioRunner.from_document({'scenarios': [dirichlet_scenario()]}, out_dir=out_dir, fmt='xlsx')
        assert excinfo.value.field == 'format'


def test_single_scenario_document(tmp_path, out_dir):
    path = write_config(tmp_path, {'seed': 2, **dirichlet_scenario()})
    report = run_scenario(path, out_dir=str(out_dir))
    assert report['seed'] == 2
    assert len(report['scenarios']) == 1
    assert report['passed']


def test_no_persist_leaves_database_alone(out_dir):
    ScenarioRunner.from_document({'scenarios': [dirichlet_scenario()]}, out_dir=out_dir, persist=False).run()
    assert ScenarioRun.objects.count() == 0
    assert (out_dir / 'z-squared.csv').exists()


class TestOtherKinds:
    def test_carleson_named_measure(self, out_dir):
        spec = {
            'id': 'ray',
            'kind': 'carleson',
            'disk_measure': {'kind': 'named', 'name': 'example4-nu'},
            'reweight': True,
            'zeta': 0.0,
            'expect': {'carleson': True},
        }
        report = ScenarioRunner.from_document({'scenarios': [spec]}, out_dir=out_dir).run()
        assert report['passed']
        lines = (out_dir / 'ray.csv').read_text(encoding='utf-8').splitlines()
        assert len(lines) == 2 + 21

    def test_plain_ray_measure_is_unbounded(self, out_dir):
        spec = {'id': 'ray', 'kind': 'carleson', 'disk_measure': {'kind': 'ray'},
                'expect': {'carleson': 'unbounded'}}
        assert ScenarioRunner.from_document({'scenarios': [spec]}, out_dir=out_dir).run()['passed']

    def test_spectrum(self, out_dir):
        spec = {
            'id': 'atom',
            'kind': 'spectrum',
            'schur': {'singular': {'atoms': [{'angle': 0.0, 'mass': 1.0}]}},
            'points': [0.0, math.pi],
            'expect': {'consistent': True, 'empty': False},
        }
        report = ScenarioRunner.from_document({'scenarios': [spec]}, out_dir=out_dir).run()
        assert report['passed']
        verdicts = report['scenarios'][0]['results']['verdicts']
        assert sorted(verdicts.values()) == ['In', 'Out']

    def test_embedding_of_blaschke(self, out_dir):
        spec = {'id': 'embeds', 'kind': 'embedding', 'schur': {'blaschke': [0.5, [0, 0.3]]},
                'zeta': 1.0, 'expect': {'verdict': 'Embeds'}}
        assert ScenarioRunner.from_document({'scenarios': [spec]}, out_dir=out_dir).run()['passed']

    def test_weighted_atoms(self, out_dir):
        spec = {'id': 'atoms', 'kind': 'weighted', 'function': MONOMIAL,
                'measure': {'atoms': [{'angle': 0.0, 'mass': 2.0}]}, 'expect': {'value': 4.0}}
        assert ScenarioRunner.from_document({'scenarios': [spec]}, out_dir=out_dir).run()['passed']

    def test_multiplier(self, out_dir):
        spec = {'id': 'identity', 'kind': 'multiplier', 'phi': {'kind': 'polynomial', 'coefficients': [0, 1]},
                'zeta': 0.0, 'expect': {'multiplier': True}}
        assert ScenarioRunner.from_document({'scenarios': [spec]}, out_dir=out_dir).run()['passed']

    def test_verify_smoke(self, out_dir):
        spec = {'id': 'smoke', 'kind': 'verify', 'suite': 'smoke'}
        report = ScenarioRunner.from_document({'scenarios': [spec]}, out_dir=out_dir).run()
        assert report['passed']
        assert (out_dir / 'smoke.csv').read_text(encoding='utf-8').startswith('# dbr_lab verify schema v1')

    def test_verify_unknown_suite(self, out_dir):
        spec = {'id': 'nothing', 'kind': 'verify', 'suite': 'nothing'}
        report = ScenarioRunner.from_document({'scenarios': [spec]}, out_dir=out_dir).run()
        assert not report['success']
        assert report['scenarios'][0]['error_type'] == 'ConfigError'

    @pytest.mark.slow
    def test_sweep_toward_singular_atom(self, out_dir):
        spec = {'id': 'sweep', 'kind': 'sweep', 'schur': {'named': 'singular-at-1'}, 'zeta': 0.0,
                'expect': {'max_ratio_above': 1e3, 'lower_bound_holds': True}}
        report = ScenarioRunner.from_document({'scenarios': [spec]}, out_dir=out_dir).run()
        assert report['passed']
        assert len((out_dir / 'sweep.csv').read_text(encoding='utf-8').splitlines()) == 2 + 20


def test_jsonable():
    data = jsonable({'a': math.inf, 'b': math.nan, 'c': np.float64(1.5), 'd': (1j, np.bool_(True)), 1: np.int64(3)})
    assert data == {'a': 'inf', 'b': None, 'c': 1.5, 'd': [[0.0, 1.0], True], '1': 3}

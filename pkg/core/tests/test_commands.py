import json
from io import StringIO

import pandas as pd
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from core.models import ScenarioRun
from core.tests.factories import ScenarioRunFactory

pytestmark = pytest.mark.django_db


def write_config(tmp_path, scenarios):
    path = tmp_path / 'scenarios.json'
    path.write_text(json.dumps({'seed': 1, 'scenarios': scenarios}), encoding='utf-8')
    return str(path)


def monomial_scenario(expected):
    return {
        'id': 'z-squared',
        'kind': 'dirichlet',
        'function': {'kind': 'polynomial', 'coefficients': [0, 0, 1]},
        'methods': ['douglas'],
        'expect': {'value': expected},
    }


class TestRunScenario:
    def test_success(self, tmp_path, out_dir):
        out = StringIO()
        config = write_config(tmp_path, [monomial_scenario(2.0)])
        call_command('run_scenario', '--config', config, '--out', str(out_dir), stdout=out)
        assert '✓ z-squared (dirichlet)' in out.getvalue()
        assert 'All 1 scenarios passed (seed 1)' in out.getvalue()
        assert (out_dir / 'z-squared.csv').exists()
        assert ScenarioRun.objects.filter(scenario_id='z-squared', passed=True).exists()

    def test_failed_assertion_raises(self, tmp_path, out_dir):
        out = StringIO()
        config = write_config(tmp_path, [monomial_scenario(5.0)])
        with pytest.raises(CommandError, match='z-squared'):
            call_command('run_scenario', '--config', config, '--out', str(out_dir), stdout=out)
        assert 'assertions failed' in out.getvalue()

    def test_invalid_config(self, tmp_path, out_dir):
        config = write_config(tmp_path, [{'id': 'a', 'kind': 'fourier'}])
        with pytest.raises(CommandError, match=r'scenarios\[0\]\.kind'):
            call_command('run_scenario', '--config', config, '--out', str(out_dir), stdout=StringIO())

    def test_json_without_persisting(self, tmp_path, out_dir):
        config = write_config(tmp_path, [monomial_scenario(2.0)])
        call_command('run_scenario', '--config', config, '--out', str(out_dir), '--format', 'json',
                     '--no-persist', stdout=StringIO())
        assert (out_dir / 'z-squared.json').exists()
        assert not ScenarioRun.objects.exists()


class TestVerifySuite:
    def test_smoke(self, tmp_path):
        out = StringIO()
        table = tmp_path / 'checks.csv'
        call_command('verify_suite', '--suite', 'smoke', '--output', str(table), stdout=out)
        assert 'All' in out.getvalue()
        frame = pd.read_csv(table)
        assert list(frame.columns) == ['check', 'passed', 'detail']
        assert frame['passed'].all()

    def test_unknown_suite(self):
        with pytest.raises(CommandError, match='unknown suite'):
            call_command('verify_suite', '--suite', 'everything', stdout=StringIO())


def test_list_named():
    out = StringIO()
    call_command('list_named', '--kind', 'schur', stdout=out)
    text = out.getvalue()
    assert 'example1-b' in text
    assert 'example4-nu' not in text
    assert text.strip().endswith('3 named objects')


def test_export_runs(tmp_path):
    ScenarioRunFactory.create_batch(2)
    ScenarioRunFactory(failed=True, kind='sweep')
    target = tmp_path / 'runs.csv'
    out = StringIO()
    call_command('export_runs', '--output', str(target), '--status', 'completed', stdout=out)
    assert 'Successfully exported 2 records' in out.getvalue()
    frame = pd.read_csv(target)
    assert set(frame['status']) == {'completed'}
    assert 'error_message' in frame.columns


def test_export_runs_fails_loudly_on_unwritable_target(tmp_path):
    ScenarioRunFactory()
    target = tmp_path / 'missing' / 'runs.csv'
    with pytest.raises(CommandError, match='Export failed'):
        call_command('export_runs', '--output', str(target), stdout=StringIO())
    assert not target.exists()

import pytest
from django.apps import apps

from core.models import ScenarioRun
from core.tests.factories import ScenarioRunFactory

pytestmark = pytest.mark.django_db


def test_str():
    run = ScenarioRunFactory(scenario_id='z2', kind='dirichlet', status='completed')
    assert str(run) == 'Scenario z2 (dirichlet) - completed'


def test_newest_first():
    older = ScenarioRunFactory()
    newer = ScenarioRunFactory()
    assert list(ScenarioRun.objects.all()) == [newer, older]


def test_defaults():
    run = ScenarioRun.objects.create(scenario_id='bare', kind='verify')
    assert run.status == 'pending'
    assert run.passed is None
    assert run.artifacts == []
    assert run.config == {}


def test_failed_trait():
    run = ScenarioRunFactory(failed=True)
    assert run.status == 'failed'
    assert run.passed is False
    assert run.error_message


def test_app_labels():
    assert apps.get_app_config('core').verbose_name == 'Scenario runs'
    assert apps.get_app_config('api').verbose_name == 'Scenario and catalog API'

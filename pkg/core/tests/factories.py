import factory
from django.utils import timezone

from core.models import ScenarioRun


class ScenarioRunFactory(factory.django.DjangoModelFactory):
    class Meta:
        model = ScenarioRun

    scenario_id = factory.Sequence(lambda n: f'scenario-{n}')
    kind = 'dirichlet'
    status = 'completed'
    passed = True
    seed = 0
    wall_time = 0.25
    config = factory.LazyAttribute(lambda o: {'id': o.scenario_id, 'kind': o.kind})
    results = factory.LazyFunction(lambda: {'value': 2.0})
    artifacts = factory.LazyAttribute(lambda o: [f'reports/{o.scenario_id}.csv'])
    processing_log = factory.LazyFunction(lambda: {'logs': [{'timestamp': '2025-01-01T00:00:00', 'message': 'ok'}]})
    completed_at = factory.LazyFunction(timezone.now)

    class Params:
        failed = factory.Trait(
            status='failed',
            passed=False,
            results=factory.LazyFunction(dict),
            artifacts=factory.LazyFunction(list),
            error_message='scenario failed',
        )

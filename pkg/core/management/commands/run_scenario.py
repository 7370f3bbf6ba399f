from django.core.management.base import BaseCommand, CommandError

from services.exceptions import DbrLabError
from services.scenarios import ScenarioRunner


class Command(BaseCommand):
    help = 'Run the scenarios of a JSON config and write one CSV or JSON artifact per scenario'

    def add_arguments(self, parser):
        parser.add_argument(
            '--config',
            type=str,
            required=True,
            help='Path to the scenario config (JSON)'
        )
        parser.add_argument(
            '--out',
            type=str,
            default=None,
            help='Output directory (defaults to SCENARIO_OUTPUT_DIR)'
        )
        parser.add_argument(
            '--format',
            type=str,
            choices=['csv', 'json'],
            default='csv',
            help='Artifact format'
        )
        parser.add_argument(
            '--no-persist',
            action='store_true',
            help='Do not record the runs in the database'
        )

    def handle(self, *args, **options):
        config_path = options['config']
        self.stdout.write(f'Running scenarios from: {config_path}')

        try:
            runner = ScenarioRunner.from_file(
                config_path,
                out_dir=options['out'],
                fmt=options['format'],
                persist=not options['no_persist'],
            )
            result = runner.run()
        except DbrLabError as e:
            raise CommandError(str(e))

        for report in result['scenarios']:
            label = f"{report['scenario_id']} ({report['kind']})"
            if report['status'] == 'failed':
                self.stdout.write(self.style.ERROR(f'✗ {label} failed: {report["error"]}'))
            elif report['passed'] is False:
                self.stdout.write(self.style.ERROR(f'✗ {label}: assertions failed'))
                for failure in report['failures']:
                    self.stdout.write(f'  {failure}')
            else:
                self.stdout.write(self.style.SUCCESS(f'✓ {label} in {report["wall_time"]:.2f} s'))
            for artifact in report['artifacts']:
                self.stdout.write(f'  wrote {artifact}')

        total = len(result['scenarios'])
        failed = [r['scenario_id'] for r in result['scenarios'] if r['status'] == 'failed' or r['passed'] is False]
        if failed:
            self.stdout.write(self.style.WARNING(f'⚠ {len(failed)} of {total} scenarios did not pass'))
            raise CommandError(f'Scenario run failed: {", ".join(failed)}')

        self.stdout.write(self.style.SUCCESS(f'✓ All {total} scenarios passed (seed {result["seed"]})'))

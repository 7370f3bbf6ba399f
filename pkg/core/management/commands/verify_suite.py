from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from services.exceptions import DbrLabError
from services.quadrature import QuadratureConfig
from services.suites import ALIASES, SUITES, run_suite


class Command(BaseCommand):
    help = 'Run a named verification suite and report pass/fail per check'

    def add_arguments(self, parser):
        parser.add_argument(
            '--suite',
            type=str,
            default='identities',
            help=f'Suite name: one of {", ".join(sorted(SUITES) + sorted(ALIASES))}'
        )
        parser.add_argument(
            '--seed',
            type=int,
            default=None,
            help='Random seed (defaults to SCENARIO_DEFAULT_SEED)'
        )
        parser.add_argument(
            '--output',
            type=str,
            default=None,
            help='Optional CSV file for the check table'
        )

    def handle(self, *args, **options):
        seed = options['seed'] if options['seed'] is not None else settings.SCENARIO_DEFAULT_SEED

        try:
            result = run_suite(options['suite'], QuadratureConfig.from_settings(), seed)
        except DbrLabError as e:
            raise CommandError(str(e))

        self.stdout.write(f'Suite {result.suite} (seed {seed})')
        for item in result.checks:
            if item.passed:
                self.stdout.write(self.style.SUCCESS(f'✓ {item.name} ({item.elapsed:.2f} s)'))
            else:
                self.stdout.write(self.style.ERROR(f'✗ {item.name}: {item.detail}'))

        if options['output']:
            result.to_frame().to_csv(options['output'], index=False, lineterminator='\n')
            self.stdout.write(f'Check table written to {options["output"]}')

        if not result.passed:
            raise CommandError(f'{len(result.failed)} of {len(result.checks)} checks failed')
        self.stdout.write(self.style.SUCCESS(f'✓ All {len(result.checks)} checks passed'))

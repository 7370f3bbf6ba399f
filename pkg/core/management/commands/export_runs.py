import os

import pandas as pd
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from core.models import ScenarioRun


class Command(BaseCommand):
    help = 'Export the scenario run history to CSV'

    def add_arguments(self, parser):
        parser.add_argument(
            '--output',
            type=str,
            default='scenario_runs_export.csv',
            help='Output filename'
        )
        parser.add_argument(
            '--kind',
            type=str,
            choices=[k for k, _ in ScenarioRun.KIND_CHOICES],
            default=None,
            help='Only export runs of this kind'
        )
        parser.add_argument(
            '--status',
            type=str,
            choices=[s for s, _ in ScenarioRun.STATUS_CHOICES],
            default=None,
            help='Only export runs with this status'
        )

    @staticmethod
    def runs_frame(queryset) -> pd.DataFrame:
        rows = []
        for run in queryset:
            rows.append({
                'id': str(run.id),
                'scenario_id': run.scenario_id,
                'kind': run.kind,
                'status': run.status,
                'passed': run.passed,
                'seed': run.seed,
                'wall_time': run.wall_time,
                'artifacts': ';'.join(run.artifacts or []),
                'error_message': run.error_message or '',
                'created_at': run.created_at.isoformat(),
                'completed_at': run.completed_at.isoformat() if run.completed_at else '',
            })
        return pd.DataFrame(rows, columns=[
            'id', 'scenario_id', 'kind', 'status', 'passed', 'seed', 'wall_time',
            'artifacts', 'error_message', 'created_at', 'completed_at',
        ])

    def handle(self, *args, **options):
        queryset = ScenarioRun.objects.all().order_by('created_at')
        if options['kind']:
            queryset = queryset.filter(kind=options['kind'])
        if options['status']:
            queryset = queryset.filter(status=options['status'])

        try:
            self.stdout.write('Exporting scenario runs...')
            df = self.runs_frame(queryset)

            # Save to file
            output_path = os.path.join(settings.BASE_DIR, options['output'])
            df.to_csv(output_path, index=False)

            self.stdout.write(
                self.style.SUCCESS(
                    f'Successfully exported {len(df)} records to {output_path}'
                )
            )

        except (OSError, ValueError) as e:
            raise CommandError(f'Export failed: {e}')

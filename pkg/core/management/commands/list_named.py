from django.core.management.base import BaseCommand

from services.catalog import list_named


class Command(BaseCommand):
    help = 'List the named built-in functions and measures'

    def add_arguments(self, parser):
        parser.add_argument(
            '--kind',
            type=str,
            choices=['outer', 'schur', 'function', 'measure', 'disk-measure'],
            default=None,
            help='Only list entries of this kind'
        )

    def handle(self, *args, **options):
        entries = [e for e in list_named() if options['kind'] in (None, e['kind'])]
        for entry in entries:
            self.stdout.write(self.style.SUCCESS(f'{entry["name"]}') + f' [{entry["kind"]}] {entry["description"]}')
            if entry['params']:
                params = ', '.join(f'{k}={v}' for k, v in entry['params'].items())
                self.stdout.write(f'  params: {params}')
            for key, value in entry['facts'].items():
                self.stdout.write(f'  {key}: {value}')
        self.stdout.write(f'{len(entries)} named objects')

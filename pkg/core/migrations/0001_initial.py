import uuid

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='ScenarioRun',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('scenario_id', models.CharField(db_index=True, max_length=100)),
                ('kind', models.CharField(choices=[
                    ('dirichlet', 'Local Dirichlet integral'),
                    ('weighted', 'Weighted Dirichlet integral'),
                    ('sweep', 'Kernel ratio sweep'),
                    ('embedding', 'Embedding report'),
                    ('spectrum', 'Boundary spectrum'),
                    ('carleson', 'Carleson constant'),
                    ('multiplier', 'Multiplier test'),
                    ('verify', 'Verification suite'),
                ], max_length=20)),
                ('status', models.CharField(choices=[
                    ('pending', 'Pending'),
                    ('running', 'Running'),
                    ('completed', 'Completed'),
                    ('failed', 'Failed'),
                ], default='pending', max_length=20)),
                ('config', models.JSONField(blank=True, default=dict)),
                ('results', models.JSONField(blank=True, default=dict)),
                ('artifacts', models.JSONField(blank=True, default=list)),
                ('passed', models.BooleanField(blank=True, null=True)),
                ('seed', models.IntegerField(default=0)),
                ('wall_time', models.FloatField(blank=True, null=True)),
                ('error_message', models.TextField(blank=True, null=True)),
                ('processing_log', models.JSONField(blank=True, default=dict)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('completed_at', models.DateTimeField(blank=True, null=True)),
            ],
            options={
                'db_table': 'scenario_runs',
                'ordering': ['-created_at'],
                'indexes': [
                    models.Index(fields=['scenario_id'], name='scenario_ru_scenari_6f1c2a_idx'),
                    models.Index(fields=['kind'], name='scenario_ru_kind_3b8e1d_idx'),
                    models.Index(fields=['status'], name='scenario_ru_status_9a4c7e_idx'),
                    models.Index(fields=['created_at'], name='scenario_ru_created_d2f5b0_idx'),
                ],
            },
        ),
    ]

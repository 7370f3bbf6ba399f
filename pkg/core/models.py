from django.db import models
import uuid


class ScenarioRun(models.Model):
    """One executed scenario with its config echo, results and processing log"""
    KIND_CHOICES = [
        ('dirichlet', 'Local Dirichlet integral'),
        ('weighted', 'Weighted Dirichlet integral'),
        ('sweep', 'Kernel ratio sweep'),
        ('embedding', 'Embedding report'),
        ('spectrum', 'Boundary spectrum'),
        ('carleson', 'Carleson constant'),
        ('multiplier', 'Multiplier test'),
        ('verify', 'Verification suite'),
    ]

    STATUS_CHOICES = [
        ('pending', 'Pending'),
        ('running', 'Running'),
        ('completed', 'Completed'),
        ('failed', 'Failed'),
    ]

    id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)
    scenario_id = models.CharField(max_length=100, db_index=True)
    kind = models.CharField(max_length=20, choices=KIND_CHOICES)
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default='pending')

    # Inputs and outputs
    config = models.JSONField(default=dict, blank=True)
    results = models.JSONField(default=dict, blank=True)
    artifacts = models.JSONField(default=list, blank=True)
    passed = models.BooleanField(blank=True, null=True)
    seed = models.IntegerField(default=0)
    wall_time = models.FloatField(blank=True, null=True)

    error_message = models.TextField(blank=True, null=True)
    processing_log = models.JSONField(default=dict, blank=True)

    created_at = models.DateTimeField(auto_now_add=True)
    completed_at = models.DateTimeField(blank=True, null=True)

    class Meta:
        db_table = 'scenario_runs'
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['scenario_id'], name='scenario_ru_scenari_6f1c2a_idx'),
            models.Index(fields=['kind'], name='scenario_ru_kind_3b8e1d_idx'),
            models.Index(fields=['status'], name='scenario_ru_status_9a4c7e_idx'),
            models.Index(fields=['created_at'], name='scenario_ru_created_d2f5b0_idx'),
        ]

    def __str__(self):
        return f"Scenario {self.scenario_id} ({self.kind}) - {self.status}"

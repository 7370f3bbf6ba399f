from django.contrib import admin
from django.utils.html import format_html
from core.models import ScenarioRun


@admin.register(ScenarioRun)
class ScenarioRunAdmin(admin.ModelAdmin):
    """Admin interface for ScenarioRun model"""
    list_display = ['scenario_id', 'kind', 'status', 'passed_display', 'wall_time_display', 'created_at']
    list_filter = ['kind', 'status', 'passed', 'created_at']
    search_fields = ['scenario_id', 'error_message']
    ordering = ['-created_at']
    readonly_fields = ['created_at', 'completed_at', 'processing_log', 'results', 'artifacts']

    fieldsets = [
        ('Scenario', {
            'fields': ['scenario_id', 'kind', 'seed', 'config']
        }),
        ('Outcome', {
            'fields': ['status', 'passed', 'wall_time', 'results', 'artifacts']
        }),
        ('Error Information', {
            'fields': ['error_message'],
            'classes': ['collapse']
        }),
        ('Processing Log', {
            'fields': ['processing_log'],
            'classes': ['collapse']
        }),
        ('Timestamps', {
            'fields': ['created_at', 'completed_at'],
            'classes': ['collapse']
        })
    ]

    def passed_display(self, obj):
        """Show assertion outcome with color coding"""
        if obj.passed is None:
            return "N/A"
        color = 'green' if obj.passed else 'red'
        return format_html('<span style="color: {}; font-weight: bold;">{}</span>',
                           color, 'pass' if obj.passed else 'FAIL')
    passed_display.short_description = 'Assertions'

    def wall_time_display(self, obj):
        if obj.wall_time is None:
            return "-"
        return f"{obj.wall_time:.2f} s"
    wall_time_display.short_description = 'Wall Time'


# Customize admin site
admin.site.site_header = "DBR Lab Admin"
admin.site.site_title = "DBR Lab Admin"
admin.site.index_title = "Scenario Runs"

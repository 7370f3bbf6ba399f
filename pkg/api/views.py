import logging

from django.db.models import Avg, Count, Q
from django_filters.rest_framework import DjangoFilterBackend
from rest_framework import permissions, status, viewsets
from rest_framework.decorators import action, api_view, permission_classes
from rest_framework.filters import OrderingFilter, SearchFilter
from rest_framework.pagination import PageNumberPagination
from rest_framework.response import Response
from rest_framework.reverse import reverse

from api.serializers import NamedEntrySerializer, ScenarioRunSerializer, ScenarioRunSummarySerializer
from core.models import ScenarioRun
from services.catalog import CATALOG, list_named
from services.suites import ALIASES, SUITES

logger = logging.getLogger(__name__)


class StandardResultsSetPagination(PageNumberPagination):
    page_size = 20
    page_size_query_param = 'page_size'
    max_page_size = 100


# API Root View
@api_view(['GET'])
@permission_classes([permissions.AllowAny])
def api_root(request, format=None):
    """
    API Root - Shows all available endpoints
    """
    return Response({
        'message': 'DBR Lab API',
        'version': '1.0',
        'endpoints': {
            'catalog': {
                'named': reverse('named-catalog', request=request, format=format),
                'suites': reverse('suite-list', request=request, format=format),
            },
            'resources': {
                'runs': reverse('run-list', request=request, format=format),
                'run_stats': reverse('run-stats', request=request, format=format),
            },
        },
        'documentation': {
            'description': 'Read-only access to the built-in function catalog and to stored scenario runs. '
                           'Scenarios are executed with the run_scenario management command.',
            'pagination': 'List endpoints support pagination with page_size parameter (default: 20, max: 100)',
        }
    })


@api_view(['GET'])
@permission_classes([permissions.AllowAny])
def named_catalog(request):
    """Named built-in functions and measures usable from scenario configs"""
    entries = list_named()
    kind = request.query_params.get('kind')
    if kind:
        entries = [e for e in entries if e['kind'] == kind]
    return Response(NamedEntrySerializer(entries, many=True).data)


@api_view(['GET'])
@permission_classes([permissions.AllowAny])
def named_entry(request, name):
    entry = CATALOG.get(name)
    if entry is None:
        return Response({'error': f"unknown named object {name!r}"}, status=status.HTTP_404_NOT_FOUND)
    return Response(NamedEntrySerializer(entry.to_dict()).data)


@api_view(['GET'])
@permission_classes([permissions.AllowAny])
def suite_list(request):
    return Response({
        'suites': {name: [func.__name__ for func in checks] for name, checks in SUITES.items()},
        'aliases': ALIASES,
    })


class ScenarioRunViewSet(viewsets.ReadOnlyModelViewSet):
    """ViewSet for stored scenario runs"""
    queryset = ScenarioRun.objects.all()
    serializer_class = ScenarioRunSerializer
    pagination_class = StandardResultsSetPagination
    filter_backends = [DjangoFilterBackend, SearchFilter, OrderingFilter]
    filterset_fields = ['kind', 'status', 'passed', 'scenario_id']
    search_fields = ['scenario_id', 'error_message']
    ordering_fields = ['created_at', 'wall_time', 'scenario_id']
    ordering = ['-created_at']
    permission_classes = [permissions.AllowAny]

    def get_serializer_class(self):
        if self.action == 'list':
            return ScenarioRunSummarySerializer
        return ScenarioRunSerializer

    @action(detail=False, methods=['get'])
    def stats(self, request):
        """Run counts per kind with pass rates"""
        queryset = self.filter_queryset(self.get_queryset())
        per_kind = queryset.values('kind').annotate(
            total=Count('id'),
            passed=Count('id', filter=Q(passed=True)),
            failed=Count('id', filter=Q(status='failed') | Q(passed=False)),
            avg_wall_time=Avg('wall_time'),
        ).order_by('kind')
        return Response({
            'total_runs': queryset.count(),
            'by_kind': list(per_kind),
        })

    @action(detail=True, methods=['get'])
    def log(self, request, pk=None):
        run = self.get_object()
        return Response({'id': str(run.id), 'status': run.status, 'processing_log': run.processing_log})

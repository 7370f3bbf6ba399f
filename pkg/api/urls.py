# api/urls.py (API URLs)
from django.urls import path, include
from rest_framework.routers import DefaultRouter
from api import views

# Create router and register viewsets
router = DefaultRouter()
router.register(r'runs', views.ScenarioRunViewSet, basename='run')

urlpatterns = [
    # API Root - must be first
    path('', views.api_root, name='api-root'),

    path('named/', views.named_catalog, name='named-catalog'),
    path('named/<str:name>/', views.named_entry, name='named-entry'),
    path('suites/', views.suite_list, name='suite-list'),

    # Include router URLs - this should be last
    path('', include(router.urls)),
]

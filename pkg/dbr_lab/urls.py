"""
URL configuration for dbr_lab project.

The admin lists stored scenario runs; everything else is under api/.
"""
from django.contrib import admin
from django.urls import path, include

urlpatterns = [
    path('admin/', admin.site.urls),
    path('api/', include('api.urls')),
]

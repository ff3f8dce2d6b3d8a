"""
Configuración de la aplicación Punto de silla
"""
from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class SaddleConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.saddle'
    verbose_name = _('Punto de silla')

"""
Configuración de la aplicación Asintótica de colas
"""
from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class TailcalcConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.tailcalc'
    verbose_name = _('Asintótica de colas')

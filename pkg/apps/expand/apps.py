"""
Configuración de la aplicación Expansiones asintóticas
"""
from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class ExpandConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.expand'
    verbose_name = _('Expansiones asintóticas')

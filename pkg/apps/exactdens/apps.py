"""
Configuración de la aplicación Densidad exacta
"""
from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class ExactdensConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.exactdens'
    verbose_name = _('Densidad exacta')

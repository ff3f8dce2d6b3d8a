"""
Configuración de la aplicación Simulación Monte Carlo
"""
from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class MontecarloConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.montecarlo'
    verbose_name = _('Simulación Monte Carlo')

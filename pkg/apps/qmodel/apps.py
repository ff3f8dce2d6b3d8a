"""
Configuración de la aplicación Ley de Q
"""
from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class QmodelConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.qmodel'
    verbose_name = _('Ley de Q')

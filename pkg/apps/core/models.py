"""
Modelos base del sistema PERPETUA
"""
import uuid

from django.db import models
from django.utils.translation import gettext_lazy as _


class BaseModel(models.Model):
    """
    Modelo base abstracto con campos comunes para todos los modelos
    """
    id = models.UUIDField(
        primary_key=True,
        default=uuid.uuid4,
        editable=False,
        verbose_name=_('ID')
    )
    created_at = models.DateTimeField(
        auto_now_add=True,
        verbose_name=_('Fecha de creación')
    )
    updated_at = models.DateTimeField(
        auto_now=True,
        verbose_name=_('Fecha de actualización')
    )

    class Meta:
        abstract = True
        ordering = ['-created_at']


class RunManifest(BaseModel):
    """
    Registro de una ejecución de subcomando con los archivos que produjo
    """
    subcommand = models.CharField(
        max_length=20,
        verbose_name=_('Subcomando')
    )
    parameters = models.JSONField(
        default=dict,
        verbose_name=_('Parámetros')
    )
    artifact_version = models.CharField(
        max_length=20,
        verbose_name=_('Versión del artefacto')
    )
    seed = models.BigIntegerField(
        null=True,
        blank=True,
        verbose_name=_('Semilla')
    )
    duration_seconds = models.FloatField(
        default=0.0,
        verbose_name=_('Duración (s)')
    )
    output_digests = models.JSONField(
        default=dict,
        verbose_name=_('Digestos SHA-256 de salida')
    )
    exit_code = models.PositiveSmallIntegerField(
        default=0,
        verbose_name=_('Código de salida')
    )

    class Meta:
        verbose_name = _('Manifiesto de ejecución')
        verbose_name_plural = _('Manifiestos de ejecución')
        db_table = 'core_run_manifest'
        ordering = ['-created_at']

    def __str__(self):
        return f"{self.subcommand} ({self.created_at:%Y-%m-%d %H:%M:%S})" if self.created_at else self.subcommand

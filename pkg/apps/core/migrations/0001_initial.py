# Generated by Django 5.2.3 on 2026-10-19 10:12

import uuid
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='RunManifest',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False, verbose_name='ID')),
                ('created_at', models.DateTimeField(auto_now_add=True, verbose_name='Fecha de creación')),
                ('updated_at', models.DateTimeField(auto_now=True, verbose_name='Fecha de actualización')),
                ('subcommand', models.CharField(max_length=20, verbose_name='Subcomando')),
                ('parameters', models.JSONField(default=dict, verbose_name='Parámetros')),
                ('artifact_version', models.CharField(max_length=20, verbose_name='Versión del artefacto')),
                ('seed', models.BigIntegerField(blank=True, null=True, verbose_name='Semilla')),
                ('duration_seconds', models.FloatField(default=0.0, verbose_name='Duración (s)')),
                ('output_digests', models.JSONField(default=dict, verbose_name='Digestos SHA-256 de salida')),
                ('exit_code', models.PositiveSmallIntegerField(default=0, verbose_name='Código de salida')),
            ],
            options={
                'verbose_name': 'Manifiesto de ejecución',
                'verbose_name_plural': 'Manifiestos de ejecución',
                'db_table': 'core_run_manifest',
                'ordering': ['-created_at'],
            },
        ),
    ]

"""
Tests para el modelo de manifiestos y ManifestService.
"""
import json
import tempfile
from pathlib import Path
from unittest import mock

from django.db import DatabaseError
from django.test import TestCase

from apps.core.models import RunManifest
from apps.core.services import ManifestService
from apps.core.utils import sha256_file
from apps.qmodel.laws import PointMass


class ManifestServiceTest(TestCase):
    """Tests para ManifestService."""

    def setUp(self):
        """Configurar directorio temporal."""
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.output = Path(self.tmp.name) / 'saddle.csv'

    def record(self, **overrides):
        kwargs = {
            'subcommand': 'saddle',
            'parameters': {'alpha': 1.0, 'law': PointMass(b=1.0), 'output': self.output},
            'seed': None,
            'duration': 0.25,
            'output_path': self.output,
            'text': 't,s\n1,2\n',
            'extra_files': {},
            'exit_code': 0,
            'version': '1.0.0',
        }
        kwargs.update(overrides)
        return ManifestService.record(**kwargs)

    def test_writes_output_and_manifest(self):
        """Test salida, manifiesto en disco y digesto."""
        manifest = self.record()
        self.assertEqual(self.output.read_text(), 't,s\n1,2\n')
        on_disk = json.loads(Path(f'{self.output}.manifest.json').read_text())
        self.assertEqual(on_disk, manifest)
        self.assertEqual(manifest['output_digests'], {str(self.output): sha256_file(self.output)})
        self.assertEqual(manifest['parameters']['law'], 'pointmass:b=1')
        self.assertEqual(manifest['parameters']['output'], str(self.output))

    def test_persists_run(self):
        """Test registro en base de datos."""
        self.record(seed=123, exit_code=2)
        run = RunManifest.objects.get()
        self.assertEqual(run.subcommand, 'saddle')
        self.assertEqual(run.seed, 123)
        self.assertEqual(run.exit_code, 2)
        self.assertEqual(run.parameters['alpha'], 1.0)
        self.assertIn('saddle', str(run))

    def test_large_seed_not_stored(self):
        """Test semillas de 64 bits fuera del rango de BigIntegerField."""
        manifest = self.record(seed=2 ** 64 - 1)
        self.assertEqual(manifest['seed'], 2 ** 64 - 1)
        self.assertIsNone(RunManifest.objects.get().seed)

    def test_stdout_only(self):
        """Test sin archivo de salida no hay manifiesto en disco."""
        manifest = self.record(output_path=None)
        self.assertEqual(manifest['output_digests'], {})
        self.assertFalse(Path(f'{self.output}.manifest.json').exists())
        self.assertEqual(RunManifest.objects.count(), 1)

    def test_extra_files(self):
        """Test manifiesto junto a cada archivo adicional."""
        extra = Path(self.tmp.name) / 'grid.csv'
        extra.write_text('t\n1\n')
        manifest = self.record(extra_files={str(extra): sha256_file(extra)})
        self.assertEqual(len(manifest['output_digests']), 2)
        self.assertTrue(Path(f'{extra}.manifest.json').exists())

    def test_database_failure_only_warns(self):
        """Test fallo de base de datos sin interrumpir el comando."""
        with mock.patch.object(RunManifest.objects, 'create', side_effect=DatabaseError('sin tabla')):
            with self.assertLogs('apps.core.services', level='WARNING'):
                manifest = self.record()
        self.assertEqual(manifest['subcommand'], 'saddle')
        self.assertEqual(RunManifest.objects.count(), 0)

"""
Tests de integración para la suite de aceptación.
"""
import json
import tempfile
from pathlib import Path

from django.conf import settings
from django.test import TestCase, tag

from apps.core.exceptions import InvalidParameterException
from apps.core.services import AcceptanceService


class AcceptanceServiceTest(TestCase):
    """Tests para AcceptanceService."""

    def test_expectations_file(self):
        """Test ids únicos y criterios conocidos."""
        entries = AcceptanceService().load_expectations()
        ids = [entry['id'] for entry in entries]
        self.assertEqual(ids, list(range(1, 12)))
        self.assertEqual({entry['check'] for entry in entries}, set(AcceptanceService.CHECKS))

    def test_quick_overrides(self):
        """Test parámetros y tolerancias del modo rápido."""
        entry = {
            'parameters': {'t_max': 205.0, 'steps_per_unit': 2048},
            'tolerances': {'kappa': 1e-6, 'mass': 1e-6},
            'quick': {'parameters': {'t_max': 50.0}, 'tolerances': {'kappa': 1e-5}},
        }
        parameters, tolerances = AcceptanceService(quick=True).resolve(entry)
        self.assertEqual(parameters, {'t_max': 50.0, 'steps_per_unit': 2048})
        self.assertEqual(tolerances, {'kappa': 1e-5, 'mass': 1e-6})
        parameters, _ = AcceptanceService(quick=False).resolve(entry)
        self.assertEqual(parameters['t_max'], 205.0)

    def test_missing_file(self):
        """Test archivo inexistente."""
        with self.assertRaises(InvalidParameterException):
            AcceptanceService('/nonexistent/expectations.json').load_expectations()

    def test_analytic_checks(self):
        """Test criterios sin grilla ni simulación."""
        results = AcceptanceService(quick=True).run(only=[1, 2, 9, 10])
        self.assertEqual([result.id for result in results], [1, 2, 9, 10])
        for result in results:
            self.assertTrue(result.passed, msg=f'{result.check}: {result.detail}')

    def test_error_becomes_failed_check(self):
        """Test excepción de dominio registrada como criterio fallido."""
        expectations = [{
            'id': 1,
            'check': 'legendre_equivalence',
            'parameters': {'alpha': 1.0, 'b': 1.0, 'ts': [1.5]},
            'tolerances': {'final_relative': 0.01},
        }]
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'expectations.json'
            path.write_text(json.dumps(expectations))
            result, = AcceptanceService(path).run()
        self.assertFalse(result.passed)
        self.assertEqual(result.detail['code'], 'subcritical_target')

    def test_determinism_check(self):
        """Test salida de sim idéntica en dos ejecuciones."""
        expectations = [{
            'id': 11,
            'check': 'determinism',
            'parameters': {'alpha': 1.0, 'law': 'pointmass:b=1', 'paths': 500, 'seed': 1, 'mgf_points': [0.5]},
            'tolerances': {},
        }]
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'expectations.json'
            path.write_text(json.dumps(expectations))
            result, = AcceptanceService(path).run()
        self.assertTrue(result.passed)


@tag('slow')
class AcceptanceSuiteTest(TestCase):
    """Tests para la suite completa."""

    def test_quick_suite(self):
        """Test todos los criterios en modo rápido."""
        results = AcceptanceService(settings.ACCEPTANCE_EXPECTATIONS_FILE, quick=True).run()
        self.assertEqual(len(results), 11)
        failed = [f'{result.id}:{result.check} {result.detail}' for result in results if not result.passed]
        self.assertEqual(failed, [])

    def test_full_suite(self):
        """Test todos los criterios con grillas y trayectorias completas."""
        results = AcceptanceService().run()
        failed = [f'{result.id}:{result.check}' for result in results if not result.passed]
        self.assertEqual(failed, [])

"""
Tests para validadores y excepciones del núcleo.
"""
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from apps.core.exceptions import (
    AcceptanceFailureException,
    InvalidParameterException,
    PerpetuaBaseException,
    SaddleRangeException,
    handle_perpetua_exception,
)
from apps.core.validators import (
    FiniteValidator,
    HalfOpenUnitValidator,
    MinimumCountValidator,
    NonPositiveValidator,
    PositiveValidator,
)


class ValidatorsTest(SimpleTestCase):
    """Tests para los validadores numéricos."""

    def assertRejects(self, validator, values):
        for value in values:
            with self.assertRaises(ValidationError, msg=repr(value)):
                validator(value)

    def test_finite(self):
        """Test reales finitos."""
        FiniteValidator()(-3.0)
        self.assertRejects(FiniteValidator(), [float('nan'), float('inf'), 'x', None])

    def test_positive(self):
        """Test reales positivos."""
        PositiveValidator()(1e-300)
        self.assertRejects(PositiveValidator(), [0.0, -1.0])

    def test_non_positive(self):
        """Test átomo q0 <= 0."""
        NonPositiveValidator()(0.0)
        self.assertRejects(NonPositiveValidator(), [0.1])

    def test_half_open_unit(self):
        """Test masas en (0, 1]."""
        HalfOpenUnitValidator()(1.0)
        self.assertRejects(HalfOpenUnitValidator(), [0.0, 1.01])

    def test_minimum_count(self):
        """Test conteos enteros."""
        MinimumCountValidator(0)(0)
        self.assertRejects(MinimumCountValidator(1), [0, 1.5, True])


class ExceptionsTest(SimpleTestCase):
    """Tests para la jerarquía de excepciones."""

    def test_hierarchy_and_codes(self):
        """Test códigos y herencia."""
        error = SaddleRangeException(t=0.5, reason='below')
        self.assertIsInstance(error, PerpetuaBaseException)
        self.assertEqual(error.code, 'target_below_saddle_range')
        self.assertEqual(SaddleRangeException(t=1e300, reason='numeric').code, 'target_out_of_numeric_range')
        self.assertEqual(SaddleRangeException(t=2, reason='subcritical').code, 'subcritical_target')

    def test_details(self):
        """Test detalles del parámetro."""
        error = InvalidParameterException(parameter='alpha', value=-1, rule='Se requiere alpha > 0.')
        self.assertEqual(error.details, {'parameter': 'alpha', 'value': -1})
        self.assertIn('alpha', str(error))

    def test_acceptance_failure_lists_checks(self):
        """Test mensaje con los criterios fallidos."""
        error = AcceptanceFailureException(failed=['3:dickman_ground_truth', '7:mgf_simulation'])
        self.assertIn('3:dickman_ground_truth, 7:mgf_simulation', str(error.message))

    def test_handle(self):
        """Test diccionario de error."""
        info = handle_perpetua_exception(InvalidParameterException(parameter='t', value=0))
        self.assertEqual(info['code'], 'invalid_parameter')
        self.assertEqual(info['details']['parameter'], 't')

"""
Tests para la tabla de números de Stirling de primera especie.
"""
import math

from django.test import SimpleTestCase

from apps.core.exceptions import InvalidParameterException
from apps.expand.stirling import StirlingTable, get_stirling_table, stirling_first_unsigned


class StirlingTest(SimpleTestCase):
    """Tests para stirling_first_unsigned."""

    def test_known_values(self):
        """Test valores conocidos."""
        self.assertEqual(stirling_first_unsigned(0, 0), 1)
        self.assertEqual(stirling_first_unsigned(1, 1), 1)
        self.assertEqual(stirling_first_unsigned(3, 2), 3)
        self.assertEqual(stirling_first_unsigned(4, 2), 11)
        self.assertEqual(stirling_first_unsigned(5, 0), 0)

    def test_recurrence_and_row_sums(self):
        """Test recurrencia y suma de filas igual a n!."""
        for n in range(1, 21):
            for k in range(1, n + 1):
                previous = stirling_first_unsigned(n - 1, k) if k <= n - 1 else 0
                self.assertEqual(
                    stirling_first_unsigned(n, k),
                    (n - 1) * previous + stirling_first_unsigned(n - 1, k - 1)
                )
            self.assertEqual(get_stirling_table().row_sum(n), math.factorial(n))

    def test_largest_entry_is_exact(self):
        """Test c(64, 1) = 63! sin pérdida."""
        self.assertEqual(stirling_first_unsigned(64, 1), math.factorial(63))

    def test_out_of_range(self):
        """Test rechazo fuera de 0 <= k <= n <= 64."""
        for n, k in ((65, 1), (3, 4), (-1, 0), (2, -1)):
            with self.assertRaises(InvalidParameterException):
                stirling_first_unsigned(n, k)

    def test_negative_size(self):
        """Test tamaño de tabla inválido."""
        with self.assertRaises(InvalidParameterException):
            StirlingTable(-1)

"""
Validadores personalizados para el sistema PERPETUA
"""
import math

from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _


class FiniteValidator:
    """
    Validador para números reales finitos
    """
    message = _('Ingrese un número real finito.')
    code = 'not_finite'

    def __call__(self, value):
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ValidationError(self.message, code=self.code)
        if not math.isfinite(value):
            raise ValidationError(self.message, code=self.code)


class PositiveValidator(FiniteValidator):
    """
    Validador para reales estrictamente positivos
    """
    message = _('El valor debe ser un real positivo.')
    code = 'not_positive'

    def __call__(self, value):
        super().__call__(value)
        if float(value) <= 0:
            raise ValidationError(self.message, code=self.code)


class NonPositiveValidator(FiniteValidator):
    """
    Validador para reales no positivos (átomo negativo q0)
    """
    message = _('El valor debe ser menor o igual a cero.')
    code = 'positive'

    def __call__(self, value):
        super().__call__(value)
        if float(value) > 0:
            raise ValidationError(self.message, code=self.code)


class HalfOpenUnitValidator(FiniteValidator):
    """
    Validador para masas en (0, 1]
    """
    message = _('El valor debe estar en (0, 1].')
    code = 'not_in_half_open_unit'

    def __call__(self, value):
        super().__call__(value)
        if not 0 < float(value) <= 1:
            raise ValidationError(self.message, code=self.code)


class MinimumCountValidator:
    """
    Validador para conteos enteros con mínimo
    """
    code = 'count_too_small'

    def __init__(self, minimum=1):
        self.minimum = minimum
        self.message = _('Se requiere un entero mayor o igual a %(minimum)s.') % {'minimum': minimum}

    def __call__(self, value):
        if isinstance(value, bool) or int(value) != value or value < self.minimum:
            raise ValidationError(self.message, code=self.code)

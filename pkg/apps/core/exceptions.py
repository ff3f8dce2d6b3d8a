"""
Excepciones personalizadas para el sistema PERPETUA
"""
from django.utils.translation import gettext_lazy as _


class PerpetuaBaseException(Exception):
    """
    Excepción base para todas las excepciones del sistema PERPETUA
    """
    def __init__(self, message=None, code=None, details=None):
        self.message = message or _('Ha ocurrido un error en el sistema.')
        self.code = code or 'perpetua_error'
        self.details = details or {}
        super().__init__(self.message)


class InvalidLawException(PerpetuaBaseException):
    """
    Excepción para especificadores de ley de Q mal formados
    """
    def __init__(self, spec=None, reason=None):
        message = _('Especificación de ley inválida.')
        if spec:
            message = _('La ley "%(spec)s" no es válida.') % {'spec': spec}
            if reason:
                message += f' {reason}'
        super().__init__(message=message, code='invalid_law', details={'spec': spec})


class UnsupportedLawException(PerpetuaBaseException):
    """
    Excepción para leyes sin supremo esencial finito usadas fuera de montecarlo
    """
    def __init__(self, law=None, operation=None):
        message = _('Ley no admitida para esta operación.')
        if law and operation:
            message = _('La ley %(law)s no es admisible en %(operation)s (requiere b finito).') % {
                'law': law,
                'operation': operation
            }
        super().__init__(message=message, code='unsupported_law')


class InvalidParameterException(PerpetuaBaseException):
    """
    Excepción para parámetros fuera de rango
    """
    def __init__(self, parameter=None, value=None, rule=None):
        message = _('Parámetro inválido.')
        if parameter:
            message = _('Valor inválido para %(parameter)s: %(value)s.') % {
                'parameter': parameter,
                'value': value
            }
            if rule:
                message += f' {rule}'
        super().__init__(
            message=message,
            code='invalid_parameter',
            details={'parameter': parameter, 'value': value}
        )


class SaddleRangeException(PerpetuaBaseException):
    """
    Excepción cuando el objetivo t está fuera del rango resoluble de psi'
    """
    def __init__(self, t=None, reason='below'):
        if reason == 'below':
            message = _('Objetivo por debajo del rango del punto de silla (t=%(t)s).') % {'t': t}
            code = 'target_below_saddle_range'
        elif reason == 'subcritical':
            message = _("t subcrítico: I(t)=0 en la frontera (t=%(t)s).") % {'t': t}
            code = 'subcritical_target'
        else:
            message = _('Objetivo fuera del rango numérico (t=%(t)s).') % {'t': t}
            code = 'target_out_of_numeric_range'
        super().__init__(message=message, code=code, details={'t': t})


class SaddleConvergenceException(PerpetuaBaseException):
    """
    Excepción cuando Newton/bisección no alcanza la tolerancia
    """
    def __init__(self, t=None, residual=None, iterations=None):
        message = _('El punto de silla no convergió.')
        if t is not None:
            message = _('El punto de silla para t=%(t)s no convergió (residuo %(residual)s).') % {
                't': t,
                'residual': residual
            }
        super().__init__(
            message=message,
            code='saddle_not_converged',
            details={'t': t, 'residual': residual, 'iterations': iterations}
        )


class QuadratureException(PerpetuaBaseException):
    """
    Excepción de cuadratura no convergente; conserva el valor parcial
    """
    def __init__(self, partial_value=None, abs_error=None, reason=None):
        message = str(_('La cuadratura no convergió.'))
        if reason:
            message += f' {reason}'
        super().__init__(
            message=message,
            code='quadrature_not_converged',
            details={'partial_value': partial_value, 'abs_error': abs_error}
        )


class SeriesPreconditionException(PerpetuaBaseException):
    """
    Excepción cuando una expansión asintótica se evalúa fuera de su dominio
    """
    def __init__(self, expansion=None, t=None):
        message = _('Precondición de la serie violada.')
        if expansion:
            message = _('Precondición de la serie %(expansion)s violada en t=%(t)s.') % {
                'expansion': expansion,
                't': t
            }
        super().__init__(message=message, code='series_precondition_violated', details={'t': t})


class DensityGridException(PerpetuaBaseException):
    """
    Excepción por inconsistencia interna de la grilla exacta de densidad
    """
    def __init__(self, check=None, value=None, tolerance=None):
        message = _('Grilla de densidad inconsistente.')
        if check:
            message = _('Falla de la grilla en %(check)s: %(value)s excede %(tolerance)s.') % {
                'check': check,
                'value': value,
                'tolerance': tolerance
            }
        super().__init__(
            message=message,
            code='density_grid_error',
            details={'check': check, 'value': value, 'tolerance': tolerance}
        )


class GridRangeException(PerpetuaBaseException):
    """
    Excepción para consultas fuera de la grilla
    """
    def __init__(self, t=None, t_min=None, t_max=None):
        message = _('Consulta fuera de la grilla: t=%(t)s no está en (%(t_min)s, %(t_max)s].') % {
            't': t,
            't_min': t_min,
            't_max': t_max
        }
        super().__init__(message=message, code='out_of_grid', details={'t': t})


class SimulationException(PerpetuaBaseException):
    """
    Excepción base para errores de simulación
    """
    def __init__(self, message=None, details=None):
        super().__init__(
            message=message or _('Error en la simulación.'),
            code='simulation_error',
            details=details
        )


class AcceptanceFailureException(PerpetuaBaseException):
    """
    Excepción cuando uno o más criterios de aceptación fallan
    """
    def __init__(self, failed=None):
        failed = failed or []
        message = _('Criterios de aceptación fallidos: %(failed)s.') % {'failed': ', '.join(failed)}
        super().__init__(message=message, code='acceptance_failed', details={'failed': failed})


# Función auxiliar para manejar excepciones
def handle_perpetua_exception(exception, logger=None):
    """
    Maneja excepciones del sistema PERPETUA

    Args:
        exception: Excepción a manejar
        logger: Logger para registrar el error

    Returns:
        dict: Diccionario con información del error
    """
    error_info = {
        'message': str(exception),
        'code': getattr(exception, 'code', 'unknown_error'),
        'details': getattr(exception, 'details', {})
    }

    if logger:
        logger.error(f"PerpetuaException: {error_info}")

    return error_info

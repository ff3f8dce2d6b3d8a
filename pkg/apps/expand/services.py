"""
Servicios de expansiones asintóticas cerradas para s_alpha(t) y log p_alpha(t)

Caso de dos puntos (P{Q = b} = p, P{Q <= 0} = 1 - p) con delta = 1/(alpha b p),
caso Q = 1 clásico y caso gamma desplazado Q = b - eta.
"""
import logging
import math
from typing import Dict, List, Sequence, Tuple

from django.conf import settings

from apps.core.exceptions import (
    InvalidParameterException,
    SeriesPreconditionException,
    UnsupportedLawException,
)
from apps.core.validators import PositiveValidator
from apps.qmodel.laws import GammaShift, PointMass, QLaw, TwoPoint
from apps.saddle.services import check_alpha, parallel_map, solve_saddle
from apps.tailcalc.services import tail_estimate
from .stirling import stirling_first_unsigned
from .types import ExpansionResult

logger = logging.getLogger(__name__)

EXPANSIONS = ('salpha', 'k5', 'k3', 'logdens', 'verv', 'ex4', 'ex4dens')


def _log_scales(name: str, t: float, scale: float) -> Tuple[float, float]:
    # (log(scale t), loglog(scale t)) con la precondición log(scale t) > 1
    t = float(t)
    if not (math.isfinite(t) and t > 0) or math.log(scale * t) <= 1.0:
        raise SeriesPreconditionException(expansion=name, t=t)
    big_l = math.log(scale * t)
    return big_l, math.log(big_l)


def _delta(alpha: float, b: float, p: float) -> float:
    alpha = check_alpha(alpha)
    PositiveValidator()(b)
    if not 0 < p <= 1:
        raise InvalidParameterException(parameter='p', value=p, rule='Se requiere p en (0, 1].')
    return 1.0 / (alpha * b * p)


def salpha_series_terms(alpha: float, b: float, p: float, t: float, n_terms: int) -> List[float]:
    """
    Términos n = 1..n_terms de la serie de s_alpha(t), sin el factor 1/b

    term_n = (-1)^{n+1}/L^n sum_{m=1}^{n} (-1)^{n+m} c(n, n-m+1) LL^m/m!
    con L = log(delta t) y LL = log L.
    """
    max_terms = settings.PERPETUA_SETTINGS['SERIES_MAX_TERMS']
    if not 0 <= n_terms <= max_terms:
        raise InvalidParameterException(
            parameter='n_terms', value=n_terms, rule=f'Se requiere 0 <= n_terms <= {max_terms}.'
        )
    big_l, log_log = _log_scales('salpha', t, _delta(alpha, b, p))
    terms = []
    for n in range(1, n_terms + 1):
        inner = sum(
            (-1) ** (n + m) * stirling_first_unsigned(n, n - m + 1) * log_log ** m / math.factorial(m)
            for m in range(1, n + 1)
        )
        terms.append((-1) ** (n + 1) * inner / big_l ** n)
    return terms


def salpha_series(alpha: float, b: float, p: float, t: float, n_terms: int = None) -> ExpansionResult:
    """
    Serie convergente de s_alpha(t) en potencias de 1/log(delta t)

    El resto O((t log t)^{-1}) no se modela.

    Args:
        alpha: Parámetro alpha
        b: Supremo esencial de Q
        p: P{Q = b}
        t: Objetivo con log(delta t) > 1
        n_terms: Términos de la suma doble (por defecto SERIES_DEFAULT_TERMS)

    Returns:
        ExpansionResult: Valor con la magnitud del último término
    """
    if n_terms is None:
        n_terms = settings.PERPETUA_SETTINGS['SERIES_DEFAULT_TERMS']
    terms = salpha_series_terms(alpha, b, p, t, n_terms)
    big_l, log_log = _log_scales('salpha', t, _delta(alpha, b, p))
    value = (big_l + log_log + math.fsum(terms)) / b

    last = abs(terms[-1]) / b if terms else 0.0
    convergent = len(terms) < 2 or abs(terms[-1]) <= abs(terms[-2])
    if not convergent:
        logger.warning(f"salpha_series: términos crecientes en t={t} con {n_terms} términos")
    return ExpansionResult(t=float(t), value=value, terms_used=n_terms,
                           last_term_magnitude=last, convergent=convergent)


def salpha_expansion_k5(alpha: float, b: float, p: float, t: float) -> float:
    """Expansión explícita de s_alpha(t) hasta O((loglog t/log t)^5)."""
    big_l, ll = _log_scales('k5', t, _delta(alpha, b, p))
    return (
        big_l + ll
        + ll / big_l
        + ll * (2 - ll) / (2 * big_l ** 2)
        + ll * (6 - 9 * ll + 2 * ll ** 2) / (6 * big_l ** 3)
        + ll * (12 - 36 * ll + 22 * ll ** 2 - 3 * ll ** 3) / (12 * big_l ** 4)
    ) / b


def logdensity_expansion_k3(alpha: float, b: float, p: float, t: float) -> float:
    """
    log p_alpha(t) hasta el término (log delta t)^{-3}, caso de dos puntos

    Returns:
        float: -t/b (L + LL - 1 + (LL - 1)/L + ... )
    """
    big_l, ll = _log_scales('k3', t, _delta(alpha, b, p))
    bracket = (
        big_l + ll - 1
        + (ll - 1) / big_l
        + (ll * (4 - ll) - 4) / (2 * big_l ** 2)
        + ll * (36 - 15 * ll + 2 * ll ** 2) / (6 * big_l ** 3)
    )
    return -t * bracket / b


def verv_expansion(alpha: float, t: float) -> float:
    """
    log q_alpha(t) para Q = 1 (densidad de Z_alpha - 1)

    -t (log t + loglog t - (1 + log alpha)(1 + 1/log t) + loglog t/log t)
    """
    alpha = check_alpha(alpha)
    if not t > math.e:
        raise SeriesPreconditionException(expansion='verv', t=t)
    big_l = math.log(t)
    ll = math.log(big_l)
    return -t * (big_l + ll - (1 + math.log(alpha)) * (1 + 1 / big_l) + ll / big_l)


def example4_constant_s(theta: float, lam: float, b: float) -> float:
    """theta b/lambda + (1 + theta)^2 log(1/b)."""
    return theta * b / lam + (1 + theta) ** 2 * math.log(1 / b)


def example4_constant_density(theta: float, lam: float, b: float) -> float:
    """theta b/lambda + (1 + theta)^2 log(1/b) - 1 - theta."""
    return example4_constant_s(theta, lam, b) - 1 - theta


def example4_expansions(alpha: float, b: float, theta: float, lam: float, t: float) -> Tuple[float, float]:
    """
    Expansiones de s_alpha(t) y log p_alpha(t) para Q = b - eta, eta ~ Gamma(theta, escala lambda)

    Se transcriben hasta el término 1/log(t/alpha); los restos son
    O((loglog t/log t)^2).

    Returns:
        tuple: (s_expansion, logdensity_expansion)
    """
    alpha = check_alpha(alpha)
    if not t / alpha > math.exp(math.e):
        raise SeriesPreconditionException(expansion='ex4', t=t)
    big_l = math.log(t / alpha)
    ll = math.log(big_l)
    s_expansion = (
        big_l + (1 + theta) * ll
        + (1 + theta) ** 2 * ll / big_l
        + example4_constant_s(theta, lam, b) / big_l
    ) / b
    logdensity_expansion = -t * (
        big_l + (1 + theta) * ll - 1
        + (1 + theta) ** 2 * ll / big_l
        + example4_constant_density(theta, lam, b) / big_l
    ) / b
    return s_expansion, logdensity_expansion


def psi_saddle_series(b: float, s: float, t: float, k: int) -> float:
    """
    psi_alpha(s_alpha(t)) ~ t sum_{i=1}^{k} (i - 1)!/(b^i s^{i-1})
    """
    max_terms = settings.PERPETUA_SETTINGS['SERIES_MAX_TERMS']
    if not 1 <= k <= max_terms:
        raise InvalidParameterException(parameter='k', value=k, rule=f'Se requiere 1 <= k <= {max_terms}.')
    return t * math.fsum(math.factorial(i - 1) / (b ** i * s ** (i - 1)) for i in range(1, k + 1))


def logdensity_saddle_series(alpha: float, law: QLaw, t: float, k: int = None) -> ExpansionResult:
    """
    log p_alpha(t) con psi(s) reemplazado por su serie en 1/s

    Usa el punto de silla exacto y el prefactor de tail_estimate; solo psi
    se expande, antes de reexpandir s en log t. Vale para leyes con átomo
    en b (puntual o de dos puntos).

    Args:
        alpha: Parámetro alpha
        law: PointMass o TwoPoint
        t: Objetivo
        k: Términos de la serie (por defecto SERIES_DEFAULT_TERMS)

    Returns:
        ExpansionResult: Valor con la magnitud del término k-ésimo
    """
    b, _ = _series_parameters(law, 'logdens')
    if k is None:
        k = settings.PERPETUA_SETTINGS['SERIES_DEFAULT_TERMS']
    estimate = tail_estimate(alpha, law, t)
    s = estimate.saddle.s
    value = -estimate.t * s + psi_saddle_series(b, s, estimate.t, k) + estimate.log_prefactor_density
    last = estimate.t * math.factorial(k - 1) / (b ** k * s ** (k - 1))
    # los términos decrecen mientras i - 1 < b s
    return ExpansionResult(t=estimate.t, value=value, terms_used=k, last_term_magnitude=last,
                           convergent=k - 1 < b * s)


def _series_parameters(law: QLaw, which: str) -> Tuple[float, float]:
    if isinstance(law, TwoPoint):
        return law.b, law.p
    if isinstance(law, PointMass):
        return law.b, 1.0
    raise UnsupportedLawException(law=str(law), operation=which)


def _gamma_parameters(law: QLaw, which: str) -> Tuple[float, float, float]:
    if isinstance(law, GammaShift):
        return law.b, law.theta, law.lam
    if isinstance(law, PointMass):
        # limite theta = 0
        return law.b, 0.0, 1.0
    raise UnsupportedLawException(law=str(law), operation=which)


def expansion_for(which: str, alpha: float, law: QLaw, t: float) -> Tuple[ExpansionResult, float]:
    """
    Evalúa la expansión pedida junto con su referencia exacta

    Args:
        which: Una de salpha, k5, k3, logdens, verv, ex4, ex4dens
        alpha: Parámetro alpha
        law: Ley de Q compatible con la expansión
        t: Objetivo

    Returns:
        tuple: (ExpansionResult, referencia del solver)
    """
    if which == 'salpha':
        b, p = _series_parameters(law, which)
        result = salpha_series(alpha, b, p, t)
        return result, solve_saddle(alpha, law, t).s
    if which == 'k5':
        b, p = _series_parameters(law, which)
        value = salpha_expansion_k5(alpha, b, p, t)
        last = abs(salpha_series_terms(alpha, b, p, t, 4)[-1]) / b
        return ExpansionResult(t=t, value=value, terms_used=4, last_term_magnitude=last), \
            solve_saddle(alpha, law, t).s
    if which == 'k3':
        b, p = _series_parameters(law, which)
        value = logdensity_expansion_k3(alpha, b, p, t)
        big_l, ll = _log_scales(which, t, _delta(alpha, b, p))
        last = abs(t * ll * (36 - 15 * ll + 2 * ll ** 2) / (6 * big_l ** 3) / b)
        return ExpansionResult(t=t, value=value, terms_used=3, last_term_magnitude=last), \
            tail_estimate(alpha, law, t).log_density
    if which == 'logdens':
        return logdensity_saddle_series(alpha, law, t), tail_estimate(alpha, law, t).log_density
    if which == 'verv':
        if not (isinstance(law, PointMass) and law.b == 1.0):
            raise UnsupportedLawException(law=str(law), operation=which)
        value = verv_expansion(alpha, t)
        last = abs(t * math.log(math.log(t)) / math.log(t))
        # q_alpha(t) = p_alpha(t + 1)
        return ExpansionResult(t=t, value=value, terms_used=1, last_term_magnitude=last), \
            tail_estimate(alpha, law, t + 1.0).log_density
    if which in ('ex4', 'ex4dens'):
        b, theta, lam = _gamma_parameters(law, which)
        s_expansion, density_expansion = example4_expansions(alpha, b, theta, lam, t)
        big_l = math.log(t / alpha)
        if which == 'ex4':
            last = abs(example4_constant_s(theta, lam, b) / big_l / b)
            return ExpansionResult(t=t, value=s_expansion, terms_used=1, last_term_magnitude=last), \
                solve_saddle(alpha, law, t).s
        last = abs(t * example4_constant_density(theta, lam, b) / big_l / b)
        return ExpansionResult(t=t, value=density_expansion, terms_used=1, last_term_magnitude=last), \
            tail_estimate(alpha, law, t).log_density
    raise InvalidParameterException(
        parameter='which', value=which, rule=f'Opciones: {", ".join(EXPANSIONS)}.'
    )


def expansion_rows(which: str, alpha: float, law: QLaw, ts: Sequence[float]) -> List[Dict[str, float]]:
    """Filas t, expansion, solver_reference, abs_error sobre una grilla."""
    def row(t):
        result, reference = expansion_for(which, alpha, law, t)
        return {
            't': result.t,
            'expansion': result.value,
            'solver_reference': reference,
            'abs_error': abs(result.value - reference),
        }
    return parallel_map(row, list(ts))

"""
Servicios de asintótica de colas: cumulante phi_alpha, estimación de
densidad y cola por punto de silla, exponente de Legendre y fórmula de
de Bruijn para el caso Dickman.

Todo se reporta en logaritmo natural; nunca se forma e^{exponente}.
"""
import logging
import math
from typing import Dict, List, Sequence

from apps.core.exceptions import (
    InvalidParameterException,
    PerpetuaBaseException,
    SaddleConvergenceException,
    SaddleRangeException,
)
from apps.qmodel.laws import PointMass, QLaw
from apps.qmodel.services import log_mgf, mgf, mgf_ratio, moments, require_finite_b
from apps.saddle.services import (
    check_alpha,
    find_bracket,
    get_saddle_setting,
    parallel_map,
    psi,
    psi_prime,
    psi_second,
    safeguarded_newton,
    solve_saddle,
)
from .types import TailEstimate

logger = logging.getLogger(__name__)

DICKMAN_LAW = PointMass(b=1.0)


def psi_third(alpha: float, law: QLaw, s: float) -> float:
    """psi'''_alpha(s) = (alpha g''(s) - 2 psi''_alpha(s))/s, límite alpha E Q^3/3 en 0."""
    if s < 1e-5:
        return alpha * moments(law)[2] / 3.0
    return (alpha * mgf(law, s, 2) - 2.0 * psi_second(alpha, law, s)) / s


def phi(alpha: float, law: QLaw, s: float, k: int = 0) -> float:
    """
    Derivada k-ésima de phi_alpha(s) = log g(s) + psi_alpha(s)

    Args:
        alpha: Parámetro alpha > 0
        law: Ley de Q con b finito
        s: Argumento no negativo
        k: Orden en {0, 1, 2, 3}

    Returns:
        float: phi_alpha^(k)(s)
    """
    require_finite_b(law, 'phi')
    alpha = check_alpha(alpha)
    s = float(s)
    if k == 0:
        return log_mgf(law, s) + psi(alpha, law, s)

    r1 = mgf_ratio(law, s, 1)
    if k == 1:
        return r1 + psi_prime(alpha, law, s)
    r2 = mgf_ratio(law, s, 2)
    if k == 2:
        return r2 - r1 ** 2 + psi_second(alpha, law, s)
    if k == 3:
        r3 = mgf_ratio(law, s, 3)
        return r3 - 3.0 * r2 * r1 + 2.0 * r1 ** 3 + psi_third(alpha, law, s)
    raise InvalidParameterException(parameter='k', value=k, rule='Se admiten órdenes 0 a 3.')


def tail_estimate(alpha: float, law: QLaw, t: float) -> TailEstimate:
    """
    Asintótica de punto de silla para la densidad y la cola de Z_alpha

    log p(t) ~ -t s + psi(s) + log(t^{1/2} s / (alpha (2 pi b)^{1/2}))
    log P{Z > t} ~ -t s + psi(s) + log(t^{1/2} / (alpha (2 pi b)^{1/2}))

    Args:
        alpha: Parámetro alpha
        law: Ley de Q con b finito
        t: Objetivo en el rango del punto de silla

    Returns:
        TailEstimate: Exponente, prefactores y logaritmos de densidad y cola
    """
    saddle = solve_saddle(alpha, law, t)
    s = saddle.s
    exponent = -saddle.t * s + psi(alpha, law, s)
    log_prefactor_tail = (
        0.5 * math.log(saddle.t)
        - math.log(alpha)
        - 0.5 * math.log(2.0 * math.pi * law.essential_sup)
    )
    log_prefactor_density = log_prefactor_tail + math.log(s)
    return TailEstimate(
        t=saddle.t,
        saddle=saddle,
        exponent=exponent,
        log_prefactor_density=log_prefactor_density,
        log_prefactor_tail=log_prefactor_tail,
        log_density=exponent + log_prefactor_density,
        log_tail=exponent + log_prefactor_tail,
    )


def legendre_exponent(alpha: float, law: QLaw, t: float) -> float:
    """
    I(t) = sup_{s >= 0} (s t - phi_alpha(s)), alcanzado en phi'_alpha(s**) = t

    Raises:
        SaddleRangeException: Si t <= phi'_alpha(0+) (caso frontera I(t) = 0)
    """
    require_finite_b(law, 'legendre_exponent')
    alpha = check_alpha(alpha)
    t = float(t)
    threshold = (1.0 + alpha) * moments(law)[0]
    if not t > threshold:
        raise SaddleRangeException(t=t, reason='subcritical')

    derivative = lambda s: phi(alpha, law, s, 1)  # noqa: E731
    lo, hi = find_bracket(derivative, t, get_saddle_setting('SADDLE_S_MAX'))
    s_star, iterations = safeguarded_newton(
        lambda s: derivative(s) - t,
        lambda s: phi(alpha, law, s, 2),
        lo, hi, 0.5 * (lo + hi),
        get_saddle_setting('SADDLE_MAX_ITERATIONS'),
    )
    residual = derivative(s_star) - t
    if not abs(residual) <= get_saddle_setting('SADDLE_RTOL') * max(abs(t), 1.0):
        raise SaddleConvergenceException(t=t, residual=residual, iterations=iterations)

    logger.debug(f"legendre_exponent: t={t} s**={s_star} iteraciones={iterations}")
    return t * s_star - phi(alpha, law, s_star, 0)


def debruijn_log_density(t: float) -> float:
    """
    Fórmula clásica para la densidad de Dickman q_1 (alpha = 1, Q = 1)

    log q_1(t) ~ -log(2 pi t)/2 - ((e^s - 1) - psi_1(s)), s = s_1(t);
    la integral de (y e^y - e^y + 1)/y se reduce a (e^s - 1) - psi_1(s).

    Args:
        t: Argumento mayor que e

    Returns:
        float: log q_1(t)
    """
    t = float(t)
    if not t > math.e:
        raise InvalidParameterException(parameter='t', value=t, rule='Se requiere t > e.')
    s = solve_saddle(1.0, DICKMAN_LAW, t).s
    integral = math.expm1(s) - psi(1.0, DICKMAN_LAW, s)
    return -0.5 * math.log(2.0 * math.pi * t) - integral


def _tail_row(alpha: float, law: QLaw, t: float, legendre: bool, debruijn: bool) -> Dict[str, float]:
    row = tail_estimate(alpha, law, t).to_row()
    if legendre:
        try:
            row['I'] = legendre_exponent(alpha, law, t)
        except SaddleRangeException as e:
            logger.warning(f"I(t) no definido en t={t}: {e}")
            row['I'] = float('nan')
    if debruijn:
        # p(t) = q_1(t - 1) para alpha = 1 y Q = 1
        try:
            row['debruijn'] = debruijn_log_density(t - 1.0)
        except PerpetuaBaseException as e:
            logger.warning(f"de Bruijn no disponible en t={t}: {e}")
            row['debruijn'] = float('nan')
    return row


def tail_grid(alpha: float, law: QLaw, ts: Sequence[float],
              legendre: bool = False, debruijn: bool = False) -> List[Dict[str, float]]:
    """
    Evalúa la asintótica sobre una grilla de t en paralelo

    Args:
        alpha: Parámetro alpha
        law: Ley de Q
        ts: Grilla de objetivos
        legendre: Agrega la columna I
        debruijn: Agrega la columna de de Bruijn evaluada en t - 1

    Returns:
        list: Filas en el orden de ts
    """
    rows = parallel_map(lambda t: _tail_row(alpha, law, t, legendre, debruijn), list(ts))
    logger.info(f"tail_grid: {len(rows)} puntos para alpha={alpha}, ley {law}")
    return rows

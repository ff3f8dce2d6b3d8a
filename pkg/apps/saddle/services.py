"""
Servicios de punto de silla: psi_alpha, su derivada y la raíz s_alpha(t)
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, Tuple

import numpy as np
from django.conf import settings
from scipy import integrate

from apps.core.exceptions import (
    InvalidParameterException,
    QuadratureException,
    SaddleConvergenceException,
    SaddleRangeException,
)
from apps.qmodel.laws import QLaw
from apps.qmodel.services import (
    f_ratio,
    mgf,
    mgf_minus_one,
    moments,
    require_finite_b,
)
from .types import SaddlePoint

logger = logging.getLogger(__name__)

# s mínimo al encoger el intervalo hacia 0
S_FLOOR = 1e-15


def get_saddle_setting(key):
    """Lee una clave numérica de PERPETUA_SETTINGS."""
    return getattr(settings, 'PERPETUA_SETTINGS', {})[key]


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (math.isfinite(alpha) and alpha > 0):
        raise InvalidParameterException(parameter='alpha', value=alpha, rule='Se requiere alpha > 0.')
    return alpha


def psi_prime(alpha: float, law: QLaw, s: float) -> float:
    """
    psi'_alpha(s) = alpha (g(s) - 1)/s, con el límite alpha E[Q] en s = 0

    Args:
        alpha: Parámetro de la ley Beta(alpha, 1)
        law: Ley de Q con b finito
        s: Argumento no negativo

    Returns:
        float: Valor de psi'; inf si g(s) desborda
    """
    require_finite_b(law, 'psi_prime')
    alpha = check_alpha(alpha)
    s = float(s)
    if s < 0:
        raise InvalidParameterException(parameter='s', value=s, rule='Se requiere s >= 0.')
    if s == 0:
        return alpha * mgf(law, 0.0, 1)
    return alpha * mgf_minus_one(law, s) / s


def psi_second(alpha: float, law: QLaw, s: float) -> float:
    """psi''_alpha(s) = (alpha g'(s) - psi'_alpha(s))/s."""
    s = float(s)
    if s < 1e-6:
        # serie: alpha (E Q^2/2 + E Q^3 s/3)
        _, second, third = moments(law)
        return alpha * (second / 2.0 + third * s / 3.0)
    with np.errstate(invalid='ignore'):
        return (alpha * mgf(law, s, 1) - psi_prime(alpha, law, s)) / s


def _patch_integral(law: QLaw, upper: float) -> float:
    # Gauss-Legendre en [0, upper]; los nodos evitan el 0/0 del origen
    nodes, weights = np.polynomial.legendre.leggauss(get_saddle_setting('QUAD_PATCH_NODES'))
    ys = 0.5 * upper * (nodes + 1.0)
    values = np.array([mgf_minus_one(law, y) / y for y in ys])
    return float(0.5 * upper * np.dot(weights, values))


def psi(alpha: float, law: QLaw, s: float) -> float:
    """
    psi_alpha(s) = alpha * integral_0^s (g(y) - 1)/y dy

    Tramo [0, y0] con y0 = min(0.1, 0.1/b) por Gauss-Legendre sobre el
    integrando estable (expm1); el resto con QUADPACK adaptativo.

    Raises:
        QuadratureException: Si la cuadratura no alcanza la tolerancia
    """
    require_finite_b(law, 'psi')
    alpha = check_alpha(alpha)
    s = float(s)
    if s < 0:
        raise InvalidParameterException(parameter='s', value=s, rule='Se requiere s >= 0.')
    if s == 0:
        return 0.0

    y0 = min(0.1, 0.1 / law.essential_sup)
    if s <= y0:
        return alpha * _patch_integral(law, s)

    head = _patch_integral(law, y0)
    result = integrate.quad(
        lambda y: mgf_minus_one(law, y) / y,
        y0,
        s,
        epsabs=0.0,
        epsrel=get_saddle_setting('QUAD_EPSREL'),
        limit=get_saddle_setting('QUAD_LIMIT'),
        full_output=1,
    )
    tail, abs_error = result[0], result[1]
    value = alpha * (head + tail)
    if len(result) > 3 and alpha * abs_error > 1e-10 * (1.0 + abs(value)):
        logger.warning(f"psi: cuadratura sin convergencia en s={s}: {result[3]}")
        raise QuadratureException(partial_value=value, abs_error=alpha * abs_error, reason=result[3])
    return value


def safeguarded_newton(func: Callable[[float], float], dfunc: Callable[[float], float],
                       lo: float, hi: float, x0: float,
                       max_iterations: int) -> Tuple[float, int]:
    """
    Newton con respaldo de bisección para func creciente con func(lo) < 0 < func(hi)

    Args:
        func: Función creciente en [lo, hi]
        dfunc: Derivada de func
        lo, hi: Extremos del intervalo que encierra la raíz
        x0: Estimación inicial (se recorta al intervalo)
        max_iterations: Límite de iteraciones

    Returns:
        tuple: (raíz, iteraciones usadas)
    """
    x = x0 if lo < x0 < hi else 0.5 * (lo + hi)
    step_old = hi - lo
    step = step_old
    f, df = func(x), dfunc(x)

    for iteration in range(1, max_iterations + 1):
        if f == 0.0:
            return x, iteration
        if f < 0:
            lo = x
        else:
            hi = x

        newton_ok = (
            math.isfinite(f) and math.isfinite(df) and df > 0
            and ((x - hi) * df - f) * ((x - lo) * df - f) < 0
            and abs(2.0 * f) <= abs(step_old * df)
        )
        step_old = step
        if newton_ok:
            step = f / df
            x_new = x - step
        else:
            step = 0.5 * (hi - lo)
            x_new = lo + step

        if x_new == x or abs(step) <= 4 * np.finfo(float).eps * max(1.0, abs(x_new)):
            return x_new, iteration
        x = x_new
        f, df = func(x), dfunc(x)

    return x, max_iterations


def find_bracket(func: Callable[[float], float], target: float,
                 s_max: float) -> Tuple[float, float]:
    """
    Busca [lo, hi] con func(lo) < target < func(hi) para func creciente

    Crecimiento geométrico s <- 2s desde s = 1, o reducción hacia 0 si
    func(1) > target.

    Raises:
        SaddleRangeException: Si el objetivo queda fuera de (func(0+), func(s_max)]
    """
    value = func(1.0)
    if value < target:
        lo, hi = 1.0, 2.0
        while not func(hi) > target:
            lo, hi = hi, 2.0 * hi
            if hi > s_max:
                raise SaddleRangeException(t=target, reason='numeric')
    elif value > target:
        lo, hi = 0.5, 1.0
        while not func(lo) < target:
            lo, hi = 0.5 * lo, lo
            if lo < S_FLOOR:
                raise SaddleRangeException(t=target, reason='below')
    else:
        lo, hi = 0.5, 2.0
    return lo, hi


def initial_guess(alpha: float, law: QLaw, t: float) -> float:
    """
    b^{-1}(log(t/alpha) + loglog(t/alpha)) cuando t/alpha > e
    """
    ratio = t / alpha
    if ratio <= math.e:
        return 1.0
    return (math.log(ratio) + math.log(math.log(ratio))) / law.essential_sup


def fixed_point_saddle(alpha: float, law: QLaw, t: float, iterations: int = 50,
                       start: float = None) -> float:
    """
    Iteración de punto fijo b s = log(t/alpha) + log(s + alpha/t) - log f(s)

    Es una reescritura exacta de alpha (g(s) - 1)/s = t con g = e^{bs} f;
    converge para t/alpha grande porque el lado derecho varía como log s.

    Args:
        alpha: Parámetro alpha
        law: Ley con b finito
        t: Objetivo
        iterations: Número de iteraciones
        start: Valor inicial; por defecto la estimación de primer orden

    Returns:
        float: Aproximación de s_alpha(t)
    """
    require_finite_b(law, 'fixed_point_saddle')
    alpha = check_alpha(alpha)
    if t / alpha <= math.e:
        raise InvalidParameterException(parameter='t', value=t, rule='Se requiere t/alpha > e.')
    b = law.essential_sup
    s = start if start is not None else initial_guess(alpha, law, t)
    for _ in range(iterations):
        s = (math.log(t / alpha) + math.log(s + alpha / t) - math.log(f_ratio(law, s))) / b
    return s


def solve_saddle(alpha: float, law: QLaw, t: float) -> SaddlePoint:
    """
    Resuelve psi'_alpha(s) = t para la única raíz positiva s_alpha(t)

    Args:
        alpha: Parámetro alpha > 0
        law: Ley de Q con b finito
        t: Objetivo, mayor que max(alpha E Q, 0) y que el piso configurado

    Returns:
        SaddlePoint: Raíz con residuo, iteraciones e intervalo

    Raises:
        SaddleRangeException: t fuera del rango de psi'
        SaddleConvergenceException: Residuo final por encima de la tolerancia
    """
    require_finite_b(law, 'solve_saddle')
    alpha = check_alpha(alpha)
    t = float(t)
    if not math.isfinite(t):
        raise InvalidParameterException(parameter='t', value=t, rule='Se requiere t finito.')

    floor = max(alpha * mgf(law, 0.0, 1), 0.0, get_saddle_setting('SADDLE_T_MIN'))
    if t <= floor:
        raise SaddleRangeException(t=t, reason='below')

    rtol = get_saddle_setting('SADDLE_RTOL')
    lo, hi = find_bracket(lambda s: psi_prime(alpha, law, s), t, get_saddle_setting('SADDLE_S_MAX'))
    guess = initial_guess(alpha, law, t)

    s, iterations = safeguarded_newton(
        lambda s: psi_prime(alpha, law, s) - t,
        lambda s: psi_second(alpha, law, s),
        lo, hi, guess,
        get_saddle_setting('SADDLE_MAX_ITERATIONS'),
    )
    residual = psi_prime(alpha, law, s) - t
    if not abs(residual) <= rtol * t:
        logger.error(f"solve_saddle: t={t} s={s} residuo={residual}")
        raise SaddleConvergenceException(t=t, residual=residual, iterations=iterations)

    logger.debug(f"solve_saddle: t={t} s={s} iteraciones={iterations} intervalo=({lo}, {hi})")
    return SaddlePoint(
        t=t, s=s, residual=residual, iterations=iterations,
        bracket_lo=lo, bracket_hi=hi,
    )


def parallel_map(func, items: Sequence) -> List:
    """
    Mapa en orden sobre items con a lo sumo PERP_THREADS hilos
    """
    workers = max(1, min(getattr(settings, 'PERP_THREADS', 1), len(items) or 1))
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def solve_saddle_grid(alpha: float, law: QLaw, ts: Sequence[float]) -> List[SaddlePoint]:
    """Resuelve el punto de silla sobre una grilla de t, en el orden dado."""
    return parallel_map(lambda t: solve_saddle(alpha, law, t), list(ts))

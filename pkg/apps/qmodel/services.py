"""
Servicios de la ley de Q: función generadora de momentos g(s) = E[e^{sQ}],
sus derivadas en forma cerrada, f(s) = e^{-bs} g(s), momentos y muestreo.
"""
import logging
import math
from typing import Optional, Tuple, Union

import numpy as np
from scipy import stats

from apps.core.exceptions import InvalidParameterException, UnsupportedLawException
from .laws import ExpValidation, GammaShift, PointMass, QLaw, TwoPoint

logger = logging.getLogger(__name__)

MAX_DERIVATIVE_ORDER = 3


def require_finite_b(law: QLaw, operation: str) -> None:
    """
    Rechaza leyes sin supremo esencial finito

    Raises:
        UnsupportedLawException: Si la ley es ExpValidation
    """
    if law.b_infinite:
        raise UnsupportedLawException(law=str(law), operation=operation)


def _check_order(k: int) -> None:
    if k not in range(MAX_DERIVATIVE_ORDER + 1):
        raise InvalidParameterException(
            parameter='k', value=k, rule='Se admiten derivadas de orden 0 a 3.'
        )


def _check_argument(law: QLaw, s: float) -> float:
    s = float(s)
    if not s >= 0:
        raise InvalidParameterException(parameter='s', value=s, rule='Se requiere s >= 0.')
    if isinstance(law, ExpValidation) and s >= law.c:
        raise InvalidParameterException(
            parameter='s', value=s, rule=f'La FGM de exp diverge para s >= c = {law.c}.'
        )
    return s


def log_mgf(law: QLaw, s: float) -> float:
    """
    log g(s) evaluado sin desbordamiento

    Args:
        law: Ley de Q
        s: Argumento no negativo

    Returns:
        float: log E[e^{sQ}]
    """
    s = _check_argument(law, s)
    if isinstance(law, PointMass):
        return law.b * s
    if isinstance(law, TwoPoint):
        if law.p == 1.0:
            return law.b * s
        return float(np.logaddexp(math.log(law.p) + law.b * s, math.log1p(-law.p) + law.q0 * s))
    if isinstance(law, GammaShift):
        return law.b * s - law.theta * math.log1p(law.lam * s)
    if isinstance(law, ExpValidation):
        return math.log(law.c) - math.log(law.c - s)
    raise UnsupportedLawException(law=repr(law), operation='log_mgf')


def mgf_ratio(law: QLaw, s: float, k: int) -> float:
    """
    Cociente g^(k)(s)/g(s) sin formar g(s); tiende a b^k cuando s crece
    """
    _check_order(k)
    s = _check_argument(law, s)
    if k == 0:
        return 1.0
    if isinstance(law, PointMass):
        return law.b ** k
    if isinstance(law, TwoPoint):
        if law.p == 1.0:
            return law.b ** k
        # peso del átomo b bajo la medida inclinada; exp((q0 - b)s) <= 1
        weight = 1.0 / (1.0 + (1.0 - law.p) / law.p * math.exp((law.q0 - law.b) * s))
        return weight * law.b ** k + (1.0 - weight) * law.q0 ** k
    if isinstance(law, GammaShift):
        # Leibniz sobre e^{bs} (1 + lambda s)^{-theta}
        base = 1.0 + law.lam * s
        total = 0.0
        falling = 1.0
        for j in range(k + 1):
            if j > 0:
                falling *= (-law.theta - (j - 1)) * law.lam / base
            total += math.comb(k, j) * law.b ** (k - j) * falling
        return total
    if isinstance(law, ExpValidation):
        return math.factorial(k) / (law.c - s) ** k
    raise UnsupportedLawException(law=repr(law), operation='mgf_ratio')


def mgf(law: QLaw, s: float, k: int = 0) -> float:
    """
    Derivada k-ésima de g(s) = E[e^{sQ}] en forma cerrada

    Args:
        law: Ley de Q
        s: Argumento no negativo (s < c para ExpValidation)
        k: Orden de derivada en {0, 1, 2, 3}

    Returns:
        float: g^(k)(s); inf si e^{bs} excede el rango de doubles
    """
    _check_order(k)
    if isinstance(law, TwoPoint) and law.p < 1.0:
        # suma directa: conserva el signo correcto de q0^k para s pequeño
        s = _check_argument(law, s)
        with np.errstate(over='ignore'):
            return float(
                law.p * law.b ** k * np.exp(law.b * s)
                + (1.0 - law.p) * law.q0 ** k * np.exp(law.q0 * s)
            )
    with np.errstate(over='ignore'):
        return float(np.exp(log_mgf(law, s)) * mgf_ratio(law, s, k))


def mgf_minus_one(law: QLaw, s: float) -> float:
    """
    g(s) - 1 sin cancelación cerca de s = 0 (vía expm1)
    """
    s = _check_argument(law, s)
    with np.errstate(over='ignore'):
        if isinstance(law, PointMass):
            return float(np.expm1(law.b * s))
        if isinstance(law, TwoPoint):
            return float(law.p * np.expm1(law.b * s) + (1.0 - law.p) * np.expm1(law.q0 * s))
        if isinstance(law, GammaShift):
            return float(np.expm1(law.b * s - law.theta * np.log1p(law.lam * s)))
    if isinstance(law, ExpValidation):
        return s / (law.c - s)
    raise UnsupportedLawException(law=repr(law), operation='mgf_minus_one')


def f_ratio(law: QLaw, s: float) -> float:
    """
    f(s) = E[e^{-s(b - Q)}] = e^{-bs} g(s), en (0, 1] y no creciente
    """
    require_finite_b(law, 'f_ratio')
    s = _check_argument(law, s)
    if isinstance(law, PointMass):
        return 1.0
    if isinstance(law, TwoPoint):
        return law.p + (1.0 - law.p) * math.exp((law.q0 - law.b) * s)
    if isinstance(law, GammaShift):
        return math.exp(-law.theta * math.log1p(law.lam * s))
    raise UnsupportedLawException(law=repr(law), operation='f_ratio')


def moments(law: QLaw) -> Tuple[float, float, float]:
    """
    Momentos crudos (E Q, E Q^2, E Q^3) a partir de g^(k)(0)
    """
    return tuple(mgf(law, 0.0, k) for k in (1, 2, 3))


def abs_bound(law: QLaw, probability: float = 0.9999) -> float:
    """
    Cota de |Q|: supremo exacto si el soporte es acotado, cuantil alto si no

    Args:
        law: Ley de Q
        probability: Nivel del cuantil para colas no acotadas

    Returns:
        float: Cota usada en el sesgo de truncamiento de la simulación
    """
    if isinstance(law, PointMass):
        return law.b
    if isinstance(law, TwoPoint):
        return max(law.b, abs(law.q0))
    if isinstance(law, GammaShift):
        eta = stats.gamma.ppf(probability, law.theta, scale=law.lam)
        return float(max(law.b, eta - law.b))
    if isinstance(law, ExpValidation):
        return float(stats.expon.ppf(probability, scale=1.0 / law.c))
    raise UnsupportedLawException(law=repr(law), operation='abs_bound')


def sample_q(law: QLaw, rng: np.random.Generator,
             size: Optional[int] = None) -> Union[float, np.ndarray]:
    """
    Extrae Q con el generador del llamador (único estado mutado)

    Args:
        law: Ley de Q
        rng: Generador numpy sembrado de forma determinista
        size: None para una extracción escalar, entero para un vector

    Returns:
        float o ndarray con las extracciones
    """
    if isinstance(law, PointMass):
        draws = np.full(1 if size is None else size, law.b)
    elif isinstance(law, TwoPoint):
        uniforms = rng.random(1 if size is None else size)
        draws = np.where(uniforms < law.p, law.b, law.q0)
    elif isinstance(law, GammaShift):
        draws = law.b - rng.gamma(law.theta, law.lam, 1 if size is None else size)
    elif isinstance(law, ExpValidation):
        draws = rng.exponential(1.0 / law.c, 1 if size is None else size)
    else:
        raise UnsupportedLawException(law=repr(law), operation='sample_q')

    if size is None:
        return float(draws[0])
    return draws

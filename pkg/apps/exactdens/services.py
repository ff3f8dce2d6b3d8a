"""
Oráculo exacto para Q = b: densidad q_alpha de Z_alpha - Q_1 por pasos sobre
la ecuación integral con retardo

    t q(t) = alpha * integral_{t-b}^{t} q(y) dy,   q = 0 en (-inf, 0],

y cola P{Z_alpha - Q_1 > t}, todo en escala logarítmica.
"""
import logging
import math
import time

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from scipy.special import hyp2f1, logsumexp

from apps.core.exceptions import DensityGridException, GridRangeException, InvalidParameterException
from apps.core.validators import PositiveValidator
from apps.saddle.services import check_alpha
from .types import DensityGrid

logger = logging.getLogger(__name__)

MIN_STEPS_PER_UNIT = 256
MODE_TOLERANCE = 1e-12
# pesos de f_{i-3}, f_{i-2}, f_{i-1}, f_i sobre [t_{i-1}, t_i], en unidades de h
ADAMS_MOULTON = np.array([1.0, -5.0, 19.0, 9.0]) / 24.0


def get_density_setting(key):
    return settings.PERPETUA_SETTINGS[key]


def _check_grid_parameters(alpha, b, t_max, steps_per_unit):
    alpha = check_alpha(alpha)
    try:
        PositiveValidator()(b)
    except ValidationError:
        raise InvalidParameterException(parameter='b', value=b, rule='Se requiere b > 0.')
    if not t_max >= 3 * b:
        raise InvalidParameterException(parameter='t_max', value=t_max, rule='Se requiere t_max >= 3b.')
    if steps_per_unit < MIN_STEPS_PER_UNIT or steps_per_unit % 2:
        raise InvalidParameterException(
            parameter='steps_per_unit',
            value=steps_per_unit,
            rule=f'Se requiere un entero par >= {MIN_STEPS_PER_UNIT}.'
        )
    return alpha, float(b), float(t_max), int(steps_per_unit)


def _first_interval_increments(alpha, b, n):
    # log integral_{t_j}^{t_{j+1}} (y/b)^{alpha-1} dy para j = 0..n-1
    j = np.arange(n, dtype=float)
    with np.errstate(divide='ignore'):
        log_ratio = np.log(j / (j + 1.0))
    return math.log(b / alpha) + alpha * np.log((j + 1.0) / n) + np.log(-np.expm1(alpha * log_ratio))


def _first_delay_window(alpha, b, n):
    """
    q y sus incrementos en (b, 2b] en forma cerrada

    Con X = 1 - b/t la ecuación con retardo se integra exactamente:

        q(t) = (t/b)^{alpha-1} [1 - X^alpha 2F1(1, alpha; alpha+1; X)],

    y integral_0^t q = integral_0^{t-b} q + t q(t)/alpha da los incrementos.
    El término (t - b)^alpha queda absorbido, sin error de cuadratura.

    Returns:
        tuple: (log q en los nodos n..2n, log de los incrementos n..2n-1)
    """
    t_over_b = np.arange(n, 2 * n + 1) / n
    x = 1.0 - 1.0 / t_over_b
    with np.errstate(divide='ignore'):
        log_x = np.log(x)
    # 1 - X^alpha 2F1(1, alpha; alpha+1; X) sin cancelación cerca de X = 0
    bracket = -np.expm1(alpha * log_x) - np.exp(alpha * log_x) * (alpha * x / (alpha + 1.0)) * hyp2f1(
        1.0, alpha + 1.0, alpha + 2.0, x
    )
    if not np.all(bracket > 0):
        raise DensityGridException(check='first_delay', value=float(bracket.min()), tolerance=0.0)
    q = t_over_b ** (alpha - 1.0) * bracket

    head = (b / alpha) * (t_over_b - 1.0) ** alpha
    scaled = b * t_over_b * q / alpha
    increments = np.diff(head) + np.diff(scaled)
    if not np.all(increments > 0):
        raise DensityGridException(check='first_delay', value=float(increments.min()), tolerance=0.0)
    return np.log(q), np.log(increments)


def _simpson_pairs(log_values, log_h3):
    # log de h/3 (f_a + 4 f_{a+1} + f_{a+2}) para cada par que empieza en índice par
    stacked = np.stack([log_values[:-2:2], log_values[1:-1:2] + math.log(4.0), log_values[2::2]])
    return logsumexp(stacked, axis=0) + log_h3


def _unnormalized_tails(h, log_q, log_increments):
    """
    log integral_{t_i}^{inf} q acumulando los incrementos de derecha a izquierda

    Más allá de t_max la cola se extrapola con la pendiente final de log q.
    """
    slope = (log_q[-2] - log_q[-1]) / h
    if not slope > 0:
        raise DensityGridException(check='tail_decay', value=slope, tolerance=0.0)
    log_beyond = log_q[-1] - math.log(slope)
    reversed_terms = np.concatenate([[log_beyond], log_increments[::-1]])
    return np.logaddexp.accumulate(reversed_terms)[::-1]


def _simpson_mass(alpha, b, h, n, log_q, log_tail):
    # masa independiente de los incrementos: (0, 2b] en forma cerrada, Simpson desde 2b
    closed = b * (math.exp(log_q[n]) + 2.0 * math.exp(log_q[2 * n])) / alpha
    body = logsumexp(_simpson_pairs(log_q[2 * n:], math.log(h / 3.0)))
    return closed + math.exp(body) + math.exp(log_tail[-1])


def _march(alpha, h, n, m, log_q, log_increments):
    """
    Avanza t q(t) = alpha * integral_{t-b}^{t} q para los nodos 2n+1..m

    La ventana suma los incrementos ya conocidos; el último, sobre
    [t_{i-1}, t_i], usa Adams-Moulton de cuarto orden, implícito en q_i.
    """
    explicit_weights = ADAMS_MOULTON[:3] * h
    implicit_weight = ADAMS_MOULTON[3] * h
    log_alpha = math.log(alpha)
    for i in range(2 * n + 1, m + 1):
        window = log_increments[i - n:i - 1]
        recent = log_q[i - 3:i]
        shift = max(window.max(), recent.max())
        partial = float(np.dot(explicit_weights, np.exp(recent - shift)))
        known = float(np.exp(window - shift).sum()) + partial
        denominator = i * h - alpha * implicit_weight
        if not (known > 0 and denominator > 0 and partial > 0):
            raise DensityGridException(check='step', value=i * h, tolerance=h)
        log_q[i] = log_alpha + shift + math.log(known) - math.log(denominator)
        log_increments[i - 1] = shift + math.log(partial + implicit_weight * math.exp(log_q[i] - shift))


def build_density_grid(alpha: float, b: float, t_max: float = None, steps_per_unit: int = None,
                       check_richardson: bool = True) -> DensityGrid:
    """
    Construye la densidad exacta de Z_alpha - Q_1 para Q = b

    Pasos: semilla q = (t/b)^{alpha-1} en (0, b]; forma cerrada en (b, 2b];
    avance por ventanas de longitud b en escala log, guardando el incremento
    integral de q en cada intervalo; colas por acumulación inversa de esos
    mismos incrementos; normalización global (la ecuación es lineal en q).

    Args:
        alpha: Parámetro alpha
        b: Valor constante de Q
        t_max: Extremo derecho de la grilla (>= 3b); por defecto DENS_TMAX_FACTOR * b
        steps_per_unit: Nodos por longitud b (par, >= 256)
        check_richardson: Verifica la deriva al duplicar la resolución

    Returns:
        DensityGrid: Grilla normalizada

    Raises:
        DensityGridException: Si la masa independiente o la deriva exceden su tolerancia
    """
    if t_max is None:
        t_max = get_density_setting('DENS_TMAX_FACTOR') * b
    if steps_per_unit is None:
        steps_per_unit = get_density_setting('DENS_STEPS_PER_UNIT')
    alpha, b, t_max, n = _check_grid_parameters(alpha, b, t_max, steps_per_unit)

    started = time.monotonic()
    h = b / n
    m = int(math.ceil(t_max / h - 1e-9))
    m += m % 2

    log_q = np.empty(m + 1)
    log_increments = np.empty(m)
    ratios = np.arange(1, n + 1) / n
    log_q[1:n + 1] = (alpha - 1.0) * np.log(ratios)
    log_q[0] = 0.0 if alpha == 1.0 else (-np.inf if alpha > 1.0 else np.inf)
    log_increments[:n] = _first_interval_increments(alpha, b, n)
    log_q[n:2 * n + 1], log_increments[n:2 * n] = _first_delay_window(alpha, b, n)
    _march(alpha, h, n, m, log_q, log_increments)

    log_tail = _unnormalized_tails(h, log_q, log_increments)
    log_mass = log_tail[0]
    kappa = math.exp(-log_mass)
    log_q = log_q - log_mass
    log_tail = log_tail - log_mass

    mass_check = _simpson_mass(alpha, b, h, n, log_q, log_tail)
    if not abs(mass_check - 1.0) <= get_density_setting('DENS_MASS_TOL'):
        logger.error(f"build_density_grid: masa de Simpson {mass_check}")
        raise DensityGridException(check='mass', value=abs(mass_check - 1.0),
                                   tolerance=get_density_setting('DENS_MASS_TOL'))

    drift = None
    if check_richardson:
        drift = richardson_drift(alpha, b, t_max, n)
        if drift > get_density_setting('DENS_RICHARDSON_TOL'):
            logger.error(f"build_density_grid: deriva de Richardson {drift:.3e} con {n} pasos por b")
            raise DensityGridException(check='richardson', value=drift,
                                       tolerance=get_density_setting('DENS_RICHARDSON_TOL'))

    grid = DensityGrid(alpha=alpha, b=b, steps_per_unit=n, h=h, log_q=log_q,
                       log_tail=log_tail, kappa=kappa, mass_check=mass_check,
                       richardson_drift=drift)
    logger.info(
        f"build_density_grid: alpha={alpha} b={b} nodos={m + 1} kappa={kappa:.12g} "
        f"en {time.monotonic() - started:.2f}s"
    )
    return grid


def richardson_drift(alpha: float, b: float, t_max: float, steps_per_unit: int) -> float:
    """
    |log q(t_max/2)| entre steps_per_unit y el doble de resolución

    t_max/2 se lleva al nodo más cercano de la grilla gruesa, que también es
    nodo de la fina; ambas grillas se construyen hasta t_max/2 + b.
    """
    h = b / steps_per_unit
    index = max(int(round(0.5 * t_max / h)), 1)
    reach = max(3.0 * b, index * h + b)
    coarse = build_density_grid(alpha, b, reach, steps_per_unit, check_richardson=False)
    fine = build_density_grid(alpha, b, reach, 2 * steps_per_unit, check_richardson=False)
    drift = abs(float(coarse.log_q[index] - fine.log_q[2 * index]))
    logger.info(f"richardson_drift: t={index * h} deriva={drift:.3e}")
    return drift


def _check_range(grid: DensityGrid, t: float, lower: float = 0.0):
    if not (lower < t <= grid.t_max + 1e-12 * grid.t_max):
        raise GridRangeException(t=t, t_min=lower, t_max=grid.t_max)


def log_density_at(grid: DensityGrid, t: float) -> float:
    """
    log q_alpha(t); forma cerrada en (0, b] e interpolación lineal después
    """
    _check_range(grid, t)
    if t <= grid.b:
        return math.log(grid.kappa) + (grid.alpha - 1.0) * math.log(t / grid.b)
    return float(np.interp(t, grid.nodes[1:], grid.log_q[1:]))


def _log_tail_at(grid: DensityGrid, x: float) -> float:
    if x <= 0:
        return 0.0
    return float(np.interp(x, grid.nodes, grid.log_tail))


def exact_log_tail_Z(grid: DensityGrid, t: float) -> float:
    """
    log P{Z_alpha > t} = log P{Z_alpha - Q_1 > t - b}

    Args:
        grid: Grilla construida
        t: Punto con t - b <= t_max

    Returns:
        float: 0 para t <= b
    """
    if t <= grid.b:
        return 0.0
    _check_range(grid, t - grid.b)
    return _log_tail_at(grid, t - grid.b)


def asymp1_ratio(grid: DensityGrid, t: float) -> float:
    """
    alpha^{-1} t q_alpha(t) / P{Z_alpha > t}, en (0, 1]
    """
    _check_range(grid, t, lower=grid.b)
    log_ratio = (
        math.log(t) - math.log(grid.alpha)
        + log_density_at(grid, t)
        - exact_log_tail_Z(grid, t)
    )
    return math.exp(log_ratio)


def recurrence_residuals(grid: DensityGrid) -> np.ndarray:
    """
    |alpha^{-1} t q(t) - (P{Z > t} - P{Z - Q_1 > t})| / P{Z > t} en los nodos interiores

    P{Z > t} = P{Z - Q_1 > t - b}, igual a 1 para t <= b.
    """
    n = grid.steps_per_unit
    idx = np.arange(1, grid.size - 1)
    t = idx * grid.h
    shifted = np.where(idx >= n, grid.log_tail[np.maximum(idx - n, 0)], 0.0)
    lhs = np.exp(np.log(t / grid.alpha) + grid.log_q[idx] - shifted)
    rhs = -np.expm1(grid.log_tail[idx] - shifted)
    return np.abs(lhs - rhs)


def grid_mean(grid: DensityGrid) -> float:
    """
    E[Z_alpha - Q_1] = integral_0^inf P{Z_alpha - Q_1 > t} dt

    (0, b] en forma cerrada; Simpson sobre la cola desde b, donde su
    singularidad (t - b)^{alpha+1} es integrable sin pérdida de orden.
    """
    n = grid.steps_per_unit
    first = grid.b - grid.kappa * grid.b ** 2 / (grid.alpha * (grid.alpha + 1.0))
    body = logsumexp(_simpson_pairs(grid.log_tail[n:], math.log(grid.h / 3.0)))
    return first + math.exp(body)


def mode_count(grid: DensityGrid) -> int:
    """
    Número de máximos locales de q en (0, t_max]

    Se ignoran diferencias menores que 1e-12 (mesetas); un descenso inicial
    cuenta como máximo en el borde.
    """
    diffs = np.diff(grid.log_q[1:])
    signs = np.sign(diffs[np.abs(diffs) >= MODE_TOLERANCE])
    if signs.size == 0:
        return 1
    count = int(np.count_nonzero((signs[:-1] > 0) & (signs[1:] < 0)))
    if signs[0] < 0:
        count += 1
    return count


def grid_rows(grid: DensityGrid):
    """
    Filas t, log_q, log_tail_Zminus, log_tail_Z, asymp1_ratio para los nodos i >= 1
    """
    n = grid.steps_per_unit
    t = grid.nodes[1:]
    log_q = grid.log_q[1:]
    log_tail = grid.log_tail[1:]
    log_tail_z = np.zeros_like(t)
    log_tail_z[n:] = grid.log_tail[1:grid.size - n]
    ratio = np.exp(np.log(t / grid.alpha) + log_q - log_tail_z)
    return {
        't': t,
        'log_q': log_q,
        'log_tail_Zminus': log_tail,
        'log_tail_Z': log_tail_z,
        'asymp1_ratio': ratio,
    }

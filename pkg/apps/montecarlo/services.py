"""
Servicios de simulación de la perpetuidad con M ~ Beta(alpha, 1)

Cada bloque de trayectorias usa su propio flujo Philox (la semilla como
clave, el bloque j saltado j veces), de modo que la muestra no depende del
número de hilos.
"""
import logging
import math
from typing import Optional

import numpy as np
from django.conf import settings
from scipy import stats

from apps.core.exceptions import SimulationException
from apps.qmodel.laws import ExpValidation
from apps.qmodel.services import abs_bound, sample_q
from apps.saddle.services import parallel_map
from .types import GammaReport, MgfEstimate, SimConfig, SimSummary

logger = logging.getLogger(__name__)


def get_sim_setting(key):
    return settings.PERPETUA_SETTINGS[key]


def block_generator(seed: int, block_index: int) -> np.random.Generator:
    """Generador del bloque block_index; función pura de (seed, block_index)."""
    return np.random.Generator(np.random.Philox(key=seed).jumped(block_index))


def sample_perpetuity(config: SimConfig, rng: np.random.Generator) -> float:
    """
    Una realización truncada de Z = Q_1 + sum_{k>=1} M_1...M_k Q_{k+1}

    El producto parcial se detiene al caer por debajo de truncation_eps;
    M se muestrea por inversión U^{1/alpha}.

    Raises:
        SimulationException: Si se supera el tope de factores
    """
    max_factors = get_sim_setting('SIM_MAX_FACTORS')
    z = sample_q(config.law, rng)
    product = 1.0
    for _ in range(max_factors):
        product *= rng.random() ** (1.0 / config.alpha)
        if product < config.truncation_eps:
            return z
        z += product * sample_q(config.law, rng)
    raise SimulationException(
        message=f'Se superó el tope de {max_factors} factores.',
        details={'max_factors': max_factors}
    )


def _simulate_block(config: SimConfig, block_index: int, size: int) -> np.ndarray:
    rng = block_generator(config.seed, block_index)
    exponent = 1.0 / config.alpha
    z = np.asarray(sample_q(config.law, rng, size), dtype=float).copy()
    product = np.ones(size)
    active = np.arange(size)
    factors = 0
    while active.size:
        factors += 1
        if factors > get_sim_setting('SIM_MAX_FACTORS'):
            raise SimulationException(
                message='Se superó el tope de factores en la simulación por bloques.',
                details={'block': block_index, 'active': int(active.size)}
            )
        candidate = product[active] * rng.random(active.size) ** exponent
        keep = candidate >= config.truncation_eps
        active = active[keep]
        product[active] = candidate[keep]
        if active.size:
            z[active] += product[active] * sample_q(config.law, rng, active.size)
    return z


def simulate(config: SimConfig) -> np.ndarray:
    """
    n_paths realizaciones de Z en orden de bloque, en paralelo hasta PERP_THREADS

    Args:
        config: Configuración de la simulación

    Returns:
        ndarray: Muestra de tamaño n_paths
    """
    block_size = get_sim_setting('SIM_BLOCK_SIZE')
    n_blocks = -(-config.n_paths // block_size)
    sizes = [min(block_size, config.n_paths - j * block_size) for j in range(n_blocks)]
    blocks = parallel_map(lambda j: _simulate_block(config, j, sizes[j]), list(range(n_blocks)))
    logger.debug(f"simulate: {config.n_paths} trayectorias en {n_blocks} bloques")
    return np.concatenate(blocks)


def truncation_bias_bound(config: SimConfig) -> float:
    """
    eps * B / (1 - E M) con E M = alpha/(alpha + 1) y B una cota de |Q|
    """
    return config.truncation_eps * abs_bound(config.law) * (config.alpha + 1.0)


def _mgf_estimate(samples: np.ndarray, s: float) -> MgfEstimate:
    if s == 0:
        return MgfEstimate(s=0.0, value=1.0, stderr=0.0, unstable=False)
    with np.errstate(over='ignore', invalid='ignore'):
        values = np.exp(s * samples)
        value = float(np.mean(values))
        stderr = float(np.std(values, ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0
    unstable = not (math.isfinite(value) and math.isfinite(stderr)) or \
        stderr / value > get_sim_setting('MGF_UNSTABLE_RATIO')
    if unstable:
        logger.warning(f"empirical_mgf: punto inestable s={s} (valor {value}, error {stderr})")
    return MgfEstimate(s=float(s), value=value, stderr=stderr, unstable=unstable)


def summarize(config: SimConfig, samples: np.ndarray) -> SimSummary:
    """
    Media, varianza, FGM empírica y cuantiles de una muestra
    """
    n = len(samples)
    mean = float(np.mean(samples))
    if n > 1:
        variance = float(np.var(samples, ddof=1))
        centered = samples - mean
        fourth = float(np.mean(centered ** 4))
        mean_stderr = math.sqrt(variance / n)
        variance_stderr = math.sqrt(max(fourth - variance ** 2, 0.0) / n)
    else:
        variance = mean_stderr = variance_stderr = 0.0

    probabilities = np.linspace(0.0, 1.0, get_sim_setting('SIM_ECDF_POINTS'))
    quantiles = np.quantile(samples, probabilities)
    return SimSummary(
        config=config,
        mean=mean,
        mean_stderr=mean_stderr,
        variance=variance,
        variance_stderr=variance_stderr,
        mgf_estimates=[_mgf_estimate(samples, s) for s in config.mgf_points],
        ecdf=[(float(p), float(q)) for p, q in zip(probabilities, quantiles)],
        truncation_bias_bound=truncation_bias_bound(config),
    )


def empirical_mgf(config: SimConfig, samples: Optional[np.ndarray] = None) -> SimSummary:
    """
    Estima E[e^{sZ}] en config.mgf_points junto con momentos y cuantiles

    Los puntos con error relativo mayor a MGF_UNSTABLE_RATIO se marcan como
    inestables en lugar de descartarse.
    """
    if samples is None:
        samples = simulate(config)
    return summarize(config, samples)


def gamma_exact_log_tail(alpha: float, c: float, t: float) -> float:
    """log P{Gamma(alpha + 1, tasa c) > t}."""
    return float(stats.gamma.logsf(t, alpha + 1.0, scale=1.0 / c))


def gamma_case_validate(alpha: float, c: float, n_paths: int, seed: int,
                        truncation_eps: Optional[float] = None,
                        samples: Optional[np.ndarray] = None) -> GammaReport:
    """
    Con Q ~ Exp(c), Z_alpha ~ Gamma(alpha + 1, c): prueba KS y puntajes z

    Args:
        alpha: Parámetro alpha
        c: Tasa de la exponencial
        n_paths: Número de trayectorias
        seed: Semilla de 64 bits
        truncation_eps: Umbral de truncamiento (por defecto SIM_TRUNCATION_EPS)
        samples: Muestra ya simulada con la misma configuración

    Returns:
        GammaReport: Estadísticos y veredicto (KS*sqrt(n) <= KS_THRESHOLD, |z| <= 4)
    """
    if truncation_eps is None:
        truncation_eps = get_sim_setting('SIM_TRUNCATION_EPS')
    config = SimConfig(alpha=alpha, law=ExpValidation(c=c), n_paths=n_paths,
                       seed=seed, truncation_eps=truncation_eps)
    if samples is None:
        samples = simulate(config)
    summary = summarize(config, samples)

    shape, scale = alpha + 1.0, 1.0 / c
    ks = stats.kstest(samples, 'gamma', args=(shape, 0.0, scale))
    mean_target = shape * scale
    variance_target = shape * scale ** 2
    mean_z = (summary.mean - mean_target) / summary.mean_stderr if summary.mean_stderr else 0.0
    variance_z = ((summary.variance - variance_target) / summary.variance_stderr
                  if summary.variance_stderr else 0.0)

    tail_points = []
    sd = math.sqrt(variance_target)
    for k in (1, 2, 3):
        t = mean_target + k * sd
        exceed = np.count_nonzero(samples > t) / len(samples)
        tail_points.append({
            't': t,
            'empirical_log_tail': math.log(exceed) if exceed > 0 else None,
            'exact_log_tail': gamma_exact_log_tail(alpha, c, t),
        })

    ks_scaled = float(ks.statistic) * math.sqrt(n_paths)
    passed = (
        ks_scaled <= get_sim_setting('KS_THRESHOLD')
        and abs(mean_z) <= 4.0
        and abs(variance_z) <= 4.0
    )
    if not passed:
        logger.warning(f"gamma_case_validate: KS*sqrt(n)={ks_scaled:.4f} z_media={mean_z:.2f} z_var={variance_z:.2f}")
    return GammaReport(
        alpha=float(alpha), c=float(c), n_paths=n_paths,
        ks_statistic=float(ks.statistic), ks_scaled=ks_scaled, ks_pvalue=float(ks.pvalue),
        mean=summary.mean, mean_target=mean_target, mean_z=mean_z,
        variance=summary.variance, variance_target=variance_target, variance_z=variance_z,
        tail_points=tail_points, passed=passed,
    )


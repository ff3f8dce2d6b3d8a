"""
Tipos del módulo de simulación de la perpetuidad
"""
from dataclasses import asdict, dataclass, field
from typing import List, Tuple

from django.core.exceptions import ValidationError

from apps.core.exceptions import InvalidParameterException
from apps.core.validators import HalfOpenUnitValidator, MinimumCountValidator, PositiveValidator
from apps.qmodel.laws import QLaw, format_law

MAX_SEED = 2 ** 64 - 1


@dataclass(frozen=True)
class SimConfig:
    """
    Configuración de una simulación de Z = Q_1 + sum_k M_1...M_k Q_{k+1}

    truncation_eps en (0, 1]: con eps = 1 la muestra es Q_1 sola.
    """
    alpha: float
    law: QLaw
    n_paths: int
    seed: int
    truncation_eps: float = 1e-12
    mgf_points: Tuple[float, ...] = ()

    def __post_init__(self):
        checks = (
            ('alpha', self.alpha, PositiveValidator()),
            ('n_paths', self.n_paths, MinimumCountValidator(1)),
            ('truncation_eps', self.truncation_eps, HalfOpenUnitValidator()),
            ('seed', self.seed, MinimumCountValidator(0)),
        )
        for name, value, validator in checks:
            try:
                validator(value)
            except ValidationError as e:
                raise InvalidParameterException(parameter=name, value=value, rule=e.messages[0])
        if self.seed > MAX_SEED:
            raise InvalidParameterException(parameter='seed', value=self.seed, rule='Se requiere una semilla de 64 bits.')
        for s in self.mgf_points:
            if not s >= 0:
                raise InvalidParameterException(parameter='mgf_points', value=s, rule='Se requiere s >= 0.')
        object.__setattr__(self, 'mgf_points', tuple(float(s) for s in self.mgf_points))

    def to_dict(self):
        return {
            'alpha': self.alpha,
            'law': format_law(self.law),
            'n_paths': self.n_paths,
            'seed': self.seed,
            'truncation_eps': self.truncation_eps,
            'mgf_points': list(self.mgf_points),
        }


@dataclass(frozen=True)
class MgfEstimate:
    s: float
    value: float
    stderr: float
    unstable: bool


@dataclass(frozen=True)
class SimSummary:
    """
    Estimaciones Monte Carlo con errores estándar

    ecdf es un resumen de cuantiles (probabilidad, valor) ordenado.
    """
    config: SimConfig
    mean: float
    mean_stderr: float
    variance: float
    variance_stderr: float
    mgf_estimates: List[MgfEstimate] = field(default_factory=list)
    ecdf: List[Tuple[float, float]] = field(default_factory=list)
    truncation_bias_bound: float = 0.0

    def to_dict(self):
        return {
            'config': self.config.to_dict(),
            'mean': self.mean,
            'mean_stderr': self.mean_stderr,
            'variance': self.variance,
            'variance_stderr': self.variance_stderr,
            'mgf_estimates': [asdict(estimate) for estimate in self.mgf_estimates],
            'ecdf': [list(point) for point in self.ecdf],
            'truncation_bias_bound': self.truncation_bias_bound,
        }


@dataclass(frozen=True)
class GammaReport:
    """
    Contraste de la muestra con Gamma(alpha + 1, tasa c) cuando Q ~ Exp(c)
    """
    alpha: float
    c: float
    n_paths: int
    ks_statistic: float
    ks_scaled: float
    ks_pvalue: float
    mean: float
    mean_target: float
    mean_z: float
    variance: float
    variance_target: float
    variance_z: float
    tail_points: List[dict] = field(default_factory=list)
    passed: bool = False

    def to_dict(self):
        return asdict(self)

"""
Tipos del módulo de asintótica de colas
"""
from dataclasses import dataclass

from apps.saddle.types import SaddlePoint


@dataclass(frozen=True)
class TailEstimate:
    """
    Densidad y cola asintóticas de Z_alpha en escala logarítmica

    log_density = exponent + log_prefactor_density
    log_tail = exponent + log_prefactor_tail
    """
    t: float
    saddle: SaddlePoint
    exponent: float
    log_prefactor_density: float
    log_prefactor_tail: float
    log_density: float
    log_tail: float

    @property
    def s(self) -> float:
        return self.saddle.s

    def to_row(self):
        return {
            't': self.t,
            's': self.s,
            'exponent': self.exponent,
            'log_density': self.log_density,
            'log_tail': self.log_tail,
        }

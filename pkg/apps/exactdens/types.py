"""
Tipos del oráculo de densidad exacta
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class DensityGrid:
    """
    Densidad q_alpha de Z_alpha - Q_1 y su cola, para Q = b, en nodos t_i = i h

    log_q[i] = log q(t_i) y log_tail[i] = log P{Z_alpha - Q_1 > t_i}, ambos
    normalizados. El nodo 0 solo guarda el límite en 0+.
    """
    alpha: float
    b: float
    steps_per_unit: int
    h: float
    log_q: np.ndarray = field(repr=False)
    log_tail: np.ndarray = field(repr=False)
    kappa: float
    mass_check: float
    richardson_drift: Optional[float] = None

    @property
    def size(self) -> int:
        return len(self.log_q)

    @property
    def t_max(self) -> float:
        return (self.size - 1) * self.h

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.size) * self.h

"""
Tipos del módulo de punto de silla
"""
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class SaddlePoint:
    """
    Solución de psi'_alpha(s) = t con diagnóstico del residuo

    Invariantes: |residual| <= rtol * t y bracket_lo < s < bracket_hi.
    """
    t: float
    s: float
    residual: float
    iterations: int
    bracket_lo: float
    bracket_hi: float

    def to_dict(self):
        return asdict(self)

"""
Tipos del módulo de expansiones
"""
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class ExpansionResult:
    """
    Valor de una expansión truncada con diagnóstico del último término

    convergent es False cuando el último término supera en magnitud al
    anterior.
    """
    t: float
    value: float
    terms_used: int
    last_term_magnitude: float
    convergent: bool = True

    def to_dict(self):
        return asdict(self)

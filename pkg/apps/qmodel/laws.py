"""
Leyes de Q bajo las hipótesis permanentes: b = ess sup Q en (0, ∞)

Especificador textual: ``pointmass:b=1``, ``twopoint:b=1,p=0.5,q0=-1``,
``gammashift:b=1,theta=1,lambda=1``, ``exp:c=1``.
"""
from dataclasses import dataclass, fields
from typing import ClassVar, Dict, Tuple, Type

import numpy as np
from django.core.exceptions import ValidationError

from apps.core.exceptions import InvalidLawException
from apps.core.validators import (
    HalfOpenUnitValidator,
    NonPositiveValidator,
    PositiveValidator,
)


@dataclass(frozen=True)
class QLaw:
    """
    Ley base de Q. Las variantes son inmutables y seguras entre hilos.
    """
    kind: ClassVar[str] = ''
    b_infinite: ClassVar[bool] = False
    # nombre del campo -> nombre en el especificador textual
    spec_keys: ClassVar[Tuple[Tuple[str, str], ...]] = ()
    validators: ClassVar[Dict[str, object]] = {}

    def __post_init__(self):
        for field in fields(self):
            value = getattr(self, field.name)
            validator = self.validators.get(field.name)
            try:
                if validator is not None:
                    validator(value)
            except ValidationError as e:
                raise InvalidLawException(
                    spec=format_law(self),
                    reason=f'{field.name}: {e.messages[0]}'
                )
            object.__setattr__(self, field.name, float(value))

    @property
    def essential_sup(self) -> float:
        return self.b

    def __str__(self):
        return format_law(self)


@dataclass(frozen=True)
class PointMass(QLaw):
    """Q ≡ b casi seguramente."""
    b: float

    kind: ClassVar[str] = 'pointmass'
    spec_keys: ClassVar[Tuple[Tuple[str, str], ...]] = (('b', 'b'),)
    validators: ClassVar[Dict[str, object]] = {'b': PositiveValidator()}


@dataclass(frozen=True)
class TwoPoint(QLaw):
    """Q = b con probabilidad p y Q = q0 <= 0 con probabilidad 1 - p."""
    b: float
    p: float
    q0: float

    kind: ClassVar[str] = 'twopoint'
    spec_keys: ClassVar[Tuple[Tuple[str, str], ...]] = (('b', 'b'), ('p', 'p'), ('q0', 'q0'))
    validators: ClassVar[Dict[str, object]] = {
        'b': PositiveValidator(),
        'p': HalfOpenUnitValidator(),
        'q0': NonPositiveValidator(),
    }


@dataclass(frozen=True)
class GammaShift(QLaw):
    """Q = b - eta con eta ~ Gamma(theta, escala lambda)."""
    b: float
    theta: float
    lam: float

    kind: ClassVar[str] = 'gammashift'
    spec_keys: ClassVar[Tuple[Tuple[str, str], ...]] = (
        ('b', 'b'), ('theta', 'theta'), ('lam', 'lambda')
    )
    validators: ClassVar[Dict[str, object]] = {
        'b': PositiveValidator(),
        'theta': PositiveValidator(),
        'lam': PositiveValidator(),
    }


@dataclass(frozen=True)
class ExpValidation(QLaw):
    """
    Q ~ Exponencial(media 1/c). Sin supremo esencial finito: solo se admite
    en montecarlo, donde Z resulta Gamma(alpha + 1, c).
    """
    c: float

    kind: ClassVar[str] = 'exp'
    b_infinite: ClassVar[bool] = True
    spec_keys: ClassVar[Tuple[Tuple[str, str], ...]] = (('c', 'c'),)
    validators: ClassVar[Dict[str, object]] = {'c': PositiveValidator()}

    @property
    def essential_sup(self) -> float:
        return float('inf')


LAW_TYPES: Dict[str, Type[QLaw]] = {
    law_type.kind: law_type
    for law_type in (PointMass, TwoPoint, GammaShift, ExpValidation)
}


def _format_number(value) -> str:
    # representación decimal más corta que reproduce el double
    try:
        return np.format_float_positional(float(value), trim='-')
    except (TypeError, ValueError):
        return str(value)


def format_law(law: QLaw) -> str:
    """
    Convierte una ley a su especificador textual canónico

    Args:
        law: Ley de Q

    Returns:
        str: Especificador, p. ej. ``twopoint:b=1,p=0.5,q0=-1``
    """
    parts = []
    for attr, key in law.spec_keys:
        value = getattr(law, attr, None)
        parts.append(f'{key}={_format_number(value) if value is not None else "?"}')
    return f'{law.kind}:{",".join(parts)}'


def parse_law(spec: str) -> QLaw:
    """
    Interpreta un especificador textual de ley

    Args:
        spec: Texto como ``gammashift:b=1,theta=1,lambda=1``

    Returns:
        QLaw: Ley validada

    Raises:
        InvalidLawException: Si el texto no describe una ley conocida
    """
    if not spec or ':' not in spec:
        raise InvalidLawException(spec=spec, reason='Formato esperado: tipo:clave=valor,...')

    kind, _, body = spec.strip().partition(':')
    law_type = LAW_TYPES.get(kind.strip().lower())
    if law_type is None:
        raise InvalidLawException(
            spec=spec,
            reason=f'Tipos conocidos: {", ".join(sorted(LAW_TYPES))}.'
        )

    key_to_attr = {key: attr for attr, key in law_type.spec_keys}
    values = {}
    for item in filter(None, (chunk.strip() for chunk in body.split(','))):
        key, sep, raw = item.partition('=')
        key = key.strip()
        if not sep or key not in key_to_attr:
            raise InvalidLawException(spec=spec, reason=f'Clave desconocida: {key}.')
        if key_to_attr[key] in values:
            raise InvalidLawException(spec=spec, reason=f'Clave repetida: {key}.')
        try:
            values[key_to_attr[key]] = float(raw)
        except ValueError:
            raise InvalidLawException(spec=spec, reason=f'Valor no numérico para {key}.')

    missing = [key for attr, key in law_type.spec_keys if attr not in values]
    if missing:
        raise InvalidLawException(spec=spec, reason=f'Faltan claves: {", ".join(missing)}.')

    return law_type(**values)

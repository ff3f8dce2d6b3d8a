"""
Utilidades base del sistema PERPETUA: argumentos de línea de comandos,
renderizado CSV/JSON y digestos de archivos
"""
import argparse
import hashlib
import json
import math
import re
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from apps.core.exceptions import InvalidLawException
from apps.qmodel.laws import QLaw, format_law, parse_law

CSV_FLOAT_FORMAT = '%.17g'
JSON_FLOAT_MARK = '@@f@@'
JSON_FLOAT_PATTERN = re.compile('"' + re.escape(JSON_FLOAT_MARK) + r'([-+.0-9eE]+)' + re.escape(JSON_FLOAT_MARK) + '"')


def law_argument(value: str) -> QLaw:
    """
    Tipo argparse para --law

    Raises:
        argparse.ArgumentTypeError: Con el motivo del rechazo
    """
    try:
        return parse_law(value)
    except InvalidLawException as e:
        raise argparse.ArgumentTypeError(str(e.message))


def positive_float(value: str) -> float:
    try:
        number = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f'"{value}" no es un número.')
    if not (math.isfinite(number) and number > 0):
        raise argparse.ArgumentTypeError(f'se requiere un real positivo, se recibió {value}.')
    return number


def unit_interval_argument(value: str) -> float:
    """Real en (0, 1]."""
    number = positive_float(value)
    if number > 1:
        raise argparse.ArgumentTypeError(f'se requiere un valor en (0, 1], se recibió {value}.')
    return number


def count_argument(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f'"{value}" no es un entero.')
    if number < 1:
        raise argparse.ArgumentTypeError(f'se requiere un entero >= 1, se recibió {value}.')
    return number


def seed_argument(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f'"{value}" no es un entero.')
    if not 0 <= number < 2 ** 64:
        raise argparse.ArgumentTypeError('la semilla debe ser un entero de 64 bits sin signo.')
    return number


def float_list_argument(value: str) -> List[float]:
    """Lista separada por comas, p. ej. ``0.5,1,2``."""
    try:
        numbers = [float(item) for item in value.split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f'lista numérica inválida: {value}.')
    if not numbers or any(not (math.isfinite(s) and s >= 0) for s in numbers):
        raise argparse.ArgumentTypeError('se requieren reales no negativos separados por comas.')
    return numbers


def parse_t_grid(spec: str) -> np.ndarray:
    """
    Interpreta una grilla ``START:STOP:POINTS[,log|,lin]``

    Args:
        spec: Texto de la grilla; el espaciado por defecto es logarítmico

    Returns:
        ndarray: Puntos de la grilla en orden creciente

    Raises:
        ValueError: Si el texto no describe una grilla válida
    """
    body, _, spacing = spec.partition(',')
    spacing = (spacing or 'log').strip().lower()
    parts = body.split(':')
    if len(parts) != 3 or spacing not in ('log', 'lin'):
        raise ValueError(f'Formato esperado START:STOP:POINTS,log; se recibió {spec}.')
    start, stop, points = float(parts[0]), float(parts[1]), int(parts[2])
    if points < 1 or not (math.isfinite(start) and math.isfinite(stop)) or stop < start:
        raise ValueError(f'Grilla inválida: {spec}.')
    if spacing == 'log':
        if start <= 0:
            raise ValueError('Una grilla logarítmica requiere START > 0.')
        return np.geomspace(start, stop, points)
    return np.linspace(start, stop, points)


def t_grid_argument(value: str) -> np.ndarray:
    try:
        return parse_t_grid(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _json_default(value: Any):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, QLaw):
        return format_law(value)
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f'Objeto no serializable: {type(value).__name__}')


def _json_prepare(value: Any) -> Any:
    # flotantes finitos a marcas '%.17g'; NaN e infinitos a null
    if isinstance(value, dict):
        return {key: _json_prepare(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_json_prepare(item) for item in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return f'{JSON_FLOAT_MARK}{CSV_FLOAT_FORMAT % value}{JSON_FLOAT_MARK}'
    return value


def render_json(document: Dict[str, Any]) -> str:
    """
    JSON con el orden de inserción de las claves

    Los flotantes usan el mismo formato que el CSV (17 cifras significativas)
    y los valores no finitos se escriben como null.
    """
    text = json.dumps(_json_prepare(document), indent=2, ensure_ascii=False, default=_json_default)
    return JSON_FLOAT_PATTERN.sub(r'\1', text) + '\n'


def render_csv(frame: pd.DataFrame) -> str:
    """CSV con encabezado y flotantes a 17 cifras significativas."""
    return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')


def json_safe(value: Any) -> Any:
    """Convierte opciones de comando a valores serializables para el manifiesto."""
    return json.loads(json.dumps(value, default=_json_default))


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as handle:
        for chunk in iter(lambda: handle.read(65536), b''):
            digest.update(chunk)
    return digest.hexdigest()


def write_text(path: Optional[Path], text: str) -> Optional[str]:
    """
    Escribe text en path (creando directorios) y retorna su digesto
    """
    if path is None:
        return None
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding='utf-8', newline='\n')
    return sha256_file(path)

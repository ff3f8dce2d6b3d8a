"""
Números de Stirling de primera especie sin signo c(n, k)
"""
from functools import lru_cache
from typing import List

from django.conf import settings

from apps.core.exceptions import InvalidParameterException


class StirlingTable:
    """
    Tabla triangular exacta de c(n, k) para 0 <= k <= n <= max_n

    c(n, k) = (n - 1) c(n - 1, k) + c(n - 1, k - 1), c(0, 0) = 1.
    Los enteros de Python son exactos, así que la tabla no pierde precisión.
    """

    def __init__(self, max_n: int):
        if max_n < 0:
            raise InvalidParameterException(parameter='max_n', value=max_n, rule='Se requiere max_n >= 0.')
        self.max_n = max_n
        rows: List[List[int]] = [[1]]
        for n in range(1, max_n + 1):
            previous = rows[-1]
            row = [0] * (n + 1)
            for k in range(1, n + 1):
                carry = previous[k] if k < n else 0
                row[k] = (n - 1) * carry + previous[k - 1]
            rows.append(row)
        self.entries = tuple(tuple(row) for row in rows)

    def get(self, n: int, k: int) -> int:
        if not (0 <= k <= n <= self.max_n):
            raise InvalidParameterException(
                parameter='(n, k)',
                value=(n, k),
                rule=f'Se requiere 0 <= k <= n <= {self.max_n}.'
            )
        return self.entries[n][k]

    def row_sum(self, n: int) -> int:
        return sum(self.entries[n])


@lru_cache(maxsize=1)
def get_stirling_table() -> StirlingTable:
    """Tabla compartida de solo lectura, construida una vez."""
    return StirlingTable(settings.PERPETUA_SETTINGS['STIRLING_MAX_N'])


def stirling_first_unsigned(n: int, k: int) -> int:
    """
    c(n, k): coeficiente de x^k en x(x + 1)...(x + n - 1)

    Args:
        n: Entero en [0, 64]
        k: Entero en [0, n]

    Returns:
        int: Valor exacto
    """
    return get_stirling_table().get(n, k)

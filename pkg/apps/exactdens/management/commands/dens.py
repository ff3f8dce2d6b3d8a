"""
Comando para construir la densidad exacta del caso Q = b
"""
import pandas as pd
from django.conf import settings

from apps.core.commands import CommandResult, PerpetuaCommand
from apps.core.utils import count_argument, positive_float, render_csv, write_text
from apps.exactdens.services import (
    build_density_grid,
    grid_mean,
    grid_rows,
    mode_count,
)


class Command(PerpetuaCommand):
    help = 'Construye q_alpha y P{Z > t} para Q = b por pasos sobre la ecuación con retardo'

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--alpha',
            type=positive_float,
            required=True,
            help='Parámetro alpha > 0'
        )
        parser.add_argument(
            '--b',
            type=positive_float,
            default=1.0,
            help='Valor constante de Q (por defecto 1)'
        )
        parser.add_argument(
            '--tmax',
            type=positive_float,
            help='Extremo de la grilla; por defecto DENS_TMAX_FACTOR * b'
        )
        parser.add_argument(
            '--steps',
            type=count_argument,
            default=settings.PERPETUA_SETTINGS['DENS_STEPS_PER_UNIT'],
            help='Nodos por longitud b (par, >= 256)'
        )
        parser.add_argument(
            '--stride',
            type=count_argument,
            help='Nodos entre filas de la salida (por defecto, una fila por longitud b)'
        )
        parser.add_argument(
            '--emit-grid',
            help='Escribe la grilla completa en este CSV'
        )
        parser.add_argument(
            '--skip-richardson',
            action='store_true',
            help='Omite la comparación de log q(tmax/2) con la grilla de resolución doble'
        )

    def run(self, **options):
        alpha, b = options['alpha'], options['b']
        grid = build_density_grid(alpha, b, options['tmax'], options['steps'],
                                  check_richardson=not options['skip_richardson'])
        columns = pd.DataFrame(grid_rows(grid))

        extra_files = {}
        if options['emit_grid']:
            extra_files[options['emit_grid']] = write_text(options['emit_grid'], render_csv(columns))

        stride = options['stride'] or grid.steps_per_unit
        sampled = columns.iloc[stride - 1::stride].reset_index(drop=True)

        summary = {
            'alpha': grid.alpha,
            'b': grid.b,
            't_max': grid.t_max,
            'steps_per_unit': grid.steps_per_unit,
            'nodes': grid.size,
            'kappa': grid.kappa,
            'mass_check': grid.mass_check,
            'mean': grid_mean(grid),
            'mode_count': mode_count(grid),
            'richardson_drift': grid.richardson_drift,
        }

        return CommandResult(
            frame=sampled,
            document={**summary, 'rows': sampled.to_dict(orient='records')},
            extra_files=extra_files,
        )

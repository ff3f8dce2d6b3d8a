"""
Comando para comparar las expansiones cerradas con su referencia exacta
"""
import pandas as pd

from apps.core.commands import CommandResult, PerpetuaCommand
from apps.expand.services import EXPANSIONS, expansion_rows
from apps.qmodel.laws import format_law

COLUMNS = ['t', 'expansion', 'solver_reference', 'abs_error']


class Command(PerpetuaCommand):
    help = 'Evalúa una expansión asintótica y su error frente al solver exacto'

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--which',
            choices=EXPANSIONS,
            required=True,
            help='salpha, k5 y ex4 aproximan s_alpha(t); k3, logdens, verv y ex4dens aproximan la log-densidad'
        )
        self.add_model_arguments(parser)
        self.add_target_arguments(parser)

    def run(self, **options):
        rows = expansion_rows(options['which'], options['alpha'], options['law'], self.targets(options))
        return CommandResult(
            frame=pd.DataFrame(rows, columns=COLUMNS),
            document={
                'which': options['which'],
                'alpha': options['alpha'],
                'law': format_law(options['law']),
                'rows': rows,
            },
        )

"""
Comando para resolver psi'_alpha(s) = t sobre uno o varios valores de t
"""
import pandas as pd

from apps.core.commands import CommandResult, PerpetuaCommand
from apps.qmodel.laws import format_law
from apps.saddle.services import solve_saddle_grid

COLUMNS = ['t', 's', 'residual', 'iterations']


class Command(PerpetuaCommand):
    help = 'Resuelve la ecuación de punto de silla y emite t, s, residual, iterations'

    def add_command_arguments(self, parser):
        self.add_model_arguments(parser)
        self.add_target_arguments(parser)

    def run(self, **options):
        points = solve_saddle_grid(options['alpha'], options['law'], self.targets(options))
        frame = pd.DataFrame([point.to_dict() for point in points], columns=COLUMNS)
        return CommandResult(
            frame=frame,
            document={
                'alpha': options['alpha'],
                'law': format_law(options['law']),
                'rows': [point.to_dict() for point in points],
            },
        )

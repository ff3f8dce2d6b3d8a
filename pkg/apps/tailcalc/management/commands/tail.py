"""
Comando para la asintótica de densidad y cola sobre una grilla de t
"""
import logging

import pandas as pd

from apps.core.commands import CommandResult, PerpetuaCommand
from apps.qmodel.laws import format_law
from apps.tailcalc.services import DICKMAN_LAW, tail_grid

logger = logging.getLogger(__name__)


class Command(PerpetuaCommand):
    help = 'Emite t, s, exponent, log_density, log_tail y opcionalmente I y de Bruijn'

    def add_command_arguments(self, parser):
        self.add_model_arguments(parser)
        self.add_target_arguments(parser)
        parser.add_argument(
            '--legendre',
            action='store_true',
            help='Agrega la columna I(t) del exponente de Legendre'
        )
        parser.add_argument(
            '--debruijn',
            action='store_true',
            help='Agrega la fórmula de de Bruijn evaluada en t - 1'
        )

    def run(self, **options):
        alpha, law = options['alpha'], options['law']
        if options['debruijn'] and not (alpha == 1.0 and law == DICKMAN_LAW):
            logger.warning(f"--debruijn solo es comparable con alpha=1 y pointmass:b=1 (recibido {law})")

        rows = tail_grid(alpha, law, self.targets(options),
                         legendre=options['legendre'], debruijn=options['debruijn'])
        return CommandResult(
            frame=pd.DataFrame(rows),
            document={'alpha': alpha, 'law': format_law(law), 'rows': rows},
        )

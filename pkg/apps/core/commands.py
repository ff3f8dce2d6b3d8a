"""
Comando base de PERPETUA: formato de salida, manifiestos y códigos de salida

Códigos: 0 éxito, 1 error de uso, 2 falla de validación.
"""
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from apps.core.exceptions import PerpetuaBaseException, handle_perpetua_exception
from apps.core.services import ManifestService
from apps.core.utils import law_argument, positive_float, render_csv, render_json, t_grid_argument

logger = logging.getLogger(__name__)

EXIT_USAGE = 1
EXIT_VALIDATION = 2

DJANGO_OPTIONS = {
    'verbosity', 'settings', 'pythonpath', 'traceback', 'no_color',
    'force_color', 'skip_checks', 'stdout', 'stderr',
}


@dataclass
class CommandResult:
    """
    Resultado de un subcomando

    frame alimenta la salida CSV; document la salida JSON (si falta, se usan
    las filas de frame).
    """
    frame: Optional[pd.DataFrame] = None
    document: Optional[Dict[str, Any]] = None
    seed: Optional[int] = None
    exit_code: int = 0
    failure_message: str = ''
    extra_files: Dict[str, str] = field(default_factory=dict)

    def to_document(self) -> Dict[str, Any]:
        if self.document is not None:
            return self.document
        return {'rows': self.frame.to_dict(orient='records') if self.frame is not None else []}


class PerpetuaCommand(BaseCommand):
    """
    Base de los subcomandos: cada subclase implementa add_command_arguments()
    y run(**options) -> CommandResult
    """
    requires_system_checks = []
    default_format = 'csv'

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)

        def usage_error(message):
            if parser.called_from_command_line:
                parser.print_usage(sys.stderr)
                sys.stderr.write(f'{parser.prog}: error: {message}\n')
                sys.exit(EXIT_USAGE)
            raise CommandError(f'Error: {message}', returncode=EXIT_USAGE)

        parser.error = usage_error
        return parser

    def add_arguments(self, parser):
        self.add_command_arguments(parser)
        parser.add_argument(
            '--format',
            choices=['csv', 'json'],
            default=self.default_format,
            help='Formato de salida'
        )
        parser.add_argument(
            '--output',
            type=Path,
            help='Archivo de salida (por defecto, salida estándar)'
        )

    def add_command_arguments(self, parser):
        pass

    def add_model_arguments(self, parser):
        parser.add_argument(
            '--alpha',
            type=positive_float,
            required=True,
            help='Parámetro alpha > 0 de M ~ Beta(alpha, 1)'
        )
        parser.add_argument(
            '--law',
            type=law_argument,
            required=True,
            help='Ley de Q, p. ej. pointmass:b=1 o gammashift:b=1,theta=1,lambda=1'
        )

    def add_target_arguments(self, parser, allow_single=True):
        targets = parser.add_mutually_exclusive_group(required=True)
        if allow_single:
            targets.add_argument(
                '--t',
                type=positive_float,
                help='Un único valor de t'
            )
        targets.add_argument(
            '--t-grid',
            type=t_grid_argument,
            help='Grilla START:STOP:POINTS[,log|,lin]'
        )

    @staticmethod
    def targets(options) -> List[float]:
        if options.get('t') is not None:
            return [options['t']]
        return [float(t) for t in options['t_grid']]

    def run(self, **options) -> CommandResult:
        raise NotImplementedError

    def render(self, result: CommandResult, fmt: str) -> str:
        if fmt == 'json':
            return render_json(result.to_document())
        if result.frame is None:
            return render_csv(pd.json_normalize(result.to_document()))
        return render_csv(result.frame)

    def handle(self, *args, **options):
        subcommand = self.__module__.rsplit('.', 1)[-1]
        started = time.monotonic()
        logger.info(f"{subcommand}: inicio")

        try:
            result = self.run(**options)
        except PerpetuaBaseException as e:
            error = handle_perpetua_exception(e, logger)
            raise CommandError(f"{error['code']}: {error['message']}", returncode=EXIT_USAGE)

        text = self.render(result, options['format'])
        output = options.get('output')
        if output is None:
            self.stdout.write(text, ending='')

        parameters = {key: value for key, value in options.items() if key not in DJANGO_OPTIONS}
        ManifestService.record(
            subcommand=subcommand,
            parameters=parameters,
            seed=result.seed,
            duration=time.monotonic() - started,
            output_path=output,
            text=text,
            extra_files=result.extra_files,
            exit_code=result.exit_code,
            version=settings.PERPETUA_SETTINGS['ARTIFACT_VERSION'],
        )
        logger.info(f"{subcommand}: fin en {time.monotonic() - started:.2f}s (código {result.exit_code})")

        if result.exit_code:
            raise CommandError(result.failure_message or 'Falla de validación.', returncode=result.exit_code)
        if output is not None and options.get('verbosity', 1) > 1:
            self.stderr.write(self.style.SUCCESS(f'Salida escrita en {output}'))

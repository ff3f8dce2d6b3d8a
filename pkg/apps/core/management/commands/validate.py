"""
Comando para ejecutar la suite de aceptación entre módulos
"""
import pandas as pd

from apps.core.commands import EXIT_VALIDATION, CommandResult, PerpetuaCommand
from apps.core.exceptions import AcceptanceFailureException
from apps.core.services import AcceptanceService

COLUMNS = ['id', 'check', 'passed', 'value', 'tolerance']


class Command(PerpetuaCommand):
    help = 'Ejecuta los criterios de aceptación del archivo de expectativas (sale con 2 si alguno falla)'

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--quick',
            action='store_true',
            help='Grillas reducidas (t <= 50, 10^4 trayectorias)'
        )
        parser.add_argument(
            '--expectations',
            help='Archivo de expectativas (por defecto ACCEPTANCE_EXPECTATIONS_FILE)'
        )
        parser.add_argument(
            '--check',
            type=int,
            action='append',
            dest='checks',
            help='Ejecuta solo el criterio con este id (repetible)'
        )

    def run(self, **options):
        service = AcceptanceService(options['expectations'], quick=options['quick'])
        results = service.run(only=options['checks'])

        failed = [f'{result.id}:{result.check}' for result in results if not result.passed]
        for result in results:
            status = self.style.SUCCESS('ok') if result.passed else self.style.ERROR('FALLA')
            self.stderr.write(f'[{status}] {result.id:>2} {result.check}')

        exit_code, failure_message = 0, ''
        if failed:
            exit_code = EXIT_VALIDATION
            failure_message = str(AcceptanceFailureException(failed=failed).message)

        return CommandResult(
            frame=pd.DataFrame([{key: result.to_dict()[key] for key in COLUMNS} for result in results],
                               columns=COLUMNS),
            document={
                'quick': options['quick'],
                'passed': not failed,
                'checks': [result.to_dict() for result in results],
            },
            exit_code=exit_code,
            failure_message=failure_message,
        )

"""
Servicios del núcleo: manifiestos de ejecución y suite de aceptación
"""
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from io import StringIO
from pathlib import Path
from typing import Any, Dict, List, Optional

from django.conf import settings
from django.core.management import call_command
from django.db import DatabaseError

from apps.core.exceptions import InvalidParameterException, PerpetuaBaseException
from apps.core.utils import json_safe, parse_t_grid, render_json, write_text

logger = logging.getLogger(__name__)

MAX_STORED_SEED = 2 ** 63 - 1
EULER_GAMMA = 0.5772156649015329


class ManifestService:
    """
    Servicio para registrar manifiestos de ejecución
    """

    @staticmethod
    def build(subcommand, parameters, seed, duration, digests, exit_code, version) -> Dict[str, Any]:
        return {
            'subcommand': subcommand,
            'parameters': json_safe(parameters),
            'artifact_version': version,
            'seed': seed,
            'duration_seconds': duration,
            'output_digests': digests,
            'exit_code': exit_code,
        }

    @staticmethod
    def record(subcommand: str, parameters: Dict[str, Any], seed: Optional[int], duration: float,
               output_path: Optional[Path], text: str, extra_files: Dict[str, str],
               exit_code: int, version: str) -> Dict[str, Any]:
        """
        Escribe la salida principal y deja un manifiesto junto a cada archivo

        Args:
            subcommand: Nombre del subcomando
            parameters: Opciones del comando
            seed: Semilla usada, si aplica
            duration: Duración en segundos
            output_path: Archivo de salida principal (None para stdout)
            text: Contenido de la salida principal
            extra_files: Archivos adicionales ya escritos, ruta -> digesto
            exit_code: Código de salida del comando
            version: Versión del artefacto

        Returns:
            dict: Manifiesto registrado
        """
        digests = {}
        if output_path is not None:
            digests[str(output_path)] = write_text(output_path, text)
        digests.update(extra_files)

        manifest = ManifestService.build(subcommand, parameters, seed, duration, digests, exit_code, version)
        for path in digests:
            Path(f'{path}.manifest.json').write_text(render_json(manifest), encoding='utf-8')

        ManifestService.persist(manifest)
        return manifest

    @staticmethod
    def persist(manifest: Dict[str, Any]):
        """
        Guarda el manifiesto en la base de datos; sin base solo advierte
        """
        from apps.core.models import RunManifest

        seed = manifest['seed']
        try:
            return RunManifest.objects.create(
                subcommand=manifest['subcommand'],
                parameters=manifest['parameters'],
                artifact_version=manifest['artifact_version'],
                seed=seed if seed is not None and seed <= MAX_STORED_SEED else None,
                duration_seconds=manifest['duration_seconds'],
                output_digests=manifest['output_digests'],
                exit_code=manifest['exit_code'],
            )
        except DatabaseError as e:
            logger.warning(f"No se pudo guardar el manifiesto de {manifest['subcommand']}: {str(e)}")
            return None


@dataclass
class CheckResult:
    """Resultado de un criterio de aceptación."""
    id: int
    check: str
    passed: bool
    value: Optional[float]
    tolerance: Optional[float]
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _strictly_increasing(values):
    return all(a < b for a, b in zip(values, values[1:]))


def _non_increasing(values):
    return all(b <= a for a, b in zip(values, values[1:]))


class AcceptanceService:
    """
    Ejecuta los criterios de aceptación definidos en el archivo de expectativas

    Cada entrada tiene id, check, parameters, tolerances y quick (parámetros
    y tolerancias que reemplazan a los completos en modo rápido).
    """

    def __init__(self, expectations_path=None, quick: bool = False):
        self.expectations_path = Path(expectations_path or settings.ACCEPTANCE_EXPECTATIONS_FILE)
        self.quick = quick
        self._grids = {}

    def load_expectations(self) -> List[Dict[str, Any]]:
        try:
            with open(self.expectations_path, encoding='utf-8') as handle:
                entries = json.load(handle)
        except (OSError, ValueError) as e:
            raise InvalidParameterException(
                parameter='expectations', value=str(self.expectations_path), rule=str(e)
            )
        for entry in entries:
            if entry.get('check') not in self.CHECKS:
                raise InvalidParameterException(
                    parameter='check', value=entry.get('check'), rule='Criterio desconocido.'
                )
        return entries

    def resolve(self, entry: Dict[str, Any]):
        parameters = dict(entry.get('parameters', {}))
        tolerances = dict(entry.get('tolerances', {}))
        if self.quick:
            quick = entry.get('quick', {})
            parameters.update(quick.get('parameters', {}))
            tolerances.update(quick.get('tolerances', {}))
        return parameters, tolerances

    def run(self, only: Optional[List[int]] = None) -> List[CheckResult]:
        """
        Ejecuta los criterios (todos o los ids en only) en el orden del archivo
        """
        results = []
        for entry in self.load_expectations():
            if only and entry['id'] not in only:
                continue
            parameters, tolerances = self.resolve(entry)
            started = time.monotonic()
            method = getattr(self, self.CHECKS[entry['check']])
            try:
                result = method(entry['id'], entry['check'], parameters, tolerances)
            except PerpetuaBaseException as e:
                logger.error(f"Criterio {entry['id']} ({entry['check']}): {str(e)}")
                result = CheckResult(entry['id'], entry['check'], False, None, None,
                                     {'error': str(e), 'code': e.code})
            logger.info(f"Criterio {result.id} ({result.check}) en {time.monotonic() - started:.2f}s")
            if not result.passed:
                logger.warning(f"Criterio {result.id} ({result.check}) no superado: {result.detail}")
            results.append(result)
        return results

    # -- criterios -----------------------------------------------------

    def check_saddle(self, check_id, name, parameters, tolerances):
        from apps.qmodel.laws import parse_law
        from apps.saddle.services import psi_prime, solve_saddle_grid

        ts = parse_t_grid(parameters['t_grid'])
        alpha = parameters['alpha']
        worst = 0.0
        for spec in parameters['laws']:
            law = parse_law(spec)
            for point in solve_saddle_grid(alpha, law, ts):
                worst = max(worst, abs(psi_prime(alpha, law, point.s) - point.t) / point.t)
        tolerance = tolerances['relative_residual']
        return CheckResult(check_id, name, worst <= tolerance, worst, tolerance,
                           {'laws': parameters['laws'], 'points': len(ts)})

    def check_expansion(self, check_id, name, parameters, tolerances):
        from apps.expand.services import salpha_expansion_k5, salpha_series
        from apps.qmodel.laws import TwoPoint
        from apps.saddle.services import solve_saddle

        alpha, b, p = parameters['alpha'], parameters['b'], parameters['p']
        law = TwoPoint(b=b, p=p, q0=0.0)
        errors = [
            abs(salpha_series(alpha, b, p, t, parameters['n_terms']).value - solve_saddle(alpha, law, t).s)
            for t in parameters['ts']
        ]
        t_match = parameters['k5_match_t']
        mismatch = abs(salpha_expansion_k5(alpha, b, p, t_match) - salpha_series(alpha, b, p, t_match, 4).value)
        tolerance = tolerances['k5_match']
        # ts crecientes: errores no crecientes
        passed = _non_increasing(errors) and mismatch <= tolerance
        return CheckResult(check_id, name, passed, mismatch, tolerance,
                           {'ts': parameters['ts'], 'series_errors': errors})

    def density_grid(self, parameters):
        from apps.exactdens.services import build_density_grid

        key = (parameters['alpha'], parameters['b'], parameters['t_max'], parameters['steps_per_unit'])
        if key not in self._grids:
            # la deriva de Richardson se mide aparte con la tolerancia de cada criterio
            self._grids[key] = build_density_grid(*key, check_richardson=False)
        return self._grids[key]

    def check_dickman(self, check_id, name, parameters, tolerances):
        from apps.exactdens.services import grid_mean, richardson_drift

        grid = self.density_grid(parameters)
        kappa_error = abs(grid.kappa - math.exp(-EULER_GAMMA))
        mass_error = abs(grid.mass_check - 1.0)
        mean_error = abs(grid_mean(grid) - parameters['alpha'] * parameters['b'])
        drift = richardson_drift(parameters['alpha'], parameters['b'], parameters['t_max'],
                                 parameters['steps_per_unit'])
        passed = (
            kappa_error <= tolerances['kappa']
            and mass_error <= tolerances['mass']
            and mean_error <= tolerances['mean']
            and drift <= tolerances['richardson']
        )
        return CheckResult(check_id, name, passed, kappa_error, tolerances['kappa'], {
            'kappa': grid.kappa,
            'mass_error': mass_error,
            'mean_error': mean_error,
            'richardson_drift': drift,
        })

    def check_asymp1(self, check_id, name, parameters, tolerances):
        from apps.exactdens.services import asymp1_ratio

        grid = self.density_grid(parameters)
        ratios = [asymp1_ratio(grid, t) for t in parameters['ts']]
        gap = 1.0 - ratios[-1]
        tolerance = tolerances['final_gap']
        passed = _strictly_increasing(ratios) and all(0 < r <= 1 for r in ratios) and gap <= tolerance
        return CheckResult(check_id, name, passed, gap, tolerance, {'ts': parameters['ts'], 'ratios': ratios})

    def check_tail_vs_exact(self, check_id, name, parameters, tolerances):
        from apps.exactdens.services import exact_log_tail_Z
        from apps.qmodel.laws import PointMass
        from apps.tailcalc.services import tail_estimate

        grid = self.density_grid(parameters)
        law = PointMass(b=parameters['b'])
        deviations = []
        for t in parameters['ts']:
            exact = exact_log_tail_Z(grid, t)
            deviations.append(abs(exact - tail_estimate(parameters['alpha'], law, t).log_tail) / abs(exact))
        tolerance = tolerances['final_relative']
        passed = _non_increasing(deviations) and deviations[-1] <= tolerance
        return CheckResult(check_id, name, passed, deviations[-1], tolerance,
                           {'ts': parameters['ts'], 'relative_deviations': deviations})

    def check_debruijn(self, check_id, name, parameters, tolerances):
        from apps.tailcalc.services import DICKMAN_LAW, debruijn_log_density, tail_estimate

        deviations = []
        for t in parameters['ts']:
            log_density = tail_estimate(1.0, DICKMAN_LAW, t).log_density
            deviations.append(abs(debruijn_log_density(t - 1.0) - log_density) / abs(log_density))
        tolerance = tolerances['final_relative']
        passed = _non_increasing(deviations) and deviations[-1] <= tolerance
        return CheckResult(check_id, name, passed, deviations[-1], tolerance,
                           {'ts': parameters['ts'], 'relative_deviations': deviations})

    def check_mgf(self, check_id, name, parameters, tolerances):
        from apps.montecarlo.services import empirical_mgf
        from apps.montecarlo.types import SimConfig
        from apps.qmodel.laws import parse_law
        from apps.tailcalc.services import phi

        cases = []
        worst = 0.0
        for case in parameters['cases']:
            law = parse_law(case['law'])
            config = SimConfig(alpha=case['alpha'], law=law, n_paths=parameters['paths'],
                               seed=parameters['seed'], mgf_points=(case['s'],))
            estimate = empirical_mgf(config).mgf_estimates[0]
            target = math.exp(phi(case['alpha'], law, case['s']))
            score = abs(estimate.value - target) / estimate.stderr if estimate.stderr else math.inf
            worst = max(worst, score)
            cases.append({**case, 'estimate': estimate.value, 'stderr': estimate.stderr,
                          'target': target, 'unstable': estimate.unstable})
        tolerance = tolerances['stderr_multiple']
        return CheckResult(check_id, name, worst <= tolerance, worst, tolerance, {'cases': cases})

    def check_gamma(self, check_id, name, parameters, tolerances):
        from apps.montecarlo.services import gamma_case_validate

        report = gamma_case_validate(parameters['alpha'], parameters['c'], parameters['paths'], parameters['seed'])
        passed = (
            report.ks_scaled <= tolerances['ks_scaled']
            and abs(report.mean_z) <= tolerances['z_score']
            and abs(report.variance_z) <= tolerances['z_score']
        )
        return CheckResult(check_id, name, passed, report.ks_scaled, tolerances['ks_scaled'], {
            'mean_z': report.mean_z,
            'variance_z': report.variance_z,
            'ks_pvalue': report.ks_pvalue,
        })

    def check_limits(self, check_id, name, parameters, tolerances):
        from apps.qmodel.laws import parse_law
        from apps.qmodel.services import log_mgf, mgf_ratio
        from apps.tailcalc.services import phi

        alpha = parameters['alpha']
        rows = []
        passed = True
        worst = 0.0
        for spec in parameters['laws']:
            law = parse_law(spec)
            b = law.essential_sup
            cumulant = [abs(phi(alpha, law, s, 2) * s / (alpha * b * math.exp(log_mgf(law, s))) - 1.0)
                     for s in parameters['s_values']]
            ratio = [abs(mgf_ratio(law, s, 1) / b - 1.0) for s in parameters['s_values']]
            passed = passed and _non_increasing(cumulant) and _non_increasing(ratio)
            worst = max(worst, cumulant[-1], ratio[-1])
            rows.append({'law': spec, 'cumulant_deviations': cumulant, 'mgf_ratio_deviations': ratio})
        tolerance = tolerances['final_deviation']
        return CheckResult(check_id, name, passed and worst <= tolerance, worst, tolerance, {'laws': rows})

    def check_legendre(self, check_id, name, parameters, tolerances):
        from apps.qmodel.laws import PointMass
        from apps.tailcalc.services import legendre_exponent, tail_estimate

        law = PointMass(b=parameters['b'])
        deviations = []
        for t in parameters['ts']:
            rate = legendre_exponent(parameters['alpha'], law, t)
            deviations.append(abs(-tail_estimate(parameters['alpha'], law, t).log_tail - rate) / rate)
        tolerance = tolerances['final_relative']
        passed = _non_increasing(deviations) and deviations[-1] <= tolerance
        return CheckResult(check_id, name, passed, deviations[-1], tolerance,
                           {'ts': parameters['ts'], 'relative_deviations': deviations})

    def check_determinism(self, check_id, name, parameters, tolerances):
        arguments = [
            '--alpha', str(parameters['alpha']),
            '--law', parameters['law'],
            '--paths', str(parameters['paths']),
            '--seed', str(parameters['seed']),
            '--mgf-points', ','.join(str(s) for s in parameters['mgf_points']),
            '--format', 'json',
        ]
        outputs = []
        for _ in range(2):
            buffer = StringIO()
            call_command('sim', *arguments, stdout=buffer)
            outputs.append(buffer.getvalue())
        identical = outputs[0] == outputs[1]
        return CheckResult(check_id, name, identical, None, None, {'bytes': len(outputs[0])})

    CHECKS = {
        'saddle_correctness': 'check_saddle',
        'expansion_conformance': 'check_expansion',
        'dickman_ground_truth': 'check_dickman',
        'asymp1_convergence': 'check_asymp1',
        'tail_vs_exact': 'check_tail_vs_exact',
        'debruijn_consistency': 'check_debruijn',
        'mgf_simulation': 'check_mgf',
        'gamma_case': 'check_gamma',
        'asymptotic_limits': 'check_limits',
        'legendre_equivalence': 'check_legendre',
        'determinism': 'check_determinism',
    }

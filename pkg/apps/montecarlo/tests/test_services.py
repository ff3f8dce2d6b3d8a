"""
Tests para la simulación de la perpetuidad.
"""
import math

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase, override_settings

from apps.core.exceptions import InvalidParameterException
from apps.montecarlo.services import (
    block_generator,
    empirical_mgf,
    gamma_case_validate,
    sample_perpetuity,
    simulate,
    summarize,
    truncation_bias_bound,
)
from apps.montecarlo.types import SimConfig
from apps.qmodel.laws import ExpValidation, GammaShift, PointMass, TwoPoint
from apps.qmodel.services import moments
from apps.tailcalc.services import phi

DICKMAN = PointMass(b=1.0)
SMALL_BLOCKS = {**settings.PERPETUA_SETTINGS, 'SIM_BLOCK_SIZE': 1000}


class SimConfigTest(SimpleTestCase):
    """Tests para la validación de SimConfig."""

    def test_rejects_invalid_values(self):
        """Test rechazo de parámetros fuera de rango."""
        bad = [
            {'alpha': 0.0},
            {'n_paths': 0},
            {'n_paths': 2.5},
            {'truncation_eps': 0.0},
            {'truncation_eps': 1.5},
            {'seed': -1},
            {'seed': 2 ** 64},
            {'mgf_points': (1.0, -0.5)},
        ]
        for override in bad:
            kwargs = {'alpha': 1.0, 'law': DICKMAN, 'n_paths': 10, 'seed': 1, **override}
            with self.assertRaises(InvalidParameterException, msg=str(override)):
                SimConfig(**kwargs)

    def test_to_dict(self):
        """Test serialización con la ley como texto."""
        config = SimConfig(alpha=1.0, law=DICKMAN, n_paths=10, seed=1, mgf_points=(1, 2))
        self.assertEqual(config.to_dict()['law'], 'pointmass:b=1')
        self.assertEqual(config.mgf_points, (1.0, 2.0))


class SimulateTest(SimpleTestCase):
    """Tests para simulate."""

    def test_deterministic(self):
        """Test misma semilla, misma muestra."""
        config = SimConfig(alpha=1.0, law=TwoPoint(b=1, p=0.5, q0=-1), n_paths=3000, seed=42)
        np.testing.assert_array_equal(simulate(config), simulate(config))

    def test_seed_changes_sample(self):
        """Test semillas distintas dan muestras distintas."""
        first = simulate(SimConfig(alpha=1.0, law=DICKMAN, n_paths=100, seed=1))
        second = simulate(SimConfig(alpha=1.0, law=DICKMAN, n_paths=100, seed=2))
        self.assertFalse(np.array_equal(first, second))

    @override_settings(PERPETUA_SETTINGS=SMALL_BLOCKS)
    def test_independent_of_threads(self):
        """Test la muestra no depende de PERP_THREADS."""
        config = SimConfig(alpha=2.0, law=DICKMAN, n_paths=4500, seed=7)
        with self.settings(PERP_THREADS=1):
            serial = simulate(config)
        with self.settings(PERP_THREADS=4):
            parallel = simulate(config)
        self.assertEqual(len(serial), 4500)
        np.testing.assert_array_equal(serial, parallel)

    def test_block_generators(self):
        """Test flujos por bloque reproducibles y distintos entre bloques."""
        self.assertEqual(block_generator(5, 0).random(), block_generator(5, 0).random())
        self.assertNotEqual(block_generator(5, 0).random(), block_generator(5, 1).random())

    def test_unit_epsilon_keeps_first_term(self):
        """Test eps = 1 devuelve solo Q_1."""
        config = SimConfig(alpha=1.0, law=PointMass(b=2.0), n_paths=500, seed=3, truncation_eps=1.0)
        self.assertTrue(np.all(simulate(config) == 2.0))
        self.assertEqual(sample_perpetuity(config, np.random.default_rng(0)), 2.0)

    def test_scalar_path(self):
        """Test trayectoria escalar por encima de Q_1."""
        config = SimConfig(alpha=1.0, law=DICKMAN, n_paths=1, seed=3)
        self.assertGreater(sample_perpetuity(config, np.random.default_rng(0)), 1.0)

    def test_mean(self):
        """Test E Z = (alpha + 1) E Q dentro de 4 errores estándar."""
        config = SimConfig(alpha=1.0, law=DICKMAN, n_paths=20000, seed=11)
        summary = summarize(config, simulate(config))
        self.assertLessEqual(abs(summary.mean - 2.0), 4 * summary.mean_stderr)
        self.assertGreater(summary.variance, 0.0)


class MomentIdentityTest(SimpleTestCase):
    """Tests para E Z = (1 + alpha) E Q y Var Z = Var Q + alpha E Q^2 / 2."""

    LAWS = [
        PointMass(b=2.0),
        TwoPoint(b=1.0, p=0.5, q0=-1.0),
        TwoPoint(b=2.0, p=0.3, q0=0.0),
        GammaShift(b=1.0, theta=1.0, lam=1.0),
    ]

    def test_mean_and_variance(self):
        """Test ambas identidades dentro de 4 errores estándar para cada ley con b finito."""
        for index, law in enumerate(self.LAWS):
            for alpha in (0.5, 2.0):
                config = SimConfig(alpha=alpha, law=law, n_paths=40000, seed=20241000 + index)
                summary = summarize(config, simulate(config))
                mean_q, second_q, _ = moments(law)
                mean_target = (1.0 + alpha) * mean_q
                variance_target = second_q - mean_q ** 2 + alpha * second_q / 2.0
                self.assertLessEqual(abs(summary.mean - mean_target), 4 * summary.mean_stderr,
                                     msg=f'{law} alpha={alpha}')
                self.assertLessEqual(abs(summary.variance - variance_target), 4 * summary.variance_stderr,
                                     msg=f'{law} alpha={alpha}')


class SummaryTest(SimpleTestCase):
    """Tests para summarize y empirical_mgf."""

    def test_mgf_at_zero(self):
        """Test FGM empírica igual a 1 en s = 0."""
        config = SimConfig(alpha=1.0, law=DICKMAN, n_paths=200, seed=5, mgf_points=(0.0,))
        estimate = empirical_mgf(config).mgf_estimates[0]
        self.assertEqual(estimate.value, 1.0)
        self.assertEqual(estimate.stderr, 0.0)
        self.assertFalse(estimate.unstable)

    def test_mgf_matches_cumulant(self):
        """Test FGM empírica frente a exp(phi_alpha)."""
        config = SimConfig(alpha=1.0, law=DICKMAN, n_paths=20000, seed=20240601, mgf_points=(0.5, 1.0))
        summary = empirical_mgf(config)
        for estimate in summary.mgf_estimates:
            exact = math.exp(phi(1.0, DICKMAN, estimate.s))
            self.assertLessEqual(abs(estimate.value - exact), 4 * estimate.stderr)

    def test_quantile_summary(self):
        """Test resumen de cuantiles ordenado."""
        config = SimConfig(alpha=1.0, law=DICKMAN, n_paths=500, seed=9)
        summary = empirical_mgf(config)
        self.assertEqual(len(summary.ecdf), settings.PERPETUA_SETTINGS['SIM_ECDF_POINTS'])
        values = [value for _, value in summary.ecdf]
        self.assertEqual(values, sorted(values))
        self.assertEqual(summary.ecdf[0][0], 0.0)
        self.assertGreaterEqual(values[0], 1.0)

    def test_truncation_bound(self):
        """Test cota eps B/(1 - E M)."""
        config = SimConfig(alpha=1.0, law=PointMass(b=2.0), n_paths=1, seed=0, truncation_eps=1e-6)
        self.assertAlmostEqual(truncation_bias_bound(config), 4e-6, places=18)

    def test_to_dict(self):
        """Test serialización del resumen."""
        config = SimConfig(alpha=1.0, law=DICKMAN, n_paths=50, seed=1, mgf_points=(1.0,))
        document = empirical_mgf(config).to_dict()
        self.assertEqual(set(document), {'config', 'mean', 'mean_stderr', 'variance', 'variance_stderr',
                                         'mgf_estimates', 'ecdf', 'truncation_bias_bound'})
        self.assertEqual(document['mgf_estimates'][0]['s'], 1.0)


class GammaCaseTest(SimpleTestCase):
    """Tests para gamma_case_validate."""

    def test_exponential_law_gives_gamma(self):
        """Test Z ~ Gamma(alpha + 1, c) con Q ~ Exp(c)."""
        report = gamma_case_validate(1.0, 1.0, 20000, 20240602)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.mean_target, 2.0)
        self.assertAlmostEqual(report.variance_target, 2.0)
        self.assertEqual(len(report.tail_points), 3)

    def test_reuses_samples(self):
        """Test muestra ya simulada."""
        config = SimConfig(alpha=2.0, law=ExpValidation(c=2.0), n_paths=5000, seed=8)
        samples = simulate(config)
        report = gamma_case_validate(2.0, 2.0, 5000, 8, samples=samples)
        self.assertEqual(report.mean, float(np.mean(samples)))
        self.assertAlmostEqual(report.mean_target, 1.5)

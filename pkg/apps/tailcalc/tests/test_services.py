"""
Tests para phi_alpha, la estimación de colas y los exponentes de referencia.
"""
import math

from django.test import SimpleTestCase

from apps.core.exceptions import (
    InvalidParameterException,
    SaddleRangeException,
    UnsupportedLawException,
)
from apps.qmodel.laws import ExpValidation, GammaShift, PointMass, TwoPoint
from apps.qmodel.services import log_mgf
from apps.saddle.services import psi, solve_saddle
from apps.tailcalc.services import (
    DICKMAN_LAW,
    debruijn_log_density,
    legendre_exponent,
    phi,
    tail_estimate,
    tail_grid,
)

GAMMA = GammaShift(b=1.0, theta=1.0, lam=1.0)
SYMMETRIC = TwoPoint(b=1.0, p=0.5, q0=-1.0)

# rho(10) de la función de Dickman; la densidad de Z_1 es e^{-gamma} rho
RHO_10 = 2.77017183772596e-11
EULER_GAMMA = 0.5772156649015329


class PhiTest(SimpleTestCase):
    """Tests para phi y sus derivadas."""

    def test_zero(self):
        """Test phi(0) = 0."""
        self.assertEqual(phi(1.0, DICKMAN_LAW, 0.0), 0.0)

    def test_first_derivative_value(self):
        """Test phi'(1) = b + psi'(1) para masa puntual."""
        self.assertAlmostEqual(phi(1.0, DICKMAN_LAW, 1.0, 1), math.e, places=12)

    def test_derivatives_match_differences(self):
        """Test phi^(k) contra diferencias de phi^(k-1)."""
        h = 1e-5
        for law in (DICKMAN_LAW, GAMMA, SYMMETRIC):
            for s in (0.5, 3.0):
                for k in (1, 2, 3):
                    approx = (phi(1.0, law, s + h, k - 1) - phi(1.0, law, s - h, k - 1)) / (2 * h)
                    exact = phi(1.0, law, s, k)
                    self.assertAlmostEqual(approx, exact, delta=1e-5 * max(1.0, abs(exact)),
                                           msg=f'{law} s={s} k={k}')

    def test_rejects_order(self):
        """Test rechazo de k > 3."""
        with self.assertRaises(InvalidParameterException):
            phi(1.0, DICKMAN_LAW, 1.0, 4)

    def test_rejects_exp(self):
        """Test rechazo de la ley exponencial."""
        with self.assertRaises(UnsupportedLawException):
            phi(1.0, ExpValidation(c=1.0), 0.5)

    def test_second_derivative_limit(self):
        """Test phi''(s) s/(alpha b g(s)) se acerca a 1."""
        for law in (DICKMAN_LAW, GAMMA):
            b = law.essential_sup
            deviations = [
                abs(phi(1.0, law, s, 2) * s / (b * math.exp(log_mgf(law, s))) - 1.0)
                for s in (10.0, 50.0, 200.0)
            ]
            self.assertTrue(all(y < x for x, y in zip(deviations, deviations[1:])), msg=str(law))
            self.assertLess(deviations[-1], 0.02)

    def test_derivative_ratio_limits(self):
        """Test phi^(k)(s) s/(alpha b^{k-1} g(s)) se acerca a 1 para k = 1, 2, 3."""
        for law in (DICKMAN_LAW, PointMass(b=2.0), SYMMETRIC, GAMMA):
            b = law.essential_sup
            for alpha in (0.5, 2.0):
                for k in (1, 2, 3):
                    deviations = [
                        abs(phi(alpha, law, s, k) * s / (alpha * b ** (k - 1)) * math.exp(-log_mgf(law, s)) - 1.0)
                        for s in (10.0, 50.0, 200.0)
                    ]
                    label = f'{law} alpha={alpha} k={k}'
                    self.assertTrue(all(y < x for x, y in zip(deviations, deviations[1:])), msg=label)
                    self.assertLess(deviations[-1], 0.05, msg=label)


class TailEstimateTest(SimpleTestCase):
    """Tests para tail_estimate."""

    def test_density_tail_relation(self):
        """Test log densidad - log cola = log s."""
        for law in (DICKMAN_LAW, GAMMA, SYMMETRIC):
            for t in (10.0, 1e3, 1e6):
                estimate = tail_estimate(1.5, law, t)
                self.assertAlmostEqual(estimate.log_density - estimate.log_tail, math.log(estimate.s),
                                       delta=1e-12)

    def test_dickman_at_hundred(self):
        """Test fórmula explícita en t = 100."""
        estimate = tail_estimate(1.0, DICKMAN_LAW, 100.0)
        s = solve_saddle(1.0, DICKMAN_LAW, 100.0).s
        exponent = -100.0 * s + psi(1.0, DICKMAN_LAW, s)
        self.assertAlmostEqual(estimate.exponent, exponent, delta=1e-9)
        self.assertAlmostEqual(estimate.log_tail, exponent + 0.5 * math.log(100.0 / (2 * math.pi)),
                               delta=1e-9)
        self.assertEqual(estimate.s, estimate.saddle.s)

    def test_exponent_scale(self):
        """Test exponente/(t log t) se acerca a -1/b."""
        for law in (DICKMAN_LAW, PointMass(b=2.0)):
            b = law.essential_sup
            deviations = [
                abs(tail_estimate(1.0, law, t).exponent / (t * math.log(t)) + 1.0 / b)
                for t in (1e3, 1e6, 1e9, 1e12)
            ]
            self.assertTrue(all(y < x for x, y in zip(deviations, deviations[1:])), msg=str(law))

    def test_tail_is_decreasing(self):
        """Test log cola decreciente en t."""
        tails = [tail_estimate(1.0, GAMMA, t).log_tail for t in (10.0, 100.0, 1e3, 1e4)]
        self.assertTrue(all(y < x for x, y in zip(tails, tails[1:])))

    def test_below_range_propagates(self):
        """Test error de rango del punto de silla."""
        with self.assertRaises(SaddleRangeException):
            tail_estimate(1.0, DICKMAN_LAW, 0.5)


class LegendreTest(SimpleTestCase):
    """Tests para legendre_exponent."""

    def test_at_unit_saddle(self):
        """Test I(phi'(1)) = phi'(1) - phi(1)."""
        t = phi(1.0, DICKMAN_LAW, 1.0, 1)
        self.assertAlmostEqual(
            legendre_exponent(1.0, DICKMAN_LAW, t), t - phi(1.0, DICKMAN_LAW, 1.0), delta=1e-8
        )

    def test_bounded_by_saddle_exponent(self):
        """Test I(t) <= -exponente para E Q >= 0 y cociente cercano a 1."""
        for law in (DICKMAN_LAW, GAMMA):
            ratios = []
            for t in (1e3, 1e4, 1e6):
                rate = legendre_exponent(1.0, law, t)
                bound = -tail_estimate(1.0, law, t).exponent
                self.assertLessEqual(rate, bound * (1 + 1e-12))
                ratios.append(abs(rate / bound - 1.0))
            self.assertTrue(all(y < x for x, y in zip(ratios, ratios[1:])), msg=str(law))
            self.assertLess(ratios[-1], 0.01)

    def test_subcritical(self):
        """Test t <= (1 + alpha) E Q."""
        with self.assertRaises(SaddleRangeException):
            legendre_exponent(1.0, DICKMAN_LAW, 2.0)


class DeBruijnTest(SimpleTestCase):
    """Tests para debruijn_log_density."""

    def test_identity(self):
        """Test forma cerrada con s = s_1(t)."""
        s = solve_saddle(1.0, DICKMAN_LAW, 50.0).s
        expected = -0.5 * math.log(2 * math.pi * 50.0) - (math.expm1(s) - psi(1.0, DICKMAN_LAW, s))
        self.assertAlmostEqual(debruijn_log_density(50.0), expected, delta=1e-12)

    def test_close_to_dickman_function(self):
        """Test cercanía con log(e^{-gamma} rho(10))."""
        self.assertAlmostEqual(debruijn_log_density(10.0), math.log(RHO_10) - EULER_GAMMA, delta=0.3)

    def test_rejects_small_t(self):
        """Test precondición t > e."""
        with self.assertRaises(InvalidParameterException):
            debruijn_log_density(2.0)


class TailGridTest(SimpleTestCase):
    """Tests para tail_grid."""

    def test_columns_and_order(self):
        """Test columnas opcionales y orden de la grilla."""
        ts = [100.0, 10.0, 50.0]
        rows = tail_grid(1.0, DICKMAN_LAW, ts, legendre=True, debruijn=True)
        self.assertEqual([row['t'] for row in rows], ts)
        self.assertEqual(set(rows[0]), {'t', 's', 'exponent', 'log_density', 'log_tail', 'I', 'debruijn'})
        self.assertAlmostEqual(rows[2]['debruijn'], debruijn_log_density(49.0), delta=1e-12)

    def test_debruijn_unavailable_is_nan(self):
        """Test NaN cuando t - 1 <= e."""
        rows = tail_grid(1.0, DICKMAN_LAW, [3.0], debruijn=True)
        self.assertTrue(math.isnan(rows[0]['debruijn']))

    def test_subcritical_legendre_is_nan(self):
        """Test I = NaN por debajo de (1 + alpha) E Q sin abortar la grilla."""
        rows = tail_grid(1.0, DICKMAN_LAW, [2.0, 10.0], legendre=True)
        self.assertTrue(math.isnan(rows[0]['I']))
        self.assertTrue(math.isfinite(rows[0]['log_tail']))
        self.assertAlmostEqual(rows[1]['I'], legendre_exponent(1.0, DICKMAN_LAW, 10.0), delta=1e-12)

    def test_finite_up_to_huge_t(self):
        """Test salidas finitas hasta t = 1e100 para cada ley con b finito."""
        laws = [DICKMAN_LAW, PointMass(b=0.5), SYMMETRIC, TwoPoint(b=2.0, p=0.3, q0=0.0), GAMMA,
                GammaShift(b=2.0, theta=0.5, lam=3.0)]
        for law in laws:
            for row in tail_grid(1.0, law, [1e20, 1e50, 1e100], legendre=True):
                for key, value in row.items():
                    self.assertTrue(math.isfinite(value), msg=f'{law} t={row["t"]} {key}')
                self.assertLess(row['log_tail'], 0.0)

    def test_plain_columns(self):
        """Test columnas básicas sin opciones."""
        rows = tail_grid(2.0, GAMMA, [20.0])
        self.assertEqual(set(rows[0]), {'t', 's', 'exponent', 'log_density', 'log_tail'})

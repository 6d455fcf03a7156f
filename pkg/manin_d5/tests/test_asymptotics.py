import math

import numpy as np
from django.test import SimpleTestCase
from scipy import integrate

from manin_d5 import arith, asymptotics, dirichlet
from manin_d5.tools import EnvelopeError, FitError
from . import test_settings  # noqa


class DensityTest(SimpleTestCase):

    def test_f__examples(self):
        self.assertEqual(1.0, asymptotics.f(1, 1))
        self.assertAlmostEqual(0.9 ** -3 - math.sqrt(1.1 ** 3 - 1), asymptotics.f(1.1, 0.9), places=12)
        self.assertAlmostEqual(0.7963, asymptotics.f(1.1, 0.9), places=3)
        self.assertEqual(0.0, asymptotics.f(-1, 0.5))

    def test_f_array__matches_scalar(self):
        for u in np.linspace(-1, 6, 57):
            for v in (0.0, 0.2, 0.5, 0.8, 0.9, 1.0):
                self.assertAlmostEqual(asymptotics.f(u, v), float(asymptotics.f_array(u, v)), places=12)

    def test_f_array__nonnegative(self):
        for v in np.linspace(0.01, 1, 200):
            u = np.linspace(-1, 1 / v, 200)
            self.assertTrue(np.all(asymptotics.f_array(u, v) >= 0), f'v={v}')

    def test_f_prime_u__finite_difference(self):
        h = 1e-6
        for u, v in ((0.5, 0.5), (-0.5, 1.0), (2.0, 0.5), (1.1, 0.9)):
            difference = (asymptotics.f(u + h, v) - asymptotics.f(u - h, v)) / (2 * h)
            self.assertAlmostEqual(difference, asymptotics.f_prime_u(u, v), places=5)

    def test_lobes(self):
        lower, _ = integrate.quad(lambda u: math.sqrt(u ** 3 + 1), -1, 0, epsabs=1e-12)
        middle, _ = integrate.quad(lambda u: math.sqrt(u ** 3 + 1), 0, 1, epsabs=1e-12)
        self.assertAlmostEqual(lower, asymptotics.lower_lobe(), places=9)
        self.assertAlmostEqual(middle, asymptotics._middle(), places=9)


class GTest(SimpleTestCase):

    def test_g__at_one(self):
        self.assertAlmostEqual(1 + asymptotics.lower_lobe(), asymptotics.g(1.0), places=10)

    def test_g__at_zero_is_finite(self):
        value = asymptotics.g(0.0)
        self.assertTrue(math.isfinite(value))
        self.assertGreater(value, asymptotics.g(0.01))

    def test_g__decreasing_and_continuous(self):
        values = [asymptotics.g(v) for v in np.linspace(0, 1, 41)]
        self.assertTrue(all(b < a for a, b in zip(values, values[1:])))
        for kink in (asymptotics.V_STAR, asymptotics.V_CLIP_ONE):
            self.assertAlmostEqual(asymptotics.g(kink - 1e-9), asymptotics.g(kink + 1e-9), places=6)

    def test_g__domain(self):
        with self.assertRaises(ValueError):
            asymptotics.g(1.5)

    def test_g_prime__finite_difference(self):
        h = 1e-3
        for v in (0.3, 0.5, 0.87, 0.95):
            difference = (asymptotics.g(v + h, 1e-10) - asymptotics.g(v - h, 1e-10)) / (2 * h)
            self.assertAlmostEqual(difference, asymptotics.g_prime(v), delta=1e-4 * abs(difference) + 1e-5)

    def test_g_prime__at_one(self):
        self.assertAlmostEqual(-4.0, asymptotics.g_prime(1.0), places=12)

    def test_g_prime__blows_up_like_inverse_sqrt(self):
        for v in (1e-8, 1e-6, 1e-4):
            self.assertAlmostEqual(-1.0, asymptotics.g_prime(v) * math.sqrt(v), places=2)
        with self.assertRaises(ValueError):
            asymptotics.g_prime(0.0)

    def test_g_values__matches_g(self):
        v = np.array([0.0, 1e-5, 0.01, 0.3, 0.7, asymptotics.V_STAR, 0.88, 0.9, 0.99, 1.0])
        spline = asymptotics.g_values(v)
        for x, y in zip(v, spline):
            self.assertAlmostEqual(asymptotics.g(float(x), 1e-10), float(y), delta=1e-5)


class SumOverY3Test(SimpleTestCase):

    def test_sigma__examples(self):
        self.assertEqual(1, asymptotics.sigma((1, 1, 1, 1), 1, 1, 1))
        # residues 1 and 3 mod 4 both count at k4 = 2
        self.assertEqual(0, asymptotics.sigma((1, 1, 2, 1), 1, 1, 1))
        self.assertEqual(0, asymptotics.sigma((2, 1, 2, 1), 1, 1, 1))

    def test_s_exact_vs_main__all_ones(self):
        exact, main, error = asymptotics.s_exact_vs_main((1, 1, 1, 1), 1, 1, 1, 64)
        self.assertEqual(7, exact)
        self.assertAlmostEqual(8 * math.sqrt(1 + 1 / 64), main, places=9)
        self.assertLessEqual(abs(error), 8)

    def test_s_exact_vs_main__outside_region(self):
        self.assertEqual((0, 0.0, 0.0), asymptotics.s_exact_vs_main((1, 1, 1, 1), 1, 100, 1, 64))

    def test_s_exact_vs_main__sampled_tuples(self):
        B = 10 ** 4
        tuples = asymptotics.admissible_tuples(B, 50, seed=11)
        self.assertEqual(50, len(tuples))
        for v, y0, y1, y2 in tuples:
            _, _, error = asymptotics.s_exact_vs_main(v, y0, y1, y2, B)
            self.assertLessEqual(abs(error) / asymptotics.divisor_bound(v, y0, y2), 10, str((v, y0, y1, y2)))


class PhiTest(SimpleTestCase):

    def test_phi_pm__all_ones(self):
        for sign in (-1, 1):
            value, error = asymptotics.phi_pm_with_error((1, 1, 1, 1), 1, sign, 1e-3)
            self.assertTrue(math.isfinite(value))
            self.assertLess(error, 1e-2)
            self.assertLessEqual(abs(value), 20)

    def test_phi_pm__transformed_plus(self):
        plain = asymptotics.phi_pm((1, 1, 1, 1), 1, 1, 1e-3)
        transformed = asymptotics.phi_pm((1, 1, 1, 1), 1, 1, 1e-3, transformed=True)
        self.assertAlmostEqual(plain, transformed, delta=4e-3)

    def test_phi_pm__scaling_bound(self):
        pairs = sorted(asymptotics.beta_pairs(10 ** 3), key=lambda pair: pair[0][2] * pair[1] ** 2)
        for (v0, v1, v2, v3), y0 in pairs[:12]:
            bound = 20 * (v2 * y0 ** 2) ** 0.55 * 2 ** (arith.omega(v1 * v2) + arith.omega(v0 * v1 * v3))
            for sign in (-1, 1):
                value, error = asymptotics.phi_pm_with_error((v0, v1, v2, v3), y0, sign, 1e-2)
                self.assertLessEqual(abs(value), bound + error, f'v={(v0, v1, v2, v3)} y0={y0} sign={sign}')

    def test_phi_pm__rejects_bad_input(self):
        with self.assertRaises(ValueError):
            asymptotics.phi_pm((2, 1, 2, 1), 1, 1)
        with self.assertRaises(ValueError):
            asymptotics.phi_pm((1, 1, 1, 1), 1, 0)
        with self.assertRaises(ValueError):
            asymptotics.phi_pm((1, 1, 1, 1), 1, -1, transformed=True)

    def test_beta_truncated__single_term(self):
        self.assertEqual([((1, 1, 1, 1), 1)], asymptotics.beta_pairs(1))
        value, bound = asymptotics.beta_truncated(1, 1e-3)
        expected = asymptotics.phi_pm((1, 1, 1, 1), 1, -1, 1e-3) + asymptotics.phi_pm((1, 1, 1, 1), 1, 1, 1e-3)
        self.assertAlmostEqual(expected, value, delta=5e-3)
        self.assertGreater(bound, asymptotics.beta_tail(1) - 1e-12)

    def test_beta_truncated__stabilizes_within_tail(self):
        coarse, bound = asymptotics.beta_truncated(10, 1e-3)
        fine, _ = asymptotics.beta_truncated(20, 1e-3)
        self.assertLessEqual(abs(fine - coarse), bound)

    def test_beta_tail__decreasing(self):
        self.assertLess(asymptotics.beta_tail(10 ** 8), asymptotics.beta_tail(10 ** 4))


class MainTermTest(SimpleTestCase):

    def test_main_sum__b1(self):
        self.assertAlmostEqual(asymptotics.g(1.0), asymptotics.main_sum(1), places=8)
        self.assertAlmostEqual(2 * asymptotics.g(1.0), asymptotics.main_term(1), places=8)

    def test_fit_linear_term(self):
        B = [100, 1000, 10000, 100000]
        slope, intercept = asymptotics.fit_linear_term(B, [3 * b + 5 for b in B])
        self.assertAlmostEqual(3.0, slope, places=9)
        self.assertAlmostEqual(5.0, intercept, places=4)

    def test_fit_linear_term__ill_conditioned(self):
        with self.assertRaises(FitError):
            asymptotics.fit_linear_term([10, 20], [1, 2])
        with self.assertRaises(FitError):
            asymptotics.fit_linear_term([100, 200, 300], [1, 2, 3])

    def test_beta_empirical__recovers_linear_term(self):
        grid = [100, 1000, 10000]
        table = dirichlet.delta_table(max(grid))
        slope = 2 * asymptotics.SIX_OVER_PI2 + 2 * 0.25
        exact = {B: asymptotics.main_term(B, table) + slope * B for B in grid}
        self.assertAlmostEqual(0.25, asymptotics.beta_empirical(grid, exact), places=8)

    def test_predictor__b1(self):
        report = asymptotics.predictor(1, beta_hat=0.0)
        self.assertEqual(7, report.exact_count)
        self.assertTrue(math.isfinite(report.predictor))
        self.assertAlmostEqual(report.exact_count - report.predictor, report.residual)
        self.assertEqual(1, report.to_dict()['B'])

    def test_residual_exponent(self):
        reports = [asymptotics.MainTermReport(B=B, exact_count=0, predictor=0.0, residual=B ** 0.8, beta_hat=0.0,
                                              main_sum=0.0) for B in (10, 100, 1000)]
        self.assertAlmostEqual(0.8, asymptotics.residual_exponent(reports), places=9)
        with self.assertRaises(FitError):
            asymptotics.residual_exponent(reports[:1])


class HeightZetaTest(SimpleTestCase):

    def test_zeta_partial__matches_stieltjes(self):
        for s in (1.5, 2.0, 3.0):
            self.assertAlmostEqual(asymptotics.zeta_partial(s, 80), asymptotics.zeta_stieltjes(s, 80), places=10)

    def test_zeta_partial__increasing_in_B(self):
        values = [asymptotics.zeta_partial(2.0, B) for B in (10, 30, 60, 200)]
        self.assertEqual(sorted(values), values)
        self.assertLess(values[0], values[-1])

    def test_zeta_partial__converges_at_three(self):
        coarse, fine = asymptotics.zeta_partial(3.0, 200), asymptotics.zeta_partial(3.0, 2000)
        self.assertGreaterEqual(fine, coarse)
        self.assertLess((fine - coarse) / fine, 1e-2)

    def test_zeta_partial__needs_s_above_one(self):
        with self.assertRaises(EnvelopeError):
            asymptotics.zeta_partial(1.0, 10)
        with self.assertRaises(EnvelopeError):
            asymptotics.zeta_stieltjes(0.5, 10)

    def test_g11__by_parts(self):
        for s in (1.0, 2.0, 50.0):
            self.assertAlmostEqual(asymptotics.g11(s, 1e-6), asymptotics.g11_by_parts(s, 1e-6), delta=1e-5)

    def test_g11__large_s(self):
        # 12 s / (6 s - 5) g(1) plus a positive correction from g'(1) = -4
        ratio = asymptotics.g11(50.0, 1e-6) / (2 * asymptotics.g(1.0))
        self.assertGreater(ratio, 300 / 295)
        self.assertLess(ratio, 1.03)

    def test_g11__envelope(self):
        with self.assertRaises(EnvelopeError):
            asymptotics.g11(0.8)
        with self.assertRaises(EnvelopeError):
            asymptotics.g11_by_parts(5 / 6)

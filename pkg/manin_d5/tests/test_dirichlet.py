import math
from fractions import Fraction

from django.test import SimpleTestCase
from sympy import primerange

from manin_d5 import constants, dirichlet
from manin_d5.tools import EnvelopeError
from . import test_settings  # noqa


class DeltaTest(SimpleTestCase):

    def test_theta(self):
        self.assertEqual(Fraction(1, 2), dirichlet.theta((1, 1, 1, 1), 1, 2))
        self.assertEqual(0, dirichlet.theta((2, 1, 2, 1), 1, 1))
        self.assertEqual(1, dirichlet.theta((1, 1, 1, 1), 1, 1))

    def test_delta__examples(self):
        self.assertEqual(1, dirichlet.delta(1))
        self.assertEqual(Fraction(1, 4), dirichlet.delta_coefficient(4))
        self.assertAlmostEqual(0.31498, dirichlet.delta(4), places=5)
        self.assertEqual(0, dirichlet.delta(5 * 7))

    def test_monomial_patterns__weighted_degree(self):
        for e in range(12):
            for pattern in dirichlet.monomial_patterns(e):
                self.assertEqual(e, sum(k * w for k, w in zip(pattern, dirichlet.WEIGHTS)))

    def test_factorizations__reconstruct_n(self):
        for n in (1, 16, 64, 144, 2 ** 12):
            for v, y0, y2 in dirichlet.factorizations(n):
                v0, v1, v2, v3 = v
                self.assertEqual(n, v0 ** 4 * v1 ** 6 * v2 ** 5 * v3 ** 3 * y0 ** 4 * y2 ** 2)

    def test_delta_table__nonnegative(self):
        table = dirichlet.delta_table(10 ** 5)
        self.assertTrue(all(c >= 0 for c in table.coefficients.values()))

    def test_delta_table__matches_pointwise(self):
        table = dirichlet.delta_table(500)
        for n in range(1, 501):
            self.assertEqual(dirichlet.delta_coefficient(n), table.coefficient(n), f'n={n}')
        self.assertTrue(all(c > 0 for c in table.coefficients.values()))

    def test_delta_table__limit(self):
        table = dirichlet.delta_table(100)
        with self.assertRaises(EnvelopeError):
            table.coefficient(101)
        self.assertEqual((1, '1', 1.0), table.rows()[0])


class LocalFactorTest(SimpleTestCase):

    def test_local_factor_closed__at_zero(self):
        for p in primerange(2, 101):
            self.assertAlmostEqual(1 + 6 / p + 1 / p ** 2, dirichlet.local_factor_closed(p, 0.0), delta=1e-12)

    def test_local_factor_bruteforce__within_tail(self):
        for p in (2, 3, 5, 7):
            for s in (0.1, 0.25, 0.5):
                value, tail = dirichlet.local_factor_bruteforce(p, s, 40)
                self.assertLessEqual(abs(dirichlet.local_factor_closed(p, s) - value), tail + 1e-12, f'p={p} s={s}')

    def test_local_factor_bruteforce__envelope(self):
        with self.assertRaises(EnvelopeError):
            dirichlet.local_factor_bruteforce(2, 0.0, 40)
        with self.assertRaises(EnvelopeError):
            dirichlet.local_factor_bruteforce(2, 0.5, 5)

    def test_local_product__matches_partial_sum(self):
        # every n <= N has its primes below N and all terms are positive
        s = 1.0
        total = dirichlet.dirichlet_partial_sum(s, 2000)
        product = dirichlet.local_product(s, 2000)
        self.assertLessEqual(total, product + 1e-12)
        self.assertLess(product - total, 0.05 * product)


    def test_local_product__gap_below_rankin_bound(self):
        gaps = []
        for N in (10 ** 4, 10 ** 5):
            gap = dirichlet.local_product(0.5, N) - dirichlet.dirichlet_partial_sum(0.5, N)
            self.assertGreaterEqual(gap, -1e-9)
            self.assertLessEqual(gap, N ** -0.25 * dirichlet.local_product(0.25, N), f'N={N}')
            gaps.append(gap)
        self.assertLess(gaps[1], gaps[0])


class EulerProductTest(SimpleTestCase):

    def test_arguments(self):
        arguments = dirichlet.E2.arguments(1.0)
        self.assertEqual([(3.0, 1)] * 4, arguments[:4])
        self.assertEqual([(2.0, -1)] * 8 + [(4.0, -1)], arguments[4:])

    def test_e1_pole_is_rejected(self):
        with self.assertRaises(EnvelopeError):
            dirichlet.euler_partial_product(dirichlet.E1, 1.0, 100)

    def test_euler_product_eval__tail_bounds_truncation(self):
        for spec, s in ((dirichlet.E1, 1.5), (dirichlet.E2, 1.0)):
            value, tail = dirichlet.euler_product_eval(spec, s, 10 ** 4)
            partial, _ = dirichlet.euler_partial_product(spec, s, 10 ** 4)
            self.assertLessEqual(abs(math.log(value / partial)), tail)

    def test_closing_identity(self):
        for p in primerange(2, 101):
            product = dirichlet.euler_local_factor(dirichlet.E2, p, 1.0) * dirichlet.g12_local(p)
            self.assertAlmostEqual(constants.euler_factor(p), product, delta=1e-10)

    def test_g12_product__converges(self):
        self.assertAlmostEqual(dirichlet.g12_product(10 ** 3), dirichlet.g12_product(10 ** 4), delta=5e-3)

    def test_g12_decay(self):
        decay = dirichlet.g12_decay(4)
        self.assertEqual(4, len(decay))
        self.assertLessEqual(max(decay), dirichlet.G12_DECAY_BOUND)
        self.assertLess(decay[-1], 0.05)
        self.assertLessEqual(decay[-1], decay[0] / 10)
        with self.assertRaises(EnvelopeError):
            dirichlet.g12_decay(0)

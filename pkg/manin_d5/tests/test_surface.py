import random

from django.test import SimpleTestCase

from manin_d5 import surface
from manin_d5.models import CountRecord
from manin_d5.tools import EnvelopeError
from . import test_settings  # noqa

B1_CLASSES = {
    (1, 0, 0, 0, 0),
    (1, 0, 0, 1, -1),
    (1, 0, 0, -1, -1),
    (1, 1, 1, 0, 1),
    (1, 1, -1, 0, -1),
    (1, 1, 1, 1, 0),
    (1, 1, 1, -1, 0),
}


class SurfaceModelTest(SimpleTestCase):

    def test_is_on_surface(self):
        self.assertTrue(surface.is_on_surface((1, 1, 1, 0, 1)))
        self.assertFalse(surface.is_on_surface((1, 1, 1, 1, 1)))

    def test_is_on_line(self):
        self.assertTrue(surface.is_on_line((0, 1, 0, 0, 0)))
        self.assertFalse(surface.is_on_line((1, 0, 0, 0, 0)))

    def test_normalize(self):
        self.assertEqual((1, 0, 0, 0, 0), surface.normalize((-2, 0, 0, 0, 0)))
        self.assertEqual((4, 1, 2, 1, 0), surface.normalize((-8, -2, -4, -2, 0)))
        with self.assertRaises(ValueError):
            surface.normalize((0, 0, 0, 0, 0))

    def test_normalize__idempotent_on_scaled_points(self):
        rng = random.Random(3)
        for x in surface.iter_direct_points(200):
            scale = rng.choice((-1, 1)) * rng.randint(1, 50)
            y = surface.normalize(tuple(scale * c for c in x))
            self.assertEqual(y, surface.normalize(y))
            self.assertEqual(surface.normalize(x), y)

    def test_surface_point__rejects_off_surface(self):
        with self.assertRaises(ValueError):
            surface.SurfacePoint((1, 1, 1, 1, 1))
        point = surface.SurfacePoint.from_vector((-16, -1, -4, -2, 0))
        self.assertEqual(16, point.height)
        self.assertFalse(point.on_line)


class NaiveCounterTest(SimpleTestCase):

    def test_count_naive__b1_classes(self):
        self.assertEqual(B1_CLASSES, set(surface.naive_points(1)))
        self.assertEqual(7, surface.count_naive(1).count)

    def test_scan_box__matches_naive(self):
        for B in (1, 2):
            self.assertEqual(set(surface.scan_box(B)), set(surface.naive_points(B)))

    def test_count_naive__rejects_large_bound(self):
        with self.assertRaises(EnvelopeError):
            surface.count_naive(81)

    def test_naive_points__are_normalized_points_of_u(self):
        for x in surface.naive_points(20):
            self.assertTrue(surface.is_on_surface(x))
            self.assertFalse(surface.is_on_line(x))
            self.assertEqual(x, surface.normalize(x))
            self.assertLessEqual(surface.height(x), 20)


class DirectCounterTest(SimpleTestCase):

    def test_count_direct__b1(self):
        self.assertEqual(0, surface.count_direct(1).count)
        self.assertEqual(0, surface.count_naive_filtered(1).count)

    def test_count_direct__matches_filtered_naive(self):
        for B in (10, 50):
            self.assertEqual(surface.count_naive_filtered(B).count, surface.count_direct(B).count)

    def test_count_direct__thread_independent(self):
        single = surface.count_direct(300, threads=1).count
        for threads in (3, 4, 8):
            self.assertEqual(single, surface.count_direct(300, threads=threads).count, f'threads={threads}')

    def test_count_direct__record_fields(self):
        record = surface.count_direct(20)
        self.assertIsInstance(record, CountRecord)
        self.assertIsNone(record.pk)
        self.assertEqual(CountRecord.METHODS.direct, record.method)
        self.assertEqual(CountRecord.QUANTITIES.star, record.quantity)
        self.assertEqual(20, record.height_bound)

    def test_iter_direct_points__on_surface(self):
        for x in surface.iter_direct_points(100):
            self.assertTrue(surface.is_on_surface(x))
            self.assertGreater(x[3], 0)
            self.assertNotEqual(0, x[1] * x[2] * x[4])


class DegenerateCounterTest(SimpleTestCase):

    def test_count_degenerate__b1(self):
        self.assertEqual(7, surface.count_degenerate(1).count)

    def test_count_degenerate__matches_enumeration(self):
        for B in (1, 5, 16, 81, 100):
            points = list(surface.iter_degenerate_points(B))
            self.assertEqual(len(points), len(set(points)))
            self.assertEqual(len(points), surface.count_degenerate(B).count)

    def test_coprime_pairs(self):
        self.assertEqual(0, surface.coprime_pairs(0))
        self.assertEqual(1, surface.coprime_pairs(1))
        self.assertEqual(11, surface.coprime_pairs(4))


class CountUTest(SimpleTestCase):

    def test_count_U__b1(self):
        self.assertEqual(7, surface.count_U(1, CountRecord.METHODS.naive).count)
        self.assertEqual(7, surface.count_U(1, CountRecord.METHODS.direct).count)

    def test_count_U__naive_decomposition(self):
        for B in range(1, 31):
            naive = surface.count_naive(B).count
            composed = 2 * surface.count_direct(B).count + surface.count_degenerate(B).count
            self.assertEqual(naive, composed, f'B={B}')

    def test_count_U__methods_agree(self):
        self.assertEqual(surface.count_U(40, CountRecord.METHODS.naive).count,
                         surface.count_U(40, CountRecord.METHODS.torsor).count)

    def test_count_U__unknown_method(self):
        with self.assertRaises(ValueError):
            surface.count_U(10, 'other')

    def test_height_histogram__sums_to_count(self):
        histogram = surface.height_histogram(60)
        self.assertEqual(surface.count_U(60).count, sum(histogram.values()))
        self.assertEqual(7, histogram[1])

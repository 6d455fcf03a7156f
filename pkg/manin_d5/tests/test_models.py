from django.test import TestCase

from manin_d5 import surface
from manin_d5.models import CountRecord
from manin_d5.tests.testtools import record_factory
from . import test_settings  # noqa


class CountRecordTest(TestCase):

    def test_to_dict__without_timing(self):
        record = record_factory(instance_only=True, height_bound=1, count=7, method=CountRecord.METHODS.naive,
                                quantity=CountRecord.QUANTITIES.u)
        expected = dict(B=1, count=7, method='naive', quantity='u', build_id='test')
        self.assertEqual(expected, record.to_dict(timing=False))

    def test_to_dict__empty_build_id_is_left_out(self):
        record = record_factory(instance_only=True, build_id='')
        self.assertNotIn('build_id', record.to_dict())

    def test_to_dict__with_timing(self):
        record = record_factory(instance_only=True, elapsed_ms=12.34567)
        self.assertEqual(12.346, record.to_dict()['elapsed_ms'])

    def test_str(self):
        record = record_factory(instance_only=True, height_bound=100, count=3)
        self.assertEqual('direct:star(B=100) = 3', str(record))

    def test_counter_record__is_saved_on_request(self):
        record = surface.count_degenerate(16)
        self.assertEqual(0, CountRecord.objects.count())
        record.save()
        stored = CountRecord.objects.get()
        self.assertEqual(record.count, stored.count)
        self.assertEqual(CountRecord.QUANTITIES.degenerate, stored.quantity)
        self.assertEqual('test', stored.build_id)

    def test_ordering(self):
        record_factory(height_bound=100)
        record_factory(height_bound=10)
        self.assertEqual([10, 100], [r.height_bound for r in CountRecord.objects.all()])

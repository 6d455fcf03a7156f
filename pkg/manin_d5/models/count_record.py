from typing import Dict

from django.db import models
from django.utils.translation import gettext_lazy as _
from model_utils import Choices
from model_utils.models import TimeStampedModel


class CountRecord(TimeStampedModel):
    """One row per counter run; counters hand back unsaved instances."""
    METHODS = Choices(
        ('naive', _('naive')),
        ('direct', _('direct')),
        ('torsor', _('torsor')),
        ('degenerate', _('degenerate')),
    )
    QUANTITIES = Choices(
        ('star', _('N(Q1,Q2;B)')),
        ('u', _('N_U(B)')),
        ('degenerate', _('degenerate points')),
    )
    height_bound = models.PositiveBigIntegerField(_('height bound'))
    count = models.PositiveBigIntegerField(_('count'))
    method = models.CharField(_('method'), max_length=16, choices=METHODS)
    quantity = models.CharField(_('quantity'), max_length=16, choices=QUANTITIES, default=QUANTITIES.star)
    elapsed_ms = models.FloatField(_('elapsed (ms)'), default=0.0)
    threads = models.PositiveIntegerField(_('threads'), default=1)
    build_id = models.CharField(_('build id'), max_length=64, blank=True, default='')

    def to_dict(self, timing: bool = True) -> Dict:
        res = dict(
            B=self.height_bound,
            count=self.count,
            method=self.method,
            quantity=self.quantity,
        )
        if self.build_id:
            res['build_id'] = self.build_id
        if timing:
            res['elapsed_ms'] = round(self.elapsed_ms, 3)
        return res

    def __str__(self):
        return f'{self.method}:{self.quantity}(B={self.height_bound}) = {self.count}'

    class Meta:
        verbose_name = _('Count Record')
        verbose_name_plural = _('Count Records')
        ordering = ('height_bound', 'method')

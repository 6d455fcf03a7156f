import click

from manin_d5 import surface, torsor
from manin_d5.management.base import RunCommand
from manin_d5.models import CountRecord
from manin_d5.settings import get_config
from manin_d5.tools import EnvelopeError, RunConfig, dump_csv, dump_json_line

COUNTERS = {
    (CountRecord.METHODS.naive, CountRecord.QUANTITIES.u): lambda B, threads: surface.count_naive(B),
    (CountRecord.METHODS.naive, CountRecord.QUANTITIES.star): lambda B, threads: surface.count_naive_filtered(B),
    (CountRecord.METHODS.direct, CountRecord.QUANTITIES.star): surface.count_direct,
    (CountRecord.METHODS.torsor, CountRecord.QUANTITIES.star): torsor.count_torsor,
    (CountRecord.METHODS.direct, CountRecord.QUANTITIES.u): lambda B, threads: surface.count_U(
        B, CountRecord.METHODS.direct, threads),
    (CountRecord.METHODS.torsor, CountRecord.QUANTITIES.u): lambda B, threads: surface.count_U(
        B, CountRecord.METHODS.torsor, threads),
    (CountRecord.METHODS.degenerate, CountRecord.QUANTITIES.degenerate): lambda B, threads: surface.count_degenerate(
        B),
}

DEFAULT_QUANTITY = {
    CountRecord.METHODS.naive: CountRecord.QUANTITIES.u,
    CountRecord.METHODS.direct: CountRecord.QUANTITIES.star,
    CountRecord.METHODS.torsor: CountRecord.QUANTITIES.star,
    CountRecord.METHODS.degenerate: CountRecord.QUANTITIES.degenerate,
}


class Command(RunCommand):
    """
    Count points of bounded height exactly, one JSON line (or CSV row) per height bound
    """
    help = __doc__
    command = 'count'

    def add_arguments(self, parser):
        parser.add_argument('--method', action='store', choices=[m for m, _ in CountRecord.METHODS],
                            default=CountRecord.METHODS.direct, dest='method', help='counting method')
        parser.add_argument('--quantity', action='store', choices=[q for q, _ in CountRecord.QUANTITIES],
                            default=None, dest='quantity',
                            help='star: N(Q1,Q2;B), u: all points of U, degenerate: x1 x2 x3 x4 = 0')
        parser.add_argument('--B', action='store', dest='B', default=None, help='height bound')
        parser.add_argument('--grid', action='store', dest='grid', default=None,
                            help='height bounds as lo:hi[:points] or a comma separated list')
        parser.add_argument('--save', action='store_true', dest='save', help='store the records in the database')
        parser.add_argument('--timing', action='store_true', dest='timing', help='include elapsed_ms in the output')
        self.add_common_arguments(parser)

    def run(self, cfg: RunConfig) -> int:
        bounds = cfg.grid or ([cfg.B] if cfg.B is not None else None)
        if not bounds:
            raise EnvelopeError('give --B or --grid')
        quantity = cfg.quantity or DEFAULT_QUANTITY[cfg.method]
        counter = COUNTERS.get((cfg.method, quantity))
        if counter is None:
            raise EnvelopeError(f'method {cfg.method} does not count {quantity}')
        records = []
        for B in bounds:
            if B < 1:
                raise EnvelopeError(f'B={B} is below 1')
            records.append(counter(B, cfg.threads))
        if cfg.save or get_config('PERSIST_COUNTS'):
            for record in records:
                record.save()
        rows = [record.to_dict(timing=cfg.timing) for record in records]
        with click.open_file(cfg.output or '-', 'w') as file:
            if cfg.format == 'csv':
                header = list(rows[0])
                dump_csv(header, ([row[k] for k in header] for row in rows), file=file)
            else:
                for row in rows:
                    dump_json_line(row, file=file)
        return 0

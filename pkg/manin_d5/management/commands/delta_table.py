import click

from manin_d5.dirichlet import delta_table
from manin_d5.management.base import RunCommand
from manin_d5.tools import EnvelopeError, RunConfig, dump_csv, dump_json_line


class Command(RunCommand):
    """
    Export Delta(n) for n <= B as CSV rows n, coefficient, value
    """
    help = __doc__
    command = 'delta_table'

    def add_arguments(self, parser):
        parser.add_argument('--B', action='store', dest='B', default=None, help='largest n')
        self.add_common_arguments(parser)
        parser.set_defaults(format='csv')

    def run(self, cfg: RunConfig) -> int:
        if cfg.B is None:
            raise EnvelopeError('give --B')
        table = delta_table(cfg.B)
        with click.open_file(cfg.output or '-', 'w') as file:
            if cfg.format == 'csv':
                dump_csv(('n', 'coefficient', 'value'), table.rows(), file=file)
            else:
                for n, coefficient, value in table.rows():
                    dump_json_line(dict(n=n, coefficient=coefficient, value=value), file=file)
        return 0

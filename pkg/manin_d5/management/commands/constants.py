import click

from manin_d5.constants import constants_report
from manin_d5.management.base import RunCommand
from manin_d5.tools import RunConfig, dump_json_line


class Command(RunCommand):
    """
    Report alpha, tau_inf, tau, the local densities and the assembled leading constant as one JSON line
    """
    help = __doc__
    command = 'constants'

    def add_arguments(self, parser):
        parser.add_argument('--tol', action='store', dest='abs_tol', default=None,
                            help='absolute quadrature tolerance (default ABS_TOL)')
        parser.add_argument('--prime-cutoff', action='store', dest='prime_cutoff', default=None,
                            help='largest prime in the Euler product for tau (default PRIME_CUTOFF)')
        self.add_common_arguments(parser)

    def run(self, cfg: RunConfig) -> int:
        report = constants_report(cfg.abs_tol, cfg.prime_cutoff, threads=cfg.threads)
        with click.open_file(cfg.output or '-', 'w') as file:
            dump_json_line(report, file=file)
        return 0

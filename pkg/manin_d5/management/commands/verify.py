import click

from manin_d5.management.base import RunCommand
from manin_d5.suites import SUITES, run_suite
from manin_d5.tools import RunConfig, dump_json_line


class Command(RunCommand):
    """
    Run named check suites; one JSON line per check, exit code 1 if any check fails
    """
    help = __doc__
    command = 'verify'

    def add_arguments(self, parser):
        parser.add_argument('--suite', action='append', choices=sorted(SUITES), dest='suite',
                            help='suite to run, may be repeated (default: all)')
        parser.add_argument('--B', action='store', dest='B', default=None, help='height bound')
        parser.add_argument('--grid', action='store', dest='grid', default=None,
                            help='height bounds as lo:hi[:points] or a comma separated list')
        parser.add_argument('--pmax', action='store', dest='pmax', default=None, help='largest prime checked')
        parser.add_argument('--tol', action='store', dest='abs_tol', default=None, help='absolute tolerance')
        parser.add_argument('--prime-cutoff', action='store', dest='prime_cutoff', default=None,
                            help='largest prime in Euler products')
        parser.add_argument('--exponent-cutoff', action='store', dest='exponent_cutoff', default=None,
                            help='largest weighted exponent in local series')
        parser.add_argument('--count', action='store', dest='samples', default=None,
                            help='number of sampled tuples or Monte-Carlo points')
        self.add_common_arguments(parser)

    def run(self, cfg: RunConfig) -> int:
        names = cfg.suite or sorted(SUITES)
        failed = []
        with click.open_file(cfg.output or '-', 'w') as file:
            for name in names:
                for result in run_suite(name, cfg):
                    dump_json_line(result.to_dict(), file=file)
                    if not result.passed:
                        failed.append(f'{result.suite}/{result.name}')
        for name in failed:
            click.secho(f'FAILED {name}', err=True, fg='red')
        return 1 if failed else 0

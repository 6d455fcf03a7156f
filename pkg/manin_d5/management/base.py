import logging
import sys

import click
from django.core.management.base import BaseCommand

from manin_d5.settings import logger
from manin_d5.tools import EnvelopeError, FitError, OverflowAbort, QuadratureError, RunConfig

VERBOSITY_TO_LOG_LEVEL = {
    0: logging.CRITICAL,
    1: logging.WARNING,
    2: logging.INFO,
    3: logging.DEBUG,
}

EXIT_CODES = (
    (EnvelopeError, 2),
    (OverflowAbort, 3),
    (QuadratureError, 4),
    (FitError, 1),
)


class RunCommand(BaseCommand):
    """Parses options into a RunConfig, runs it, and maps library errors to exit codes."""
    command = None

    def add_common_arguments(self, parser):
        parser.add_argument('--threads', action='store', dest='threads', default=None,
                            help='worker processes (default MANIN_D5_THREADS)')
        parser.add_argument('--out', action='store', dest='output', default=None,
                            help='file name to write to (otherwise writes to standard output)')
        parser.add_argument('--format', action='store', choices=['json', 'csv'], default='json', dest='format',
                            help='format of output')

    def handle(self, *args, **options):
        verbosity = options.get('verbosity', 1)
        logger.setLevel(VERBOSITY_TO_LOG_LEVEL.get(verbosity, logging.INFO))
        try:
            cfg = RunConfig.from_options(self.command, options)
            code = self.run(cfg)
        except tuple(error for error, _ in EXIT_CODES) as e:
            click.secho(f'{type(e).__name__}: {e}', err=True, fg='red')
            code = next(code for error, code in EXIT_CODES if isinstance(e, error))
        if code:
            sys.exit(code)

    def run(self, cfg: RunConfig) -> int:
        raise NotImplementedError

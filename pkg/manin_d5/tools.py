import csv
import json
import math
import multiprocessing
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import click
import numpy as np
from scipy import integrate

from manin_d5.settings import get_config, logger

INT128_LIMIT = 2 ** 127
SCHEMA_VERSION = 1


class EnvelopeError(ValueError):
    pass


class OverflowAbort(ArithmeticError):
    pass


class QuadratureError(RuntimeError):
    pass


class FitError(ValueError):
    pass


def checked(value: int) -> int:
    """Abort instead of silently growing past the signed 128-bit range."""
    if -INT128_LIMIT <= value < INT128_LIMIT:
        return value
    raise OverflowAbort(f'intermediate {value} exceeds the 128-bit envelope')


def check_envelope(name: str, value, low=None, high=None):
    if low is not None and value < low:
        raise EnvelopeError(f'{name}={value} is below {low}')
    if high is not None and value > high:
        raise EnvelopeError(f'{name}={value} is above {high}')
    return value


def resolve_workers(threads=None) -> int:
    if threads is None:
        threads = get_config('THREADS')
    return max(1, int(threads))


def _make_executor(max_workers: int):
    try:
        ctx = multiprocessing.get_context("fork")
        return ProcessPoolExecutor(max_workers=max_workers, mp_context=ctx)
    except ValueError as e:
        logger.warning(f"couldn't start process pool with fork: {e}. Falling back to threads.")
        return ThreadPoolExecutor(max_workers=max_workers)


def partitioned_sum(func: Callable[..., int], chunks: Sequence, threads=None) -> int:
    """Sum func(chunk) over chunks, optionally across worker processes.

    Integer addition is associative, so the total does not depend on the worker count.
    """
    workers = resolve_workers(threads)
    if workers == 1 or len(chunks) <= 1:
        return sum(func(chunk) for chunk in chunks)
    with _make_executor(workers) as executor:
        return sum(executor.map(func, chunks))


def split_range(start: int, stop: int, parts: int) -> List[range]:
    """Interleaved split of range(start, stop); interleaving balances triangular workloads."""
    parts = max(1, min(parts, stop - start))
    return [range(start + i, stop, parts) for i in range(parts)]


def format_number(value) -> str:
    if isinstance(value, int):
        return str(value)
    return f'{float(value):.17g}'


def dump_json_line(data: dict, file=None):
    row = {'schema': SCHEMA_VERSION}
    row.update(data)
    click.echo(json.dumps(row, sort_keys=True, default=str), file=file)


def dump_csv(header: Iterable[str], rows: Iterable[Iterable], file=None):
    writer = csv.writer(file if file is not None else click.get_text_stream('stdout'),
                        quoting=csv.QUOTE_MINIMAL, lineterminator='\r\n')
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([format_number(v) if isinstance(v, (int, float)) else v for v in row])


def quadrature(func: Callable[[float], float], a: float, b: float, abs_tol: float,
               points: Sequence[float] = None, limit: int = 200):
    """scipy quad with an absolute tolerance; raises QuadratureError instead of warning."""
    if points is not None:
        points = sorted(p for p in points if a < p < b) or None
    out = integrate.quad(func, a, b, epsabs=abs_tol, epsrel=0.0, limit=limit, points=points, full_output=1)
    value, error = out[0], out[1]
    if len(out) > 3 and error > abs_tol:
        raise QuadratureError(f'quadrature on [{a}, {b}] stopped at error {error:.3g} > {abs_tol:.3g}: {out[3]}')
    return value, error


def geometric_grid(lo: int, hi: int, points: int = 8) -> List[int]:
    if lo < 1 or hi <= lo or points < 2:
        raise EnvelopeError(f'bad grid {lo}:{hi}:{points}')
    return sorted({int(round(x)) for x in np.geomspace(lo, hi, points)})


def parse_int(name: str, text) -> Optional[int]:
    """Integer option; accepts 10000, 1e4 and 10**4."""
    if text is None or isinstance(text, int):
        return text
    text = str(text).strip()
    try:
        if '**' in text:
            base, exponent = text.split('**')
            return int(base) ** int(exponent)
        value = float(text) if any(c in text for c in '.eE') else int(text)
    except ValueError:
        raise EnvelopeError(f'--{name}: {text!r} is not an integer')
    if value != int(value):
        raise EnvelopeError(f'--{name}: {text!r} is not an integer')
    return int(value)


def parse_float(name: str, text) -> Optional[float]:
    if text is None or isinstance(text, float):
        return text
    try:
        value = float(text)
    except ValueError:
        raise EnvelopeError(f'--{name}: {text!r} is not a number')
    if not math.isfinite(value) or value <= 0:
        raise EnvelopeError(f'--{name}: {text!r} must be a positive finite number')
    return value


def parse_grid(text) -> Optional[List[int]]:
    """lo:hi[:points] as a geometric grid, or a comma separated list of values."""
    if text is None or isinstance(text, list):
        return text
    if ',' in text:
        return sorted({parse_int('grid', part) for part in text.split(',')})
    parts = text.split(':')
    if len(parts) not in (2, 3):
        raise EnvelopeError(f'--grid: {text!r} is not lo:hi[:points]')
    points = parse_int('grid', parts[2]) if len(parts) == 3 else 8
    return geometric_grid(parse_int('grid', parts[0]), parse_int('grid', parts[1]), points)


@dataclass
class RunConfig:
    """Parsed options of one command run."""
    command: str
    method: Optional[str] = None
    quantity: Optional[str] = None
    B: Optional[int] = None
    grid: Optional[List[int]] = None
    prime_cutoff: Optional[int] = None
    exponent_cutoff: Optional[int] = None
    abs_tol: Optional[float] = None
    threads: Optional[int] = None
    pmax: Optional[int] = None
    samples: Optional[int] = None
    suite: Optional[List[str]] = None
    output: Optional[str] = None
    format: str = 'json'
    save: bool = False
    timing: bool = False

    @classmethod
    def from_options(cls, command: str, options: Dict) -> 'RunConfig':
        config = cls(
            command=command,
            method=options.get('method'),
            quantity=options.get('quantity'),
            B=parse_int('B', options.get('B')),
            grid=parse_grid(options.get('grid')),
            prime_cutoff=parse_int('prime-cutoff', options.get('prime_cutoff')),
            exponent_cutoff=parse_int('exponent-cutoff', options.get('exponent_cutoff')),
            abs_tol=parse_float('tol', options.get('abs_tol')),
            threads=parse_int('threads', options.get('threads')),
            pmax=parse_int('pmax', options.get('pmax')),
            samples=parse_int('count', options.get('samples')),
            suite=options.get('suite'),
            output=options.get('output'),
            format=options.get('format') or 'json',
            save=bool(options.get('save')),
            timing=bool(options.get('timing')),
        )
        if config.threads is not None:
            check_envelope('threads', config.threads, low=1)
        return config

    def to_dict(self) -> Dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict) -> 'RunConfig':
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise EnvelopeError(f'unknown run options {sorted(unknown)}')
        return cls(**data)

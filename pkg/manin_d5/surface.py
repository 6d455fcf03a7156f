"""The surface x0*x1 - x2^2 = x0*x4 - x1*x2 + x3^2 = 0 and its point counters.

U is the complement of the line x0 = x2 = x3 = 0. On U the first coordinate never
vanishes, so a projective class is represented by the unique primitive vector with x0 > 0.
"""
import itertools
import math
import time
from dataclasses import dataclass
from functools import partial
from typing import Iterable, Iterator, Sequence, Tuple

import numpy as np
from sympy import integer_nthroot

from manin_d5.arith import factorize, mobius_table, sqrt_roots_mod
from manin_d5.models import CountRecord
from manin_d5.settings import get_config, logger
from manin_d5.tools import check_envelope, checked, partitioned_sum, resolve_workers, split_range

Vector = Tuple[int, int, int, int, int]


def Q1(x: Sequence[int]) -> int:
    return x[0] * x[1] - x[2] * x[2]


def Q2(x: Sequence[int]) -> int:
    return x[0] * x[4] - x[1] * x[2] + x[3] * x[3]


def is_on_surface(x: Sequence[int]) -> bool:
    return Q1(x) == 0 and Q2(x) == 0


def is_on_line(x: Sequence[int]) -> bool:
    return x[0] == 0 and x[2] == 0 and x[3] == 0


def is_primitive(x: Sequence[int]) -> bool:
    return math.gcd(*x) == 1


def height(x: Sequence[int]) -> int:
    return max(abs(c) for c in x)


def normalize(x: Sequence[int]) -> Vector:
    """Primitive representative whose first nonzero coordinate is positive."""
    g = math.gcd(*x)
    if g == 0:
        raise ValueError('the zero vector has no projective class')
    sign = next(1 if c > 0 else -1 for c in x if c)
    return tuple(sign * c // g for c in x)


@dataclass(frozen=True)
class SurfacePoint:
    x: Vector

    def __post_init__(self):
        if len(self.x) != 5:
            raise ValueError(f'expected 5 coordinates, got {self.x}')
        if not is_on_surface(self.x):
            raise ValueError(f'{self.x} is not on the surface')
        if normalize(self.x) != tuple(self.x):
            raise ValueError(f'{self.x} is not a normalized primitive vector')

    @classmethod
    def from_vector(cls, x: Sequence[int]) -> 'SurfacePoint':
        return cls(normalize(x))

    @property
    def height(self) -> int:
        return height(self.x)

    @property
    def on_line(self) -> bool:
        return is_on_line(self.x)


def build_record(B: int, count: int, method: str, quantity: str, started: float, threads: int = 1) -> CountRecord:
    record = CountRecord(
        height_bound=B, count=count, method=method, quantity=quantity,
        elapsed_ms=(time.perf_counter() - started) * 1000.0, threads=threads,
        build_id=str(get_config('BUILD_ID') or ''))
    logger.info(f'{record} in {record.elapsed_ms:.1f}ms')
    return record


def naive_points(B: int) -> Iterator[Vector]:
    """Every normalized point of U with H <= B.

    Equivalent to scanning the box [-B, B]^5: x0 ranges over [1, B], x1 is forced by Q1,
    and the x3 axis is scanned as a vector for each admissible (x0, x2).
    """
    if B < 1:
        return
    x3 = np.arange(-B, B + 1, dtype=np.int64)
    for x0 in range(1, B + 1):
        for x2 in range(-B, B + 1):
            if (x2 * x2) % x0:
                continue
            x1 = x2 * x2 // x0
            if x1 > B:
                continue
            numerator = x1 * x2 - x3 * x3
            mask = numerator % x0 == 0
            x4 = numerator // x0
            mask &= np.abs(x4) <= B
            if not mask.any():
                continue
            g = np.gcd(np.gcd(np.gcd(x0, x1), x2), np.gcd(x3[mask], x4[mask]))
            for c3, c4 in zip(x3[mask][g == 1].tolist(), x4[mask][g == 1].tolist()):
                yield x0, x1, x2, c3, c4


def scan_box(B: int) -> Iterator[Vector]:
    """Literal scan of [-B, B]^5; only usable for tiny B."""
    check_envelope('B', B, low=0, high=3)
    seen = set()
    for x in itertools.product(range(-B, B + 1), repeat=5):
        if not any(x) or is_on_line(x) or not is_primitive(x) or not is_on_surface(x):
            continue
        point = normalize(x)
        if point not in seen:
            seen.add(point)
            yield point


def count_naive(B: int) -> CountRecord:
    check_envelope('B', B, low=0, high=get_config('NAIVE_MAX_B'))
    started = time.perf_counter()
    count = sum(1 for _ in naive_points(B))
    return build_record(B, count, CountRecord.METHODS.naive, CountRecord.QUANTITIES.u, started)


def count_naive_filtered(B: int) -> CountRecord:
    """The naive oracle restricted to x1*x2*x3*x4 != 0 and x3 > 0, i.e. N(Q1,Q2;B)."""
    check_envelope('B', B, low=0, high=get_config('NAIVE_MAX_B'))
    started = time.perf_counter()
    count = sum(1 for x in naive_points(B) if x[3] > 0 and x[1] * x[2] * x[4] != 0)
    return build_record(B, count, CountRecord.METHODS.naive, CountRecord.QUANTITIES.star, started)


def _x3_window(B: int, c: int, m: int) -> Tuple[int, int]:
    """Bounds of 1 <= x3 <= B with |c - x3^2| <= B*m."""
    low_square, high_square = c - B * m, c + B * m
    if high_square < 1:
        return 1, 0
    lo = 1 if low_square <= 1 else math.isqrt(low_square - 1) + 1
    return lo, min(B, math.isqrt(high_square))


def iter_direct_points(B: int, z2_values: Iterable[int] = None) -> Iterator[Vector]:
    """Points counted by N(Q1,Q2;B), built from x0 = z0^2 z2, x1 = z1^2 z2, x2 = z0 z1 z2."""
    if z2_values is None:
        z2_values = range(1, B + 1)
    for z2 in z2_values:
        z1_max = math.isqrt(B // z2)
        for z0 in range(1, z1_max + 1):
            m = checked(z0 * z0 * z2)
            m_factors = factorize(m)
            for z1 in itertools.chain(range(1, z1_max + 1), range(-1, -z1_max - 1, -1)):
                if math.gcd(z0, z1) != 1:
                    continue
                c = checked(z0 * z1 ** 3 * z2 * z2)
                lo, hi = _x3_window(B, c, m)
                if lo > hi:
                    continue
                x0, x1, x2 = m, z1 * z1 * z2, z0 * z1 * z2
                for root in sqrt_roots_mod(c % m, m, factorization=m_factors):
                    for x3 in range(lo + (root - lo) % m, hi + 1, m):
                        x3_square = x3 * x3
                        if x3_square == c:
                            continue
                        x4 = (c - x3_square) // m
                        if math.gcd(z2, x3, x4) == 1:
                            yield x0, x1, x2, x3, x4


def _count_direct_chunk(B: int, z2_values: range) -> int:
    return sum(1 for _ in iter_direct_points(B, z2_values))


def count_direct(B: int, threads: int = None) -> CountRecord:
    check_envelope('B', B, low=0, high=get_config('DIRECT_MAX_B'))
    started = time.perf_counter()
    workers = resolve_workers(threads)
    chunks = split_range(1, B + 1, 4 * workers) if B else []
    count = partitioned_sum(partial(_count_direct_chunk, B), chunks, workers)
    return build_record(B, count, CountRecord.METHODS.direct, CountRecord.QUANTITIES.star, started, workers)


def coprime_pairs(n: int) -> int:
    """#{(a, b) in [1, n]^2 : gcd(a, b) = 1}."""
    if n < 1:
        return 0
    mobius = mobius_table(n)
    return sum(mobius[d] * (n // d) ** 2 for d in range(1, n + 1))


def _root_floor(B: int, k: int) -> int:
    return int(integer_nthroot(B, k)[0])


def iter_degenerate_points(B: int) -> Iterator[Vector]:
    """Points of U with H <= B and x1*x2*x3*x4 = 0."""
    if B < 1:
        return
    yield 1, 0, 0, 0, 0
    n = math.isqrt(B)
    for a, b in itertools.product(range(1, n + 1), repeat=2):
        if math.gcd(a, b) == 1:
            yield a * a, 0, 0, a * b, -b * b
            yield a * a, 0, 0, -a * b, -b * b
    n = _root_floor(B, 3)
    for a, b in itertools.product(range(1, n + 1), repeat=2):
        if math.gcd(a, b) == 1:
            yield a ** 3, a * b * b, a * a * b, 0, b ** 3
            yield a ** 3, a * b * b, -a * a * b, 0, -b ** 3
    n = _root_floor(B, 4)
    for a, b in itertools.product(range(1, n + 1), repeat=2):
        if math.gcd(a, b) == 1:
            yield a ** 4, b ** 4, a * a * b * b, a * b ** 3, 0
            yield a ** 4, b ** 4, a * a * b * b, -a * b ** 3, 0


def count_degenerate(B: int) -> CountRecord:
    check_envelope('B', B, low=1)
    started = time.perf_counter()
    count = 1 + 2 * sum(coprime_pairs(_root_floor(B, k)) for k in (2, 3, 4))
    return build_record(B, count, CountRecord.METHODS.degenerate, CountRecord.QUANTITIES.degenerate, started)


def count_U(B: int, method: str = CountRecord.METHODS.direct, threads: int = None) -> CountRecord:
    """N_U(B) = 2 N(Q1,Q2;B) + #degenerate points, exactly."""
    check_envelope('B', B, low=1)
    if method == CountRecord.METHODS.naive:
        return count_naive(B)
    started = time.perf_counter()
    if method == CountRecord.METHODS.direct:
        star = count_direct(B, threads)
    elif method == CountRecord.METHODS.torsor:
        from manin_d5.torsor import count_torsor
        star = count_torsor(B, threads)
    else:
        raise ValueError(f'unknown method {method!r}, expected naive, direct or torsor')
    count = 2 * star.count + count_degenerate(B).count
    return build_record(B, count, method, CountRecord.QUANTITIES.u, started, star.threads)


def height_histogram(B: int) -> dict:
    """Map H -> number of points of U with that height, for H <= B."""
    histogram = {}
    for x in iter_degenerate_points(B):
        h = height(x)
        histogram[h] = histogram.get(h, 0) + 1
    for x in iter_direct_points(B):
        h = height(x)
        histogram[h] = histogram.get(h, 0) + 2
    return dict(sorted(histogram.items()))

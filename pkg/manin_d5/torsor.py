"""Universal torsor v2*y0^2*y4 - v0*y1^3*y2^2 + v3*y3^2 = 0 and the counter built on it.

Points (v, y) satisfying the coprimality system are in bijection with the points counted
by N(Q1,Q2;B) through :func:`lift`; :func:`reduce_to_torsor` is the inverse map.
"""
import math
import time
from dataclasses import dataclass
from functools import partial
from typing import Iterator, List, Sequence, Tuple

from manin_d5.arith import mu, sqrt_roots_mod, squarefree_part
from manin_d5.models import CountRecord
from manin_d5.settings import get_config, logger
from manin_d5.surface import SurfacePoint, build_record, normalize
from manin_d5.tools import check_envelope, checked, partitioned_sum, resolve_workers

Outer = Tuple[int, int, int, int, int, int]


@dataclass(frozen=True)
class TorsorPoint:
    v: Tuple[int, int, int, int]
    y: Tuple[int, int, int, int, int]

    def __post_init__(self):
        if len(self.v) != 4 or len(self.y) != 5:
            raise ValueError(f'expected 4 + 5 coordinates, got v={self.v}, y={self.y}')

    @property
    def outer(self) -> Outer:
        v0, v1, v2, v3 = self.v
        return v0, v1, v2, v3, self.y[0], self.y[2]


@dataclass(frozen=True)
class RegionBounds:
    V1: float
    Y1: float
    Y2: float
    Y3: float


def is_torsor_point(v: Sequence[int], y: Sequence[int]) -> bool:
    v0, v1, v2, v3 = v
    y0, y1, y2, y3, y4 = y
    if min(v0, v1, v2, v3, y0, y2, y3) < 1 or y1 == 0 or y4 == 0:
        return False
    if v2 * y0 * y0 * y4 - v0 * y1 ** 3 * y2 * y2 + v3 * y3 * y3 != 0:
        return False
    if math.gcd(y3, v0 * y0 * y2) != 1 or math.gcd(y4, v1 * v2) != 1:
        return False
    if math.gcd(y1, v0 * v1 * v2 * v3 * y0) != 1:
        return False
    return (mu(v0 * v2 * v3) != 0
            and math.gcd(v2 * v3 * y0, y2) == 1
            and math.gcd(v0 * v3, y0) == 1)


def x0_monomial(v0, v1, v2, v3, y0, y2) -> int:
    return checked(v0 ** 4 * v1 ** 6 * v2 ** 5 * v3 ** 3 * y0 ** 4 * y2 ** 2)


def _z2(v0, v1, v2, v3, y2) -> int:
    return checked(v0 * v0 * v1 * v1 * v2 * v3 * y2 * y2)


def _z0(v0, v1, v2, v3, y0) -> int:
    return checked(v0 * v1 * v1 * v2 * v2 * v3 * y0 * y0)


def _x3_coefficient(v0, v1, v2, v3, y0, y2) -> int:
    return checked(v0 * v0 * v1 ** 3 * v2 * v2 * v3 * v3 * y0 * y2)


def lift(t: TorsorPoint) -> SurfacePoint:
    v0, v1, v2, v3 = t.v
    y0, y1, y2, y3, y4 = t.y
    z0, z2 = _z0(v0, v1, v2, v3, y0), _z2(v0, v1, v2, v3, y2)
    x = (checked(z0 * z0 * z2), checked(y1 * y1 * z2), checked(z0 * y1 * z2),
         checked(_x3_coefficient(v0, v1, v2, v3, y0, y2) * y3), y4)
    return SurfacePoint(x)


def psi_height(t: TorsorPoint) -> int:
    v0, v1, v2, v3 = t.v
    y0, y1, y2, y3, y4 = t.y
    return max(x0_monomial(v0, v1, v2, v3, y0, y2),
               checked(y1 * y1 * _z2(v0, v1, v2, v3, y2)),
               checked(_x3_coefficient(v0, v1, v2, v3, y0, y2) * y3),
               abs(y4))


def region_bounds(B: int, v: Sequence[int], y0: int, y2: int) -> RegionBounds:
    v0, v1, v2, v3 = v
    bounds = RegionBounds(
        V1=(B / (v0 ** 4 * v2 ** 5 * v3 ** 3 * y0 ** 4 * y2 ** 2)) ** (1 / 6),
        Y1=(B * v2 * y0 ** 2 / (v0 * y2 ** 2)) ** (1 / 3),
        Y2=(B / (v0 ** 4 * v1 ** 6 * v2 ** 5 * v3 ** 3 * y0 ** 4)) ** 0.5,
        Y3=(B * v2 * y0 ** 2 / v3) ** 0.5,
    )
    if bounds.V1 >= 1:
        cube = B ** (5 / 6) / (v0 ** (7 / 3) * v2 ** (13 / 6) * v3 ** 1.5 * y0 ** (4 / 3) * y2 ** (5 / 3))
        if bounds.V1 * bounds.Y1 > cube * (1 + 1e-12) or not math.isclose(bounds.V1 ** 3 * bounds.Y1, cube,
                                                                          rel_tol=2 ** -40):
            raise ArithmeticError(f'V1*Y1 <= V1^3*Y1 fails for B={B}, v={v}, y0={y0}, y2={y2}')
    return bounds


def region_checks(B: int, t: TorsorPoint) -> dict:
    """The height inequalities of a torsor point, each in exact integer form."""
    v0, v1, v2, v3 = t.v
    y0, y1, y2, y3, y4 = t.y
    D, P = v2 * y0 * y0, v0 * y1 ** 3 * y2 * y2
    spread = v3 * y3 * y3 - P
    x1 = y1 * y1 * _z2(v0, v1, v2, v3, y2)
    return dict(
        encadrement=-B * D <= spread <= B * D,
        rolly=(abs(spread) <= B * D and _x3_coefficient(v0, v1, v2, v3, y0, y2) * y3 <= B),
        holly=x1 <= B and (y1 > 0 or -P < B * D),
        bolly=x0_monomial(v0, v1, v2, v3, y0, y2) <= B,
        golly=1 <= y2 and y2 * y2 * v0 ** 4 * v1 ** 6 * v2 ** 5 * v3 ** 3 * y0 ** 4 <= B,
    )


def outer_quads(B: int) -> List[Tuple[int, int, int, int]]:
    """(v0, v1, v2, v3) with v0^4 v1^6 v2^5 v3^3 <= B and v0*v2*v3 square-free."""
    quads = []
    v0 = 1
    while v0 ** 4 <= B:
        v1 = 1
        while v0 ** 4 * v1 ** 6 <= B:
            v2 = 1
            while v0 ** 4 * v1 ** 6 * v2 ** 5 <= B:
                v3 = 1
                while v0 ** 4 * v1 ** 6 * v2 ** 5 * v3 ** 3 <= B:
                    if mu(v0 * v2 * v3):
                        quads.append((v0, v1, v2, v3))
                    v3 += 1
                v2 += 1
            v1 += 1
        v0 += 1
    return quads


def outer_tuples(B: int, quads: Sequence[Tuple[int, int, int, int]] = None) -> Iterator[Outer]:
    """(v0, v1, v2, v3, y0, y2) satisfying the monomial bound and the gcd gates on v, y0, y2."""
    for v0, v1, v2, v3 in (outer_quads(B) if quads is None else quads):
        base = v0 ** 4 * v1 ** 6 * v2 ** 5 * v3 ** 3
        y0 = 1
        while base * y0 ** 4 <= B:
            if math.gcd(v0 * v3, y0) == 1:
                y2_max = math.isqrt(B // (base * y0 ** 4))
                for y2 in range(1, y2_max + 1):
                    if math.gcd(v2 * v3 * y0, y2) == 1:
                        yield v0, v1, v2, v3, y0, y2
            y0 += 1


def y1_range(B: int, v0, v1, v2, v3, y0, y2) -> Iterator[int]:
    """Nonzero y1 with -Y1 < y1 <= V1*Y1/v1 and gcd(y1, v0 v1 v2 v3 y0) = 1."""
    y1_max = math.isqrt(B // _z2(v0, v1, v2, v3, y2))
    gate = v0 * v1 * v2 * v3 * y0
    bound = B * v2 * y0 * y0
    for y1 in range(-y1_max, y1_max + 1):
        if y1 == 0 or math.gcd(y1, gate) != 1:
            continue
        if y1 < 0 and -v0 * y1 ** 3 * y2 * y2 >= bound:
            continue
        yield y1


def iter_y3_y4(B: int, v0, v1, v2, v3, y0, y1, y2) -> Iterator[Tuple[int, int]]:
    """(y3, y4) completing (v, y0, y1, y2) to a torsor point with x3 <= B and |y4| <= B.

    y3 runs through the classes y3 = rho*y1*y2 (mod v2*y0^2) with v3*rho^2 = v0*y1.
    """
    y3_max = B // _x3_coefficient(v0, v1, v2, v3, y0, y2)
    if y3_max < 1:
        return
    D = v2 * y0 * y0
    P = checked(v0 * y1 ** 3 * y2 * y2)
    low_square, high_square = P - B * D, P + B * D
    if high_square < v3:
        return
    if low_square <= v3:
        lo = 1
    else:
        lo = math.isqrt(-(-low_square // v3) - 1) + 1
    hi = min(y3_max, math.isqrt(high_square // v3))
    if lo > hi:
        return
    target = v0 * y1 * pow(v3, -1, D) % D if D > 1 else 0
    y3_gate, y4_gate = v0 * y0 * y2, v1 * v2
    for rho in sqrt_roots_mod(target, D, require_coprime=True):
        residue = rho * y1 * y2 % D
        for y3 in range(lo + (residue - lo) % D, hi + 1, D):
            value = v3 * y3 * y3
            if value == P:
                continue
            y4 = (P - value) // D
            if math.gcd(y3, y3_gate) == 1 and math.gcd(y4, y4_gate) == 1:
                yield y3, y4


def count_y3(B: int, v: Sequence[int], y0: int, y1: int, y2: int) -> int:
    return sum(1 for _ in iter_y3_y4(B, *v[:4], y0, y1, y2))


def enumerate_torsor(B: int) -> Iterator[TorsorPoint]:
    for v0, v1, v2, v3, y0, y2 in outer_tuples(B):
        for y1 in y1_range(B, v0, v1, v2, v3, y0, y2):
            for y3, y4 in iter_y3_y4(B, v0, v1, v2, v3, y0, y1, y2):
                yield TorsorPoint((v0, v1, v2, v3), (y0, y1, y2, y3, y4))


def _count_torsor_chunk(B: int, quads: Sequence[Tuple[int, int, int, int]]) -> int:
    count = 0
    for v0, v1, v2, v3, y0, y2 in outer_tuples(B, quads):
        for y1 in y1_range(B, v0, v1, v2, v3, y0, y2):
            count += sum(1 for _ in iter_y3_y4(B, v0, v1, v2, v3, y0, y1, y2))
    return count


def count_torsor(B: int, threads: int = None) -> CountRecord:
    check_envelope('B', B, low=1, high=get_config('TORSOR_MAX_B'))
    started = time.perf_counter()
    workers = resolve_workers(threads)
    quads = outer_quads(B)
    parts = max(1, min(len(quads), 4 * workers))
    chunks = [quads[i::parts] for i in range(parts)]
    logger.debug(f'torsor count B={B}: {len(quads)} outer quadruples in {parts} chunks')
    count = partitioned_sum(partial(_count_torsor_chunk, B), chunks, workers)
    return build_record(B, count, CountRecord.METHODS.torsor, CountRecord.QUANTITIES.star, started, workers)


def reduce_to_torsor(x: Sequence[int]) -> TorsorPoint:
    """Inverse of :func:`lift` for points with x1*x2*x3*x4 != 0 and x3 > 0."""
    x = normalize(x)
    x0, x1, x2, x3, x4 = x
    if x1 * x2 * x4 == 0 or x3 <= 0:
        raise ValueError(f'{x} is not counted by N(Q1,Q2;B)')
    z2 = math.gcd(x0, x1)
    z0, z1 = math.isqrt(x0 // z2), math.isqrt(x1 // z2)
    if z0 * z0 * z2 != x0 or z1 * z1 * z2 != x1 or z0 * z1 * z2 != abs(x2):
        raise ValueError(f'{x} does not satisfy x0*x1 = x2^2')
    if x2 < 0:
        z1 = -z1
    s0, s2 = squarefree_part(z0), squarefree_part(z2)
    v3 = math.gcd(s0, s2)
    v0, v2 = s0 // v3, s2 // v3
    a, c = math.isqrt(z0 // s0), math.isqrt(z2 // s2)
    y0_, y2_ = a // v2, c // v0
    y3_ = x3 // (a * c * v0 * v2 * v3 * v3)
    v1 = math.gcd(y0_, y2_, y3_)
    t = TorsorPoint((v0, v1, v2, v3), (y0_ // v1, z1, y2_ // v1, y3_ // v1, x4))
    if not is_torsor_point(t.v, t.y) or lift(t).x != x:
        raise ValueError(f'{x} does not reduce to a torsor point (got {t})')
    return t

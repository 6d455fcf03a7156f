"""The arithmetic function Delta(n), its local factors and the Euler products E1, E2.

F(s) = sum Delta(n) n^-s. Every gate in Delta is a per-prime condition, so
F(s + 1/6) = prod_p F_p(s + 1/6) and the local factor has the closed form of
:func:`local_factor_closed`.
"""
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Sequence, Tuple

import mpmath
from sympy import primerange

from manin_d5.arith import factorize, mu, phi_star
from manin_d5.settings import get_config, logger
from manin_d5.tools import EnvelopeError, check_envelope
from manin_d5.torsor import outer_tuples

# exponents of v0, v1, v2, v3, y0, y2 in n = v0^4 v1^6 v2^5 v3^3 y0^4 y2^2
WEIGHTS = (4, 6, 5, 3, 4, 2)
# |g12_local(p) - 1| * p stays below this for every prime
G12_DECAY_BOUND = 2.0
Pattern = Tuple[int, int, int, int, int, int]


def _temple(v: Sequence[int], y0: int, y2: int) -> bool:
    v0, v1, v2, v3 = v
    return mu(v0 * v2 * v3) != 0 and math.gcd(v2 * v3 * y0, y2) == 1 and math.gcd(v0 * v3, y0) == 1


def theta(v: Sequence[int], y0: int, y2: int) -> Fraction:
    """phi*(v0 v1 v2 y2) phi*(v0 v1 v2 v3 y0) / phi*(gcd(v1, v3)), zero outside the gates."""
    if not _temple(v, y0, y2):
        return Fraction(0)
    v0, v1, v2, v3 = v
    return phi_star(v0 * v1 * v2 * y2) * phi_star(v0 * v1 * v2 * v3 * y0) / phi_star(math.gcd(v1, v3))


@lru_cache(maxsize=None)
def monomial_patterns(e: int) -> Tuple[Pattern, ...]:
    """Exponent tuples (a0, a1, a2, a3, b0, b2) of weighted degree e."""
    patterns = []

    def walk(i, remaining, prefix):
        if i == len(WEIGHTS) - 1:
            if remaining % WEIGHTS[i] == 0:
                patterns.append(prefix + (remaining // WEIGHTS[i],))
            return
        for k in range(remaining // WEIGHTS[i] + 1):
            walk(i + 1, remaining - k * WEIGHTS[i], prefix + (k,))

    walk(0, e, ())
    return tuple(patterns)


def factorizations(n: int) -> Iterator[Tuple[Tuple[int, int, int, int], int, int]]:
    """Every (v, y0, y2) with v0^4 v1^6 v2^5 v3^3 y0^4 y2^2 = n, gates not applied."""
    check_envelope('n', n, low=1)
    factors = list(factorize(n))
    for choice in itertools.product(*(monomial_patterns(e) for _, e in factors)):
        values = [1] * 6
        for (p, _), pattern in zip(factors, choice):
            for i, k in enumerate(pattern):
                values[i] *= p ** k
        v0, v1, v2, v3, y0, y2 = values
        yield (v0, v1, v2, v3), y0, y2


def delta_coefficient(n: int) -> Fraction:
    """Delta(n) / n^{1/6}."""
    total = Fraction(0)
    for v, y0, y2 in factorizations(n):
        weight = theta(v, y0, y2)
        if weight:
            total += weight / (v[0] * v[1] * v[2] * v[3] * y0 * y2)
    return total


def delta(n: int) -> float:
    return float(delta_coefficient(n)) * n ** (1 / 6)


@dataclass
class DeltaTable:
    """Delta(n) for n <= limit, kept as exact coefficients of n^{1/6}."""
    limit: int
    coefficients: Dict[int, Fraction] = field(default_factory=dict)

    def coefficient(self, n: int) -> Fraction:
        if n > self.limit:
            raise EnvelopeError(f'n={n} is beyond the table limit {self.limit}')
        return self.coefficients.get(n, Fraction(0))

    def value(self, n: int) -> float:
        return float(self.coefficient(n)) * n ** (1 / 6)

    def rows(self) -> List[Tuple[int, str, float]]:
        return [(n, str(c), self.value(n)) for n, c in sorted(self.coefficients.items())]


@lru_cache(maxsize=8)
def delta_table(limit: int) -> DeltaTable:
    check_envelope('limit', limit, low=1)
    table = DeltaTable(limit)
    for v0, v1, v2, v3, y0, y2 in outer_tuples(limit):
        n = v0 ** 4 * v1 ** 6 * v2 ** 5 * v3 ** 3 * y0 ** 4 * y2 ** 2
        weight = theta((v0, v1, v2, v3), y0, y2)
        if weight:
            table.coefficients[n] = table.coefficients.get(n, Fraction(0)) + weight / (v0 * v1 * v2 * v3 * y0 * y2)
    table.coefficients = dict(sorted(table.coefficients.items()))
    logger.debug(f'delta table up to {limit}: {len(table.coefficients)} nonzero entries')
    return table


def local_factor_closed(p: int, s: float) -> float:
    """F_p(s + 1/6) in closed form."""
    c = 1 - 1 / p
    p2, p3, p4 = p ** (2 * s + 1), p ** (3 * s), p ** (4 * s + 1)
    p5, p6 = p ** (5 * s + 1), p ** (6 * s + 1)
    return (1 + c / (p2 - 1) + c / (p4 - 1)
            + c * c / (p6 - 1) * (p2 / (p2 - 1) + 1 / (p4 - 1))
            + p4 * c * c / ((p2 - 1) * (p6 - 1))
            + p5 * c * c / ((p4 - 1) * (p6 - 1))
            + p3 * c / (p6 - 1))


def _allowed(a0, a1, a2, a3, b0, b2) -> bool:
    if a0 + a2 + a3 > 1:
        return False
    if b2 and (a2 or a3 or b0):
        return False
    return not (b0 and (a0 or a3))


def _local_theta(p: int, a0, a1, a2, a3, b0, b2) -> float:
    c = 1 - 1 / p
    value = 1.0
    if a0 + a1 + a2 + b2:
        value *= c
    if a0 + a1 + a2 + a3 + b0:
        value *= c
    if a1 and a3:
        value /= c
    return value


def _bruteforce_tail(p: int, s: float, cutoff: int) -> float:
    """Chernoff bound for the terms of weighted degree above the cutoff."""
    best = math.inf
    for t in (k / 20 for k in range(1, 20)):
        lam = p ** (t * (s + 1 / 6))
        ratios = [lam ** w / p ** (w * s + 1) for w in WEIGHTS]
        a0, a1, a2, a3, b0, b2 = ratios
        if max(a1, b0, b2) >= 1:
            continue
        bound = (1 + a0 + a2 + a3) / ((1 - a1) * (1 - b0) * (1 - b2)) * p / (p - 1)
        best = min(best, bound * lam ** -(cutoff + 1))
    return best


def local_factor_bruteforce(p: int, s: float, exponent_cutoff: int = None) -> Tuple[float, float]:
    """The local series summed over exponent tuples of weighted degree <= cutoff, with its tail bound."""
    exponent_cutoff = exponent_cutoff or get_config('EXPONENT_CUTOFF')
    check_envelope('exponent_cutoff', exponent_cutoff, low=10)
    if s <= 0:
        raise EnvelopeError(f's must be positive, got {s}')
    terms = []
    for e in range(exponent_cutoff + 1):
        for pattern in monomial_patterns(e):
            if _allowed(*pattern):
                decay = sum(k * (w * s + 1) for k, w in zip(pattern, WEIGHTS))
                terms.append(_local_theta(p, *pattern) * p ** -decay)
    return math.fsum(terms), _bruteforce_tail(p, s, exponent_cutoff)


@dataclass(frozen=True)
class EulerProductSpec:
    """prod zeta(a s + b) over numerator pairs (a, b) divided by the same over the denominator."""
    numerator: Tuple[Tuple[int, int], ...]
    denominator: Tuple[Tuple[int, int], ...] = ()

    def arguments(self, s: float) -> List[Tuple[float, int]]:
        return [(a * s + b, 1) for a, b in self.numerator] + [(a * s + b, -1) for a, b in self.denominator]


E1 = EulerProductSpec(numerator=((6, -5), (5, -4), (4, -3), (4, -3), (3, -2), (2, -1)))
E2 = EulerProductSpec(
    numerator=((14, -11), (13, -10), (13, -10), (13, -10)),
    denominator=((10, -8), (9, -7), (8, -6), (8, -6), (8, -6), (7, -5), (7, -5), (7, -5), (19, -15)),
)


def euler_local_factor(spec: EulerProductSpec, p: int, s: float) -> float:
    value = 1.0
    for sigma, sign in spec.arguments(s):
        value *= (1 - p ** -sigma) ** -sign
    return value


def _zeta_log_tail(sigma: float, cutoff: int) -> float:
    """Bound for sum over p > cutoff of -log(1 - p^-sigma)."""
    return cutoff ** (1 - sigma) / ((sigma - 1) * (1 - cutoff ** -sigma))


def euler_partial_product(spec: EulerProductSpec, s: float, prime_cutoff: int) -> Tuple[float, float]:
    """prod over p <= cutoff of the local factors, and a bound for |log(full / partial)|."""
    check_envelope('prime_cutoff', prime_cutoff, low=2)
    arguments = spec.arguments(s)
    for sigma, _ in arguments:
        if sigma <= 1:
            raise EnvelopeError(f'zeta argument {sigma} at s={s} is not above 1')
    log_partial = math.fsum(-sign * math.log1p(-p ** -sigma)
                            for p in primerange(2, prime_cutoff + 1) for sigma, sign in arguments)
    tail = math.fsum(_zeta_log_tail(sigma, prime_cutoff) for sigma, _ in arguments)
    return math.exp(log_partial), tail


def euler_product_eval(spec: EulerProductSpec, s: float, prime_cutoff: int = None) -> Tuple[float, float]:
    """Value of the zeta product and the log-tail of its Euler product truncated at the cutoff."""
    prime_cutoff = prime_cutoff or get_config('PRIME_CUTOFF')
    partial, tail = euler_partial_product(spec, s, prime_cutoff)
    value = mpmath.mpf(1)
    for sigma, sign in spec.arguments(s):
        value *= mpmath.zeta(sigma) ** sign
    value = float(value)
    if abs(math.log(value / partial)) > tail:
        logger.warning(f'Euler product at s={s} misses its tail bound: {value} vs {partial} (tail {tail:.3g})')
    return value, tail


def g12_local(p: int) -> float:
    """F_p(1/6) / (E1_p(1) E2_p(1))."""
    return local_factor_closed(p, 0.0) / (euler_local_factor(E1, p, 1.0) * euler_local_factor(E2, p, 1.0))


def g12_product(prime_cutoff: int) -> float:
    return math.prod(g12_local(p) for p in primerange(2, prime_cutoff + 1))


def g12_decay(decades: int = 4) -> List[float]:
    """max of |g12_local(p) - 1| * p over the primes of each decade [10^(k-1), 10^k), k = 1..decades."""
    check_envelope('decades', decades, low=1)
    return [max(abs(g12_local(p) - 1) * p for p in primerange(max(2, 10 ** (k - 1)), 10 ** k))
            for k in range(1, decades + 1)]


def dirichlet_partial_sum(s: float, N: int) -> float:
    """sum_{n <= N} Delta(n) n^{-(s + 1/6)}, a partial sum of F(s + 1/6)."""
    table = delta_table(N)
    return math.fsum(float(c) * n ** -s for n, c in table.coefficients.items())


def local_product(s: float, prime_cutoff: int) -> float:
    """prod_{p <= cutoff} F_p(s + 1/6)."""
    return math.prod(local_factor_closed(p, s) for p in primerange(2, prime_cutoff + 1))

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from sympy import factorint, jacobi_symbol
from sympy.ntheory import sieve, sqrt_mod


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        product = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f'malformed factorization of {self.value}: {self.factors}')
            product *= p ** e
            last = p
        if product != self.value:
            raise ValueError(f'factors {self.factors} do not multiply to {self.value}')

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def __iter__(self):
        return iter(self.factors)


@lru_cache(maxsize=1 << 16)
def factorize(n: int) -> Factorization:
    if n < 1:
        raise ValueError(f'cannot factorize {n}: positive integer expected')
    return Factorization(n, tuple(sorted(factorint(n).items())))


def jacobi(a: int, n: int) -> int:
    if n < 1 or n % 2 == 0:
        raise ValueError(f'Jacobi symbol needs an odd positive modulus, got {n}')
    if n == 1:
        return 1
    return int(jacobi_symbol(a % n, n))


def local_eta(a: int, p: int, k: int) -> int:
    """Number of x mod p^k with x^2 = a (mod p^k)."""
    q = p ** k
    a %= q
    if a == 0:
        return p ** (k // 2)
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    if v % 2:
        return 0
    j = k - v
    if p == 2:
        if j == 1:
            units = 1
        elif j == 2:
            units = 2 if a % 4 == 1 else 0
        else:
            units = 4 if a % 8 == 1 else 0
    else:
        units = 1 + jacobi(a, p)
    return p ** (v // 2) * units


def eta(a: int, q: int, factorization: Optional[Factorization] = None) -> int:
    if q < 1:
        raise ValueError(f'modulus must be positive, got {q}')
    factorization = factorization or factorize(q)
    count = 1
    for p, k in factorization:
        count *= local_eta(a, p, k)
        if count == 0:
            break
    return count


def eta_loop(a: int, q: int) -> int:
    """O(q) count, used to validate :func:`eta`."""
    n = np.arange(1, q + 1, dtype=np.int64)
    return int(np.count_nonzero((n * n - a) % q == 0))


@lru_cache(maxsize=1 << 18)
def prime_power_roots(a: int, p: int, k: int) -> Tuple[int, ...]:
    q = p ** k
    return tuple(sqrt_mod(a % q, q, all_roots=True) or ())


def sqrt_roots_mod(a: int, q: int, require_coprime: bool = False,
                   factorization: Optional[Factorization] = None) -> List[int]:
    """All rho in [1, q] with rho^2 = a (mod q), assembled by CRT from prime powers."""
    if q < 1:
        raise ValueError(f'modulus must be positive, got {q}')
    if q == 1:
        return [1]
    factorization = factorization or factorize(q)
    roots, modulus = [0], 1
    for p, k in factorization:
        pk = p ** k
        local = prime_power_roots(a % pk, p, k)
        if require_coprime:
            local = tuple(r for r in local if r % p)
        if not local:
            return []
        inverse = pow(modulus, -1, pk)
        roots = [r + modulus * (((s - r) * inverse) % pk) for r in roots for s in local]
        modulus *= pk
    return sorted(r if r else q for r in roots)


def psi(t):
    """Sawtooth {t} - 1/2; exact for int and Fraction input."""
    if isinstance(t, (int, Fraction)):
        return t - math.floor(t) - Fraction(1, 2)
    return t - math.floor(t) - 0.5


def interval_count_residue(t1, t2, a: int, q: int):
    """Count n in (t1, t2] with n = a (mod q) together with r(t1, t2; a, q).

    The pair satisfies count == (t2 - t1) / q + r exactly for rational endpoints.
    """
    if t2 < t1:
        raise ValueError(f'empty orientation: t2={t2} < t1={t1}')
    if q < 1:
        raise ValueError(f'modulus must be positive, got {q}')
    if isinstance(t1, int) and isinstance(t2, int):
        t1, t2 = Fraction(t1), Fraction(t2)
    low, high = (t1 - a) / q, (t2 - a) / q
    count = math.floor(high) - math.floor(low)
    return count, psi(low) - psi(high)


def psi_quadratic_sum(t: float, b: int, q: int, coprime_only: bool = False) -> float:
    if q < 1:
        raise ValueError(f'modulus must be positive, got {q}')
    if math.gcd(b, q) != 1:
        raise ValueError(f'gcd({b}, {q}) > 1')
    x = np.arange(q, dtype=np.int64)
    if coprime_only:
        x = x[np.gcd(x, q) == 1]
    residues = ((b % q) * (x * x % q)) % q
    values = (t - residues) / q
    return float(np.sum(values - np.floor(values) - 0.5))


def mu(n: int) -> int:
    factors = factorize(n).factors
    if any(e > 1 for _, e in factors):
        return 0
    return -1 if len(factors) % 2 else 1


def omega(n: int) -> int:
    return len(factorize(n).factors)


def phi_star(n: int) -> Fraction:
    value = Fraction(1)
    for p in factorize(n).primes:
        value *= Fraction(p - 1, p)
    return value


def phi_dagger(n: int) -> Fraction:
    value = Fraction(1)
    for p in factorize(n).primes:
        value *= Fraction(p, p + 1)
    return value


def radical(n: int) -> int:
    return math.prod(factorize(n).primes)


def squarefree_part(n: int) -> int:
    """Product of the primes dividing n to an odd power."""
    return math.prod(p for p, e in factorize(n) if e % 2)


@lru_cache(maxsize=8)
def mobius_table(n: int) -> Tuple[int, ...]:
    """mu(0..n), with a placeholder 0 at index 0."""
    return (0,) + tuple(sieve.mobiusrange(1, n + 1))

"""Ingredients of the conjectured leading constant.

c = alpha * beta * tau_H with alpha = 1/345600, beta = 1 and tau_H = 12 tau_inf tau, so
c = tau_inf * tau / 28800.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, partial
from typing import Dict, List, Sequence, Tuple

import numpy as np
from sympy import isprime, primerange

from manin_d5.asymptotics import V_CLIP_ONE, V_STAR, f_array, g, lower_lobe
from manin_d5.settings import get_config, logger
from manin_d5.tools import EnvelopeError, check_envelope, partitioned_sum, quadrature, resolve_workers, split_range

# coefficients of E1..E5 in -K once E6 is eliminated from the hyperplane section
POLYTOPE_WEIGHTS = (6, 5, 3, 4, 2)
E6_COEFFICIENT = 4
ASSEMBLY = 28800
# v beyond which the x4-integrated density is summed in closed form
TAIL_START = 64.0


def simplex_volume(weights: Sequence[int] = POLYTOPE_WEIGHTS) -> Fraction:
    """Vol{t >= 0 : sum a_i t_i <= 1} = 1 / (n! prod a_i)."""
    return Fraction(1, math.factorial(len(weights)) * math.prod(weights))


def alpha_exact() -> Fraction:
    return simplex_volume() / E6_COEFFICIENT


def alpha_monte_carlo(samples: int = None, seed: int = None) -> Tuple[float, float]:
    """Sampled volume of the polytope under POLYTOPE_WEIGHTS, with its standard error."""
    samples = samples or get_config('MONTE_CARLO_SAMPLES')
    rng = np.random.default_rng(get_config('SEED') if seed is None else seed)
    weights = np.array(POLYTOPE_WEIGHTS, dtype=float)
    box = 1 / float(np.prod(weights))
    hits, done = 0, 0
    while done < samples:
        size = min(10 ** 6, samples - done)
        # uniform in the box prod [0, 1/a_i]
        t = rng.random((size, len(weights)))
        hits += int(np.count_nonzero(t.sum(axis=1) <= 1))
        done += size
    share = hits / samples
    return box * share, box * math.sqrt(share * (1 - share) / samples)


@dataclass(frozen=True)
class IntersectionLattice:
    gram: Tuple[Tuple[int, ...], ...]
    anticanonical: Tuple[int, ...]

    def __post_init__(self):
        n = len(self.gram)
        if any(len(row) != n for row in self.gram) or len(self.anticanonical) != n:
            raise ValueError('gram matrix and anticanonical vector have mismatched sizes')

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.gram, dtype=np.int64)

    def pairing(self, a: Sequence[int], b: Sequence[int]) -> int:
        return int(np.array(a, dtype=np.int64) @ self.matrix @ np.array(b, dtype=np.int64))

    def degree(self) -> int:
        return self.pairing(self.anticanonical, self.anticanonical)

    def failures(self) -> List[str]:
        problems = []
        m = self.matrix
        if not np.array_equal(m, m.T):
            problems.append('gram matrix is not symmetric')
        k = m @ np.array(self.anticanonical, dtype=np.int64)
        for i, value in enumerate(k.tolist()):
            if value != 2 + self.gram[i][i]:
                problems.append(f'adjunction fails for E{i + 1}: -K.E{i + 1} = {value}, '
                                f'2 + E{i + 1}^2 = {2 + self.gram[i][i]}')
        if self.degree() != 4:
            problems.append(f'(-K)^2 = {self.degree()}, expected 4')
        return problems


# E5 - E4 - E1 - E2 - E6 with E3 attached to E1; E6 is the strict transform of the line
D5_LATTICE = IntersectionLattice(
    gram=(
        (-2, 1, 1, 1, 0, 0),
        (1, -2, 0, 0, 0, 1),
        (1, 0, -2, 0, 0, 0),
        (1, 0, 0, -2, 1, 0),
        (0, 0, 0, 1, -2, 0),
        (0, 1, 0, 0, 0, -1),
    ),
    anticanonical=(6, 5, 3, 4, 2, 4),
)


def lattice_failures(lattice: IntersectionLattice = D5_LATTICE) -> List[str]:
    return lattice.failures()


def verify_lattice(lattice: IntersectionLattice = D5_LATTICE) -> bool:
    problems = lattice.failures()
    for problem in problems:
        logger.warning(problem)
    return not problems


def closed_density(p: int) -> Fraction:
    return 1 + Fraction(6, p) + Fraction(1, p * p)


@dataclass
class LocalDensityReport:
    p: int
    r: int
    raw_count: int
    scaled: Fraction = field(init=False)
    closed_form: Fraction = field(init=False)

    def __post_init__(self):
        self.scaled = Fraction(self.raw_count, self.p ** (3 * self.r))
        self.closed_form = closed_density(self.p)

    @property
    def deviation(self) -> float:
        return float(abs(self.scaled - self.closed_form) / self.closed_form)

    def to_dict(self) -> Dict:
        return dict(p=self.p, r=self.r, raw_count=self.raw_count, scaled=str(self.scaled),
                    closed_form=str(self.closed_form), deviation=self.deviation)


@lru_cache(maxsize=None)
def eta_table(d: int) -> np.ndarray:
    """eta(c; d) for every residue c mod d."""
    x = np.arange(d, dtype=np.int64)
    return np.bincount(x * x % d, minlength=d)


def _check_prime_power(p: int, r: int, exponent: int, budget: int):
    if not isprime(p):
        raise EnvelopeError(f'{p} is not prime')
    check_envelope('r', r, low=1)
    if p ** (exponent * r) > budget:
        raise EnvelopeError(f'p^{exponent}r = {p ** (exponent * r)} exceeds the scan budget {budget}')


def _structured_chunk(q: int, x0_values: range) -> int:
    x1, x2 = np.meshgrid(np.arange(q, dtype=np.int64), np.arange(q, dtype=np.int64), indexing='ij')
    total = 0
    for x0 in x0_values:
        mask = (x0 * x1 - x2 * x2) % q == 0
        d = math.gcd(x0, q)
        total += int(eta_table(d)[(x1[mask] * x2[mask]) % d].sum())
    return q * total


def omega_p_bruteforce(p: int, r: int, threads: int = None) -> LocalDensityReport:
    """N(p^r) by the (x0, x1, x2) scan; each triple on x0 x1 = x2^2 has q * eta(x1 x2; gcd(x0, q)) completions."""
    _check_prime_power(p, r, 4, get_config('DENSITY_MAX_WORK'))
    q = p ** r
    workers = resolve_workers(threads)
    count = partitioned_sum(partial(_structured_chunk, q), split_range(0, q, 4 * workers), workers)
    report = LocalDensityReport(p, r, count)
    logger.info(f'N({p}^{r}) = {count}, deviation {report.deviation:.4g}')
    return report


def omega_p_naive(p: int, r: int) -> LocalDensityReport:
    """N(p^r) by checking every 5-tuple mod p^r."""
    _check_prime_power(p, r, 5, get_config('NAIVE_DENSITY_MAX_WORK'))
    q = p ** r
    x3, x4 = np.meshgrid(np.arange(q, dtype=np.int64), np.arange(q, dtype=np.int64), indexing='ij')
    count = 0
    for x0 in range(q):
        for x1 in range(q):
            for x2 in range(q):
                if (x0 * x1 - x2 * x2) % q:
                    continue
                count += int(np.count_nonzero((x0 * x4 - x1 * x2 + x3 * x3) % q == 0))
    return LocalDensityReport(p, r, count)


def density_leading_terms(p: int, r: int) -> Dict[str, int]:
    """Leading contributions of the k0 <= 3 k1 and k0 > 3 k1 cases."""
    return dict(N1=p ** (3 * r - 2) * (p * p + 4 * p + 1), N2=2 * p ** (3 * r - 1))


def density_sequence(p: int, max_work: int = None, threads: int = None) -> List[LocalDensityReport]:
    max_work = max_work or get_config('DENSITY_MAX_WORK')
    reports = []
    r = 1
    while p ** (4 * r) <= max_work:
        reports.append(omega_p_bruteforce(p, r, threads))
        r += 1
    return reports


def tau_infinity_with_error(abs_tol: float = None) -> Tuple[float, float]:
    """int_0^1 g(v) dv, half the budget to the inner integrals and half to the outer one."""
    abs_tol = abs_tol or get_config('ABS_TOL')
    check_envelope('abs_tol', abs_tol, low=1e-9)
    value, error = quadrature(lambda v: g(v, abs_tol / 2), 0.0, 1.0, abs_tol / 2, points=(V_STAR, V_CLIP_ONE))
    return value, error + abs_tol / 2


def tau_infinity(abs_tol: float = None) -> float:
    return tau_infinity_with_error(abs_tol)[0]


def _x4_integrated(u: float, v: float) -> float:
    """int dx4 / sqrt(u^3 - x4) over max(-1, u^3 - v^-6) <= x4 <= min(1, u^3)."""
    cube = u ** 3
    low, high = max(-1.0, cube - v ** -6), min(1.0, cube)
    return 2 * (math.sqrt(max(cube - low, 0.0)) - math.sqrt(max(cube - high, 0.0)))


def _x4_integrated_tail(a: float, b: float) -> float:
    """int_a^b of the x4-integrated density for unclipped u >= TAIL_START, by its series in u^-3."""
    return 2 * (2 * (a ** -0.5 - b ** -0.5) + (2 / 13) / 8 * (a ** -6.5 - b ** -6.5))


def omega_infinity_pm(abs_tol: float = None) -> Tuple[float, float]:
    """(omega_inf+, omega_inf-) from their own integral forms; they add up to 12 tau_inf."""
    abs_tol = abs_tol or get_config('ABS_TOL')
    tol = abs_tol / 24

    def plus_inner(v):
        upper = math.inf if v == 0 else 1 / v
        head_end = min(upper, TAIL_START)
        clip = math.inf if v == 0 else (v ** -6 - 1) ** (1 / 3)
        value, _ = quadrature(lambda u: _x4_integrated(u, v), 0.0, head_end, tol / 2, points=(1.0, clip), limit=500)
        if upper > TAIL_START:
            value += _x4_integrated_tail(TAIL_START, upper)
        return value

    def minus_inner(v):
        cap = math.inf if v == 0 else v ** -3
        return quadrature(lambda u: min(math.sqrt(max(u ** 3 + 1, 0.0)), cap), -1.0, 0.0, tol / 2)[0]

    plus, _ = quadrature(plus_inner, 0.0, 1.0, tol / 2, points=(V_STAR, V_CLIP_ONE))
    minus, _ = quadrature(minus_inner, 0.0, 1.0, tol / 2)
    return 6 * plus, 12 * minus


def tau_infinity_monte_carlo(samples: int = None, seed: int = None) -> Tuple[float, float]:
    """Sampled tau_inf and its standard error.

    u in [-1, 1] is drawn directly; u in [1, 1/v] through u = w^-2 with w uniform in (0, 1].
    """
    samples = samples or get_config('MONTE_CARLO_SAMPLES')
    rng = np.random.default_rng(get_config('SEED') if seed is None else seed)
    total, total_sq, done = 0.0, 0.0, 0
    while done < samples:
        size = min(10 ** 6, samples - done)
        v = rng.random(size)
        u = 2 * rng.random(size) - 1
        w = 1 - rng.random(size)
        far = np.where(w * w >= v, 2 * w ** -3 * f_array(w ** -2, v), 0.0)
        values = 2 * f_array(u, v) + far
        total += float(values.sum())
        total_sq += float((values * values).sum())
        done += size
    mean = total / samples
    variance = max(total_sq / samples - mean * mean, 0.0)
    return mean, math.sqrt(variance / samples)


def euler_factor(p: int) -> float:
    return (1 - 1 / p) ** 6 * (1 + 6 / p + 1 / (p * p))


def tau_euler(prime_cutoff: int = None) -> Tuple[float, float]:
    """prod_{p <= cutoff} (1 - 1/p)^6 (1 + 6/p + 1/p^2) and a bound for |log(tau / partial)|.

    Every factor lies in (0, 1) and |log factor| <= 20/p^2, so the tail is at most 20/cutoff.
    """
    prime_cutoff = prime_cutoff or get_config('PRIME_CUTOFF')
    check_envelope('prime_cutoff', prime_cutoff, low=100)
    log_partial = math.fsum(math.log(euler_factor(p)) for p in primerange(2, prime_cutoff + 1))
    return math.exp(log_partial), 20 / prime_cutoff


def leading_constant(abs_tol: float = None, prime_cutoff: int = None) -> Tuple[float, float]:
    """tau_inf * tau / 28800 with the quadrature error and the Euler tail propagated."""
    t_inf, t_inf_err = tau_infinity_with_error(abs_tol)
    partial_product, tail = tau_euler(prime_cutoff)
    # tau lies in [partial * exp(-tail), partial]
    t_hat = partial_product * (1 + math.exp(-tail)) / 2
    t_err = partial_product * (1 - math.exp(-tail)) / 2
    value = t_inf * t_hat / ASSEMBLY
    return value, (t_inf_err * t_hat + t_inf * t_err) / ASSEMBLY


def constants_report(abs_tol: float = None, prime_cutoff: int = None, density_primes: Sequence[int] = (2, 3, 5),
                     density_work: int = 10 ** 6, threads: int = None) -> Dict:
    abs_tol = abs_tol or get_config('ABS_TOL')
    prime_cutoff = prime_cutoff or get_config('PRIME_CUTOFF')
    t_inf, t_inf_err = tau_infinity_with_error(abs_tol)
    plus, minus = omega_infinity_pm(abs_tol)
    tau, tail = tau_euler(prime_cutoff)
    constant, constant_err = leading_constant(abs_tol, prime_cutoff)
    densities = {}
    for p in density_primes:
        sequence = density_sequence(p, density_work, threads)
        if sequence:
            densities[str(p)] = sequence[-1].to_dict()
    report = dict(
        alpha=str(alpha_exact()),
        simplex_volume=str(simplex_volume()),
        beta=1,
        tau_infinity=dict(value=t_inf, error=t_inf_err),
        omega_infinity=dict(plus=plus, minus=minus, lower_lobe=lower_lobe()),
        tau=dict(value=tau, log_tail=tail, prime_cutoff=prime_cutoff),
        omega_p=densities,
        leading_constant=dict(value=constant, error=constant_err),
    )
    if get_config('BUILD_ID'):
        report['build_id'] = str(get_config('BUILD_ID'))
    return report

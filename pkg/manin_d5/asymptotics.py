"""Main terms of the count of points of bounded height, evaluated numerically.

The real density f(u, v) and its u-integral g(v) feed the B^{5/6}-scale main term
2 B^{5/6} sum_{n <= B} Delta(n) g((n/B)^{1/6}); the linear term (12/pi^2 + 2 beta) B is
fitted from exact counts or summed from phi_+ and phi_-.
"""
import math
from collections import Counter
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy import special
from scipy.interpolate import CubicSpline
from sympy import divisors

from manin_d5.arith import mu, omega, phi_dagger, phi_star, sqrt_roots_mod
from manin_d5.dirichlet import delta_table
from manin_d5.models import CountRecord
from manin_d5.settings import get_config, logger
from manin_d5.surface import count_U, height_histogram
from manin_d5.torsor import count_y3, outer_quads, outer_tuples, region_bounds, y1_range
from manin_d5.tools import EnvelopeError, FitError, check_envelope, geometric_grid, quadrature

SIX_OVER_PI2 = 6 / math.pi ** 2
# v at which the clipping curve sqrt(u^3 + 1) = v^-3 meets u = 1/v
V_STAR = ((1 + math.sqrt(5)) / 2) ** (-1 / 3)
# v at which the clipping curve crosses u = 1
V_CLIP_ONE = 2 ** (-1 / 6)
UEA_CONSTANT = 20
JUMP_BUDGET = 200_000


def _cap(v: float) -> float:
    return math.inf if v == 0 else v ** -3


def f(u: float, v: float) -> float:
    """min(sqrt(u^3 + 1), v^-3) - sqrt(max(u^3 - 1, 0))."""
    root_plus = math.sqrt(max(u ** 3 + 1, 0.0))
    cap = _cap(v)
    if u <= 1:
        return min(root_plus, cap)
    root_minus = math.sqrt(u ** 3 - 1)
    if root_plus <= cap:
        return 2 / (root_plus + root_minus)
    return cap - root_minus


def f_array(u, v):
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    with np.errstate(divide='ignore', invalid='ignore'):
        cube = u ** 3
        root_plus = np.sqrt(np.maximum(cube + 1, 0.0))
        root_minus = np.sqrt(np.maximum(cube - 1, 0.0))
        cap = np.where(v > 0, v ** -3.0, np.inf)
        unclipped = np.where(u > 1, 2 / (root_plus + root_minus), root_plus)
        return np.where(root_plus > cap, cap - root_minus, unclipped)


def f_prime_u(u: float, v: float) -> float:
    """Partial derivative of f in u, away from the kinks u = 1 and sqrt(u^3 + 1) = v^-3."""
    if u <= -1:
        return math.inf
    cube = u ** 3
    value = 0.0
    if math.sqrt(cube + 1) < _cap(v):
        value += 3 * u * u / (2 * math.sqrt(cube + 1))
    if u > 1:
        value -= 3 * u * u / (2 * math.sqrt(cube - 1))
    return value


def _tail_density(u: float) -> float:
    return 2 / (math.sqrt(u ** 3 + 1) + math.sqrt(u ** 3 - 1))


@lru_cache(maxsize=None)
def lower_lobe() -> float:
    """int_{-1}^0 sqrt(u^3 + 1) du = B(1/3, 3/2) / 3."""
    return float(special.beta(1 / 3, 1.5)) / 3


@lru_cache(maxsize=None)
def _middle() -> float:
    """int_0^1 sqrt(u^3 + 1) du."""
    return float(special.hyp2f1(-0.5, 1 / 3, 4 / 3, -1.0))


@lru_cache(maxsize=4096)
def _tail(a: float, abs_tol: float) -> Tuple[float, float]:
    """int_a^inf of sqrt(u^3 + 1) - sqrt(u^3 - 1), for a >= 1."""
    return quadrature(_tail_density, a, math.inf, abs_tol)


def g_with_error(v: float, abs_tol: float = None) -> Tuple[float, float]:
    """g(v) = int_{-1}^{1/v} f(u, v) du, split at u = 0, 1 and the clipping point."""
    if not 0 <= v <= 1:
        raise ValueError(f'g is defined on [0, 1], got v={v}')
    abs_tol = abs_tol or get_config('ABS_TOL')
    tol = abs_tol / 4
    upper = math.inf if v == 0 else 1 / v
    clip = math.inf if v == 0 else (v ** -6 - 1) ** (1 / 3)
    cap = _cap(v)
    value, error = lower_lobe(), 0.0

    if clip < 1:
        head, err = quadrature(lambda u: math.sqrt(u ** 3 + 1), 0.0, clip, tol)
        value += head + cap * (1 - clip)
        error += err
    else:
        value += _middle()

    def clipped(u):
        return cap - math.sqrt(max(u ** 3 - 1, 0.0))

    if clip <= 1:
        part, err = quadrature(clipped, 1.0, upper, tol)
    elif clip >= upper:
        total, err_total = _tail(1.0, tol)
        if math.isinf(upper):
            part, err = total, err_total
        else:
            rest, err_rest = _tail(upper, tol)
            part, err = total - rest, err_total + err_rest
    else:
        total, err_total = _tail(1.0, tol)
        rest, err_rest = _tail(clip, tol)
        tail_part, err_tail = quadrature(clipped, clip, upper, tol)
        part, err = total - rest + tail_part, err_total + err_rest + err_tail
    return value + part, error + err


def g(v: float, abs_tol: float = None) -> float:
    return g_with_error(v, abs_tol)[0]


def g_prime(v: float) -> float:
    """d/dv g(v) = -f(1/v, v)/v^2 - 3 v^-4 max(0, 1/v - u_clip)."""
    if not 0 < v <= 1:
        raise ValueError(f'g_prime needs 0 < v <= 1, got {v}')
    clip = (v ** -6 - 1) ** (1 / 3)
    return -f(1 / v, v) / v ** 2 - 3 * v ** -4 * max(0.0, 1 / v - clip)


@lru_cache(maxsize=4)
def g_spline(abs_tol: float = 1e-10) -> Tuple[CubicSpline, CubicSpline]:
    """Splines of s -> g(s^2) on [0, sqrt(V_STAR)] and [sqrt(V_STAR), 1]."""
    split = math.sqrt(V_STAR)
    pieces = []
    for lo, hi, nodes in ((0.0, split, 1025), (split, 1.0, 257)):
        s = np.linspace(lo, hi, nodes)
        pieces.append(CubicSpline(s, [g(x * x, abs_tol) for x in s]))
    logger.debug(f'built g splines at tolerance {abs_tol}')
    return pieces[0], pieces[1]


def g_values(v: np.ndarray, abs_tol: float = 1e-10) -> np.ndarray:
    left, right = g_spline(abs_tol)
    s = np.sqrt(np.asarray(v, dtype=float))
    return np.where(s <= math.sqrt(V_STAR), left(s), right(s))


def sigma(v: Sequence[int], y0: int, y1: int, y2: int) -> Fraction:
    v0, v1, v2, v3 = v
    if (mu(v0 * v2 * v3) == 0 or math.gcd(v2 * v3 * y0, y2) != 1 or math.gcd(v0 * v3, y0) != 1
            or math.gcd(y1, v0 * v1 * v2 * v3 * y0) != 1):
        return Fraction(0)
    total = Fraction(0)
    for k4 in divisors(v1 * v2):
        m = mu(k4)
        if m == 0 or math.gcd(k4, v0 * v3 * y2) != 1:
            continue
        q = k4 * v2 * y0 * y0
        target = v0 * y1 * pow(v3, -1, q) % q if q > 1 else 0
        total += Fraction(m * len(sqrt_roots_mod(target, q, require_coprime=True)), k4)
    return phi_star(v0 * y2) * total


def divisor_bound(v: Sequence[int], y0: int, y2: int) -> int:
    v0, v1, v2, v3 = v
    return 2 ** omega(v0 * y2) * 4 ** omega(v1 * v2 * y0)


def _in_region(B: int, v: Sequence[int], y0: int, y1: int, y2: int) -> bool:
    v0, v1, v2, v3 = v
    if v0 ** 4 * v1 ** 6 * v2 ** 5 * v3 ** 3 * y0 ** 4 * y2 ** 2 > B:
        return False
    if y1 * y1 * v0 * v0 * v1 * v1 * v2 * v3 * y2 * y2 > B:
        return False
    return y1 > 0 or -v0 * y1 ** 3 * y2 * y2 < B * v2 * y0 * y0


def s_exact_vs_main(v: Sequence[int], y0: int, y1: int, y2: int, B: int) -> Tuple[int, float, float]:
    """Exact number of (y3, y4) for fixed (v, y0, y1, y2) against Y3 f(y1/Y1, v1/V1) Sigma / (v2 y0^2)."""
    if not _in_region(B, v, y0, y1, y2):
        return 0, 0.0, 0.0
    exact = count_y3(B, v, y0, y1, y2)
    bounds = region_bounds(B, v, y0, y2)
    main = (bounds.Y3 * f(y1 / bounds.Y1, v[1] / bounds.V1) / (v[2] * y0 * y0)
            * float(sigma(v, y0, y1, y2)))
    return exact, main, exact - main


def admissible_tuples(B: int, count: int, seed: int = None) -> List[Tuple[Tuple[int, ...], int, int, int]]:
    """Random (v, y0, y1, y2) inside the counting region with all gcd gates satisfied."""
    rng = np.random.default_rng(get_config('SEED') if seed is None else seed)
    candidates = []
    for v0, v1, v2, v3, y0, y2 in outer_tuples(B):
        y1s = list(y1_range(B, v0, v1, v2, v3, y0, y2))
        if y1s:
            candidates.append(((v0, v1, v2, v3), y0, y2, y1s))
    if not candidates:
        return []
    picks = []
    for index in rng.integers(0, len(candidates), size=count):
        v, y0, y2, y1s = candidates[int(index)]
        picks.append((v, y0, y1s[int(rng.integers(0, len(y1s)))], y2))
    return picks


class _Kernel:
    """t -> sum over rho of the u-integral of w(u) r(c u / t^2; b rho^2), in closed form.

    Between consecutive jumps of psi((alpha u - a)/q) the sawtooth is linear in u, so the
    integral against w = W' reduces to values of W at the jumps and the first moment of w.
    """

    def __init__(self, sign: int, c: int, k1: int, q: int, b: int, transformed: bool = False):
        self.sign, self.c, self.k1, self.q = sign, c, k1, q
        self.transformed = transformed
        self.residues = Counter(b * rho * rho % q for rho in range(1, q + 1) if math.gcd(rho, q) == 1)
        self.total_variation = 1.0 if sign < 0 else 2 * math.sqrt(2) - 1

    def t_min(self) -> float:
        scale = len(self.residues) * self.c / (self.k1 * self.q * JUMP_BUDGET)
        return min(1.0, math.sqrt(scale) if self.sign < 0 else scale ** (1 / 3))

    def truncation(self, t_min: float) -> float:
        return sum(self.residues.values()) * self.total_variation * t_min ** 3 / 3

    def _shape(self, t: float):
        """(W, U, first moment, alpha) of the weight on the u- or w-axis."""
        if self.sign < 0:
            return (lambda u: 1 - np.sqrt(np.maximum(1 - u ** 3, 0.0))), 1.0, lower_lobe(), self.c / (t * t * self.k1)
        inner = g(t) - lower_lobe()
        if self.transformed:
            return ((lambda w: t * t * (f_array(w / t, t) - 1)), 1.0,
                    t * t * f(1 / t, t) - t ** 3 * inner, self.c / (t ** 3 * self.k1))
        return (lambda u: f_array(u, t) - 1), 1 / t, f(1 / t, t) / t - inner, self.c / (t * t * self.k1)

    def __call__(self, t: float) -> float:
        W, U, moment, alpha = self._shape(t)
        W_end = float(W(np.array([U]))[0])
        q = self.q
        total = 0.0
        for a, multiplicity in self.residues.items():
            first = 1 if a == 0 else 0
            last = math.ceil((alpha * U - a) / q) - 1
            jumps = (a + q * np.arange(first, max(first, last + 1), dtype=float)) / alpha
            jumps = jumps[jumps < U]
            steps = (0 if a == 0 else -1) + len(jumps)
            integral = alpha / q * moment - (a / q + 0.5) * W_end - steps * W_end + float(np.sum(W(jumps)))
            total += multiplicity * ((0.5 - a / q if a else -0.5) * W_end - integral)
        return total if self.transformed else t * t * total


def phi_pm_with_error(v: Sequence[int], y0: int, sign: int, abs_tol: float = None,
                      transformed: bool = False) -> Tuple[float, float]:
    v0, v1, v2, v3 = v
    if mu(v0 * v2 * v3) == 0 or math.gcd(v0 * v3, y0) != 1:
        raise ValueError(f'phi is defined for square-free v0*v2*v3 and gcd(v0*v3, y0) = 1, got v={v}, y0={y0}')
    if sign not in (1, -1):
        raise ValueError(f'sign must be +1 or -1, got {sign}')
    if transformed and sign < 0:
        raise ValueError('the w = t*u transform applies to the + part only')
    abs_tol = abs_tol or get_config('ABS_TOL')
    c = v0 * v1 * v1 * v2 * v2 * v3 * y0 * y0
    terms = []
    for k4 in divisors(v1 * v2):
        if mu(k4) == 0 or math.gcd(k4, v0 * v3) != 1:
            continue
        q = k4 * v2 * y0 * y0
        weight = mu(k4) * float(phi_dagger(k4 * v0 * v2 * v3 * y0)) / k4
        for k1 in divisors(v0 * v1 * v3):
            if mu(k1) == 0 or math.gcd(k1, q) != 1:
                continue
            b = sign * v3 * pow(k1 * v0, -1, q) % q if q > 1 else 0
            terms.append((weight * mu(k1), _Kernel(sign, c, k1, q, b, transformed)))
    share = abs_tol / (2 * len(terms))
    value, error = 0.0, 0.0
    for weight, kernel in terms:
        t_min = kernel.t_min()
        truncation = kernel.truncation(t_min)
        if truncation > share:
            logger.warning(f'phi truncation at t={t_min:.3g} contributes up to {truncation:.3g} > {share:.3g}')
        if t_min < 1:
            part, err = quadrature(kernel, t_min, 1.0, share, points=(V_STAR, V_CLIP_ONE), limit=500)
        else:
            part, err = 0.0, 0.0
        value += weight * part
        error += abs(weight) * (err + truncation)
    scale = 3 * SIX_OVER_PI2
    return scale * value, scale * error


def phi_pm(v: Sequence[int], y0: int, sign: int, abs_tol: float = None, transformed: bool = False) -> float:
    return phi_pm_with_error(v, y0, sign, abs_tol, transformed)[0]


def beta_pairs(height_cutoff: int) -> List[Tuple[Tuple[int, int, int, int], int]]:
    """(v, y0) with v0^4 v1^6 v2^5 v3^3 y0^4 <= cutoff, square-free v0 v2 v3 and gcd(v0 v3, y0) = 1."""
    pairs = []
    for v0, v1, v2, v3 in outer_quads(height_cutoff):
        base = v0 ** 4 * v1 ** 6 * v2 ** 5 * v3 ** 3
        y0 = 1
        while base * y0 ** 4 <= height_cutoff:
            if math.gcd(v0 * v3, y0) == 1:
                pairs.append(((v0, v1, v2, v3), y0))
            y0 += 1
    return pairs


def beta_tail(height_cutoff: int) -> float:
    """Rankin bound for the terms beyond the cutoff.

    Uses |phi| <= 20 (v2 y0^2)^0.55 2^{omega(v1 v2) + omega(v0 v1 v3)} and 2^omega <= number of divisors.
    """
    best = math.inf
    for delta in np.linspace(0.01, 0.22, 22):
        d = float(delta)
        product = (mpmath.zeta(2 - 4 * d) ** 2
                   * mpmath.zeta(3 - 6 * d) ** 4 / mpmath.zeta(6 - 12 * d)
                   * mpmath.zeta(2.45 - 5 * d) ** 2
                   * mpmath.zeta(2 - 3 * d) ** 2
                   * mpmath.zeta(1.9 - 4 * d))
        best = min(best, UEA_CONSTANT * float(product) * height_cutoff ** -d)
    return best


def beta_truncated(height_cutoff: int, abs_tol: float = 1e-6) -> Tuple[float, float]:
    check_envelope('height_cutoff', height_cutoff, low=1)
    pairs = beta_pairs(height_cutoff)
    per_term = abs_tol / (2 * len(pairs))
    value, error = 0.0, 0.0
    for v, y0 in pairs:
        v0, v1, v2, v3 = v
        denominator = v0 ** 2 * v1 ** 3 * v2 ** 3 * v3 ** 2 * y0 ** 3
        for sign in (-1, 1):
            part, err = phi_pm_with_error(v, y0, sign, per_term)
            value += part / denominator
            error += err / denominator
    logger.info(f'beta truncated at {height_cutoff}: {len(pairs)} terms, value {value:.6g}')
    return value, error + beta_tail(height_cutoff)


def main_sum(B: int, table=None, abs_tol: float = 1e-10) -> float:
    """sum_{n <= B} Delta(n) g((n/B)^{1/6})."""
    table = table if table is not None else delta_table(B)
    n = np.array([k for k in table.coefficients if k <= B], dtype=float)
    if not len(n):
        return 0.0
    values = np.array([table.value(int(k)) for k in n])
    return float(np.sum(values * g_values((n / B) ** (1 / 6), abs_tol)))


def main_term(B: int, table=None, abs_tol: float = 1e-10) -> float:
    return 2 * B ** (5 / 6) * main_sum(B, table, abs_tol)


def _exact_U(B: int, threads: int = None) -> int:
    method = CountRecord.METHODS.direct if B <= get_config('DIRECT_MAX_B') else CountRecord.METHODS.torsor
    return count_U(B, method, threads).count


def fit_linear_term(B_values: Sequence[float], residuals: Sequence[float],
                    min_span: float = 100) -> Tuple[float, float]:
    """Least-squares (slope, intercept) of residual against B."""
    x = np.asarray(B_values, dtype=float)
    y = np.asarray(residuals, dtype=float)
    if len(x) < 3 or x.min() <= 0:
        raise FitError(f'need at least three positive abscissae, got {list(B_values)}')
    if x.max() / x.min() < min_span:
        raise FitError(f'grid {x.min():g}..{x.max():g} spans less than a factor {min_span:g}')
    coefficients, _, rank, _, _ = np.polyfit(x, y, 1, full=True)
    if rank < 2:
        raise FitError('rank-deficient least-squares system')
    return float(coefficients[0]), float(coefficients[1])


def beta_empirical(B_grid: Sequence[int], exact_counts: Optional[Dict[int, int]] = None, threads: int = None,
                   abs_tol: float = 1e-10, min_span: float = 100) -> float:
    exact_counts = exact_counts or {}
    residuals = []
    largest = delta_table(max(B_grid))
    for B in B_grid:
        exact = exact_counts[B] if B in exact_counts else _exact_U(B, threads)
        residuals.append(exact - main_term(B, largest, abs_tol))
    slope, _ = fit_linear_term(B_grid, residuals, min_span)
    return (slope - 2 * SIX_OVER_PI2) / 2


@dataclass
class MainTermReport:
    B: int
    exact_count: int
    predictor: float
    residual: float
    beta_hat: float
    main_sum: float
    residual_exponent_estimate: Optional[float] = None

    def to_dict(self) -> Dict:
        return asdict(self)


def predictor(B: int, beta_hat: float = None, grid: Sequence[int] = None, threads: int = None,
              exact_count: int = None, abs_tol: float = 1e-10) -> MainTermReport:
    check_envelope('B', B, low=1)
    if beta_hat is None:
        beta_hat = beta_empirical(grid or geometric_grid(10 ** 3, 10 ** 5), threads=threads, abs_tol=abs_tol)
    total = main_sum(B, abs_tol=abs_tol)
    value = 2 * B ** (5 / 6) * total + (2 * SIX_OVER_PI2 + 2 * beta_hat) * B
    exact = _exact_U(B, threads) if exact_count is None else exact_count
    return MainTermReport(B=B, exact_count=exact, predictor=value, residual=exact - value,
                          beta_hat=beta_hat, main_sum=total)


def residual_exponent(reports: Iterable[MainTermReport]) -> float:
    """Slope of log|residual| against log B."""
    points = [(math.log(r.B), math.log(abs(r.residual))) for r in reports if r.residual]
    if len(points) < 2:
        raise FitError('need two nonzero residuals for an exponent')
    x, y = zip(*points)
    return float(np.polyfit(x, y, 1)[0])


def zeta_partial(s: float, B: int) -> float:
    """sum over points of U with H <= B of H^-s."""
    if s <= 1:
        raise EnvelopeError(f'the height zeta function needs s > 1, got {s}')
    return math.fsum(count * h ** -s for h, count in height_histogram(B).items())


def zeta_stieltjes(s: float, B: int) -> float:
    """s int_1^B t^{-s-1} N(t) dt + N(B) B^-s on the exact step function N."""
    if s <= 1:
        raise EnvelopeError(f'the height zeta function needs s > 1, got {s}')
    histogram = height_histogram(B)
    heights = list(histogram)
    terms, running = [], 0
    for i, h in enumerate(heights):
        running += histogram[h]
        nxt = heights[i + 1] if i + 1 < len(heights) else B
        terms.append(running * (h ** -s - nxt ** -s))
    return math.fsum(terms) + running * B ** -s


def g11(s: float, abs_tol: float = None) -> float:
    """12 s int_0^1 v^{6s-6} g(v) dv."""
    if s <= 5 / 6:
        raise EnvelopeError(f'G11 needs s > 5/6, got {s}')
    abs_tol = abs_tol or get_config('ABS_TOL')
    tol = abs_tol / (24 * s)
    value, _ = quadrature(lambda v: v ** (6 * s - 6) * g(v, tol) if v > 0 else 0.0, 0.0, 1.0, tol,
                          points=(V_STAR, V_CLIP_ONE), limit=500)
    return 12 * s * value


def g11_by_parts(s: float, abs_tol: float = None) -> float:
    """12 s/(6s - 5) (g(1) - int_0^1 v^{6s-5} g'(v) dv)."""
    if s <= 5 / 6:
        raise EnvelopeError(f'G11 needs s > 5/6, got {s}')
    abs_tol = abs_tol or get_config('ABS_TOL')
    factor = 12 * s / (6 * s - 5)
    tol = abs_tol / (2 * factor)
    value, _ = quadrature(lambda v: v ** (6 * s - 5) * g_prime(v) if v > 0 else 0.0, 0.0, 1.0, tol,
                          points=(V_STAR, V_CLIP_ONE), limit=500)
    return factor * (g(1.0, tol) - value)


__all__ = [
    'f', 'f_array', 'f_prime_u', 'g', 'g_with_error', 'g_prime', 'g_values', 'sigma', 's_exact_vs_main',
    'admissible_tuples', 'phi_pm', 'phi_pm_with_error', 'beta_truncated', 'beta_tail', 'beta_empirical',
    'fit_linear_term', 'predictor', 'MainTermReport', 'residual_exponent', 'zeta_partial', 'zeta_stieltjes',
    'g11', 'g11_by_parts', 'main_sum', 'main_term', 'divisor_bound',
]

"""Named check suites run by ``manage.py verify``.

Each suite returns a list of :class:`CheckResult`; a suite never raises for a failed
comparison, only for invalid parameters.
"""
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List

from sympy import primerange

from manin_d5 import asymptotics, constants, dirichlet, surface, torsor
from manin_d5.settings import get_config, logger
from manin_d5.tools import RunConfig, geometric_grid


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    details: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return asdict(self)


def torsor_bijection(cfg: RunConfig) -> List[CheckResult]:
    bounds = [cfg.B] if cfg.B else cfg.grid or [10, 10 ** 2, 10 ** 3, 10 ** 4]
    results = []
    for B in bounds:
        direct = surface.count_direct(B, cfg.threads)
        fast = torsor.count_torsor(B, cfg.threads)
        results.append(CheckResult('torsor-bijection', f'torsor-equals-direct-{B}', fast.count == direct.count,
                                   dict(B=B, torsor=fast.count, direct=direct.count)))
    B = bounds[-1]
    single = surface.count_direct(B, 1)
    results.append(CheckResult('torsor-bijection', 'thread-independence', single.count == direct.count,
                               dict(B=B, threads=direct.threads, single=single.count, parallel=direct.count)))
    lifts, bad = set(), []
    capped = min(B, 10 ** 4)
    for t in torsor.enumerate_torsor(capped):
        x = torsor.lift(t).x
        psi = torsor.psi_height(t)
        if x in lifts or psi != surface.height(x) or psi > capped or not all(torsor.region_checks(capped, t).values()):
            bad.append(str(t))
        lifts.add(x)
    expected = surface.count_direct(capped, cfg.threads).count
    results.append(CheckResult('torsor-bijection', 'bijection', not bad and len(lifts) == expected,
                               dict(B=capped, points=len(lifts), failures=bad[:10])))
    small = min(B, 200)
    broken = [x for x in surface.iter_direct_points(small) if torsor.lift(torsor.reduce_to_torsor(x)).x != x]
    results.append(CheckResult('torsor-bijection', 'round-trip', not broken, dict(B=small, failures=broken[:10])))
    return results


def degenerate_locus(cfg: RunConfig) -> List[CheckResult]:
    results = []
    for B in cfg.grid or [10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5]:
        degenerate = surface.count_degenerate(B).count
        ratio = abs(degenerate - 12 / math.pi ** 2 * B) / B ** (2 / 3)
        results.append(CheckResult('degenerate', f'degenerate-shape-{B}', ratio <= 10,
                                   dict(B=B, count=degenerate, ratio=ratio)))
    oracle_max = min(60, get_config('NAIVE_MAX_B'))
    mismatches = []
    for B in range(1, oracle_max + 1):
        naive = surface.count_naive(B).count
        composed = 2 * surface.count_direct(B, cfg.threads).count + surface.count_degenerate(B).count
        if naive != composed:
            mismatches.append(dict(B=B, naive=naive, composed=composed))
    results.append(CheckResult('degenerate', 'naive-oracle', not mismatches,
                               dict(max_B=oracle_max, mismatches=mismatches[:10])))
    return results


def local_factors(cfg: RunConfig) -> List[CheckResult]:
    pmax = cfg.pmax or 100
    worst = max(abs(dirichlet.local_factor_closed(p, 0.0) - (1 + 6 / p + 1 / p ** 2))
                for p in primerange(2, pmax + 1))
    results = [CheckResult('local-factors', 'closed-form-at-zero', worst <= 1e-12, dict(pmax=pmax, worst=worst))]
    cutoff = cfg.exponent_cutoff or get_config('EXPONENT_CUTOFF')
    for p in (2, 3, 5, 7):
        for s in (0.1, 0.25, 0.5):
            value, tail = dirichlet.local_factor_bruteforce(p, s, cutoff)
            closed = dirichlet.local_factor_closed(p, s)
            results.append(CheckResult('local-factors', f'series-{p}-{s}', abs(closed - value) <= tail + 1e-12,
                                       dict(p=p, s=s, series=value, closed=closed, tail=tail)))
    return results


def closing_identity(cfg: RunConfig) -> List[CheckResult]:
    pmax = cfg.pmax or 100
    worst = 0.0
    for p in primerange(2, pmax + 1):
        product = dirichlet.euler_local_factor(dirichlet.E2, p, 1.0) * dirichlet.g12_local(p)
        worst = max(worst, abs(product - constants.euler_factor(p)))
    decay = dirichlet.g12_decay()
    bounded = max(decay) <= dirichlet.G12_DECAY_BOUND and decay[-1] <= decay[0] / 10
    return [
        CheckResult('closing-identity', 'factor-by-factor', worst <= 1e-10, dict(pmax=pmax, worst=worst)),
        CheckResult('closing-identity', 'g12-decay', bounded, dict(per_decade=decay, bound=dirichlet.G12_DECAY_BOUND)),
    ]


def densities(cfg: RunConfig) -> List[CheckResult]:
    results = []
    for p in (2, 3, 5):
        sequence = constants.density_sequence(p, threads=cfg.threads)
        deviations = [report.deviation for report in sequence]
        decreasing = all(b < a for a, b in zip(deviations, deviations[1:]))
        results.append(CheckResult('densities', f'convergence-{p}', decreasing and deviations[-1] < 0.1,
                                   dict(p=p, deviations=deviations, counts=[r.raw_count for r in sequence])))
    for p, r in ((2, 1), (2, 2), (3, 1), (5, 1)):
        naive, structured = constants.omega_p_naive(p, r), constants.omega_p_bruteforce(p, r, cfg.threads)
        results.append(CheckResult('densities', f'naive-oracle-{p}^{r}', naive.raw_count == structured.raw_count,
                                   dict(naive=naive.raw_count, structured=structured.raw_count)))
    return results


def lattice(cfg: RunConfig) -> List[CheckResult]:
    volume, error = constants.alpha_monte_carlo(cfg.samples)
    exact = float(constants.simplex_volume())
    return [
        CheckResult('lattice', 'alpha', str(constants.alpha_exact()) == '1/345600',
                    dict(alpha=str(constants.alpha_exact()), volume=str(constants.simplex_volume()))),
        CheckResult('lattice', 'alpha-monte-carlo', abs(volume - exact) <= 5 * error,
                    dict(estimate=volume, standard_error=error)),
        CheckResult('lattice', 'adjunction', constants.verify_lattice(),
                    dict(failures=constants.lattice_failures(), degree=constants.D5_LATTICE.degree())),
    ]


def tau(cfg: RunConfig) -> List[CheckResult]:
    tol = cfg.abs_tol or 1e-6
    value, error = constants.tau_infinity_with_error(tol)
    mc, se = constants.tau_infinity_monte_carlo(cfg.samples)
    plus, minus = constants.omega_infinity_pm(tol)
    g11 = asymptotics.g11(1.0, tol)
    halved, _ = constants.tau_infinity_with_error(tol / 2)
    coarse, coarse_tail = constants.tau_euler(10 ** 4)
    fine, _ = constants.tau_euler(cfg.prime_cutoff or get_config('PRIME_CUTOFF'))
    return [
        CheckResult('tau', 'monte-carlo', abs(value - mc) <= 3 * se, dict(quadrature=value, monte_carlo=mc,
                                                                          standard_error=se)),
        CheckResult('tau', 'omega-split', abs(plus + minus - 12 * value) <= 2 * 12 * tol,
                    dict(plus=plus, minus=minus, twelve_tau=12 * value)),
        CheckResult('tau', 'g11-at-one', abs(g11 - 12 * value) <= 2 * 12 * tol, dict(g11=g11)),
        CheckResult('tau', 'self-consistency', abs(halved - value) <= max(error, tol), dict(halved=halved)),
        CheckResult('tau', 'euler-stability', 0 <= coarse - fine <= coarse * (1 - math.exp(-coarse_tail)),
                    dict(coarse=coarse, fine=fine, tail=coarse_tail)),
    ]


def y3y4_sum(cfg: RunConfig) -> List[CheckResult]:
    B = cfg.B or 10 ** 4
    worst, worst_tuple = 0.0, None
    for v, y0, y1, y2 in asymptotics.admissible_tuples(B, cfg.samples or 500):
        _, _, error = asymptotics.s_exact_vs_main(v, y0, y1, y2, B)
        normalized = abs(error) / asymptotics.divisor_bound(v, y0, y2)
        if normalized > worst:
            worst, worst_tuple = normalized, (v, y0, y1, y2)
    return [CheckResult('y3y4-sum', 'normalized-error', worst <= 10, dict(B=B, worst=worst, tuple=worst_tuple))]


def predictor(cfg: RunConfig) -> List[CheckResult]:
    grid = cfg.grid or geometric_grid(10 ** 3, 10 ** 5)
    exact = {B: surface.count_U(B, threads=cfg.threads).count for B in grid}
    beta_hat = asymptotics.beta_empirical(grid, exact)
    half = len(grid) // 2
    windows = [asymptotics.beta_empirical(grid[:half + 1], exact, min_span=5),
               asymptotics.beta_empirical(grid[half:], exact, min_span=5)]
    reports = [asymptotics.predictor(B, beta_hat, exact_count=exact[B]) for B in grid]
    exponent = asymptotics.residual_exponent(reports)
    scale = 2 * 6 / math.pi ** 2 + 2 * beta_hat
    drift = abs(windows[0] - windows[1]) * 2 / abs(scale)
    return [
        CheckResult('predictor', 'residual-exponent', exponent <= 0.9, dict(exponent=exponent, beta=beta_hat)),
        CheckResult('predictor', 'residual-size', all(abs(r.residual) <= 10 * r.B ** (5 / 6) for r in reports),
                    dict(reports=[r.to_dict() for r in reports])),
        CheckResult('predictor', 'window-drift', drift < 0.1, dict(windows=windows, drift=drift)),
    ]


SUITES: Dict[str, Callable[[RunConfig], List[CheckResult]]] = {
    'torsor-bijection': torsor_bijection,
    'degenerate': degenerate_locus,
    'local-factors': local_factors,
    'closing-identity': closing_identity,
    'densities': densities,
    'lattice': lattice,
    'tau': tau,
    'y3y4-sum': y3y4_sum,
    'predictor': predictor,
}


def run_suite(name: str, cfg: RunConfig) -> List[CheckResult]:
    results = SUITES[name](cfg)
    failed = [r.name for r in results if not r.passed]
    logger.info(f'suite {name}: {len(results) - len(failed)}/{len(results)} checks passed')
    return results

import logging
import math
import numpy as np

from scipy.optimize import minimize_scalar
from typing import Iterable, List, Optional, Tuple, Union

from exceptions import ArgumentError, ConsistencyError, DomainError, RangeError, SingularityError
from kernels.primes import factorize, is_prime
from kernels.summation import block_sum
from models.eigenvalue_table import EigenvalueTable
from models.euler import (DELTA_CEILING, GAMMA_LOWER, GAMMA_UPPER, AbScanRow, FourthMomentReport, GammaFactor,
                          HeckePowerResiduals, Lemma41Report, MainTermFactors, PartialEulerProduct)
from settings import settings

logger = logging.getLogger(__name__)

REFERENCE_AB = (-1 / 9, 1 / 36)
ArrayLike = Union[float, np.ndarray]

def satake_arrays(table: EigenvalueTable, primes: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    lam = table.values[primes]
    root = np.sqrt(lam * lam - 4.0 + 0j)
    return (lam + root) / 2, (lam - root) / 2

def _sym_power_factors(table: EigenvalueTable, m: int, primes: np.ndarray) -> np.ndarray:
    """prod_{j=0}^m (1 - alpha^(m-j) beta^j / p) per prime, real part after the conjugate-pairing check."""
    alpha, beta = satake_arrays(table, primes)
    factors = np.ones(primes.size, dtype=np.complex128)
    for j in range(m + 1):
        factors *= 1.0 - alpha ** (m - j) * beta ** j / primes
    if primes.size and np.abs(factors.imag).max() > 1e-9:
        raise ConsistencyError(f"Euler factors of sym^{m} are not real")
    if np.any(factors.real == 0):
        raise SingularityError(f"Vanishing local factor in L_{m}")
    return factors.real

def partial_sym_power(table: EigenvalueTable, m: int, z: float) -> PartialEulerProduct:
    """L_m(u, z) = prod_{p <= z} prod_{j=0}^m (1 - alpha^(m-j) beta^j / p)^-1, accumulated in log space."""
    if not 1 <= m <= 8:
        raise ArgumentError(f"Symmetric power must be in 1..8, got {m}")
    if z > table.limit:
        raise RangeError(f"Cutoff {z} exceeds table limit {table.limit}")
    primes = table.primes(z) if z >= 2 else np.array([], dtype=np.int64)
    factors = _sym_power_factors(table, m, primes)
    if np.any(factors <= 0):
        raise SingularityError(f"Non-positive local factor in L_{m}")
    log_value = -block_sum(np.log(factors))
    return PartialEulerProduct(power=m, cutoff=z, value=math.exp(log_value), log_value=log_value,
                               prime_count=int(primes.size))

def _m_product(table: EigenvalueTable, z: float) -> float:
    primes = table.primes(z)
    deviation = (1.0 - np.abs(table.values[primes])) ** 2 / primes
    if np.any(deviation >= 1):
        raise ConsistencyError("A factor 1 - (1 - |lambda(p)|)^2/p is not positive")
    return math.exp(block_sum(np.log1p(-deviation)))

def sieve_cutoff(x: float, c: Optional[float] = None) -> float:
    """z = x^(1/(c log log x))."""
    c = settings.z_constant if c is None else c
    if c <= 0:
        raise ArgumentError(f"c must be positive, got {c}")
    if x < 16:
        raise ArgumentError(f"x must be at least 16, got {x}")
    return math.exp(math.log(x) / (c * math.log(math.log(x))))

def M_factor(table: EigenvalueTable, x: float, c: Optional[float] = None,
             gamma: Optional[GammaFactor] = None) -> MainTermFactors:
    c = settings.z_constant if c is None else c
    z = sieve_cutoff(x, c)
    if z < 2:
        raise RangeError(f"Degenerate sieve range: z = {z} < 2 at x = {x}, c = {c}")
    if z > table.limit:
        raise RangeError(f"z = {z} exceeds table limit {table.limit}")
    gamma = gamma or gamma_u(table)
    return MainTermFactors(x=x, c=c, z=z, M=_m_product(table, z), gamma_u=gamma.value, theta=gamma.value)

def poly_inequality_margin(a: float, b: float, y: ArrayLike) -> ArrayLike:
    """1 + (y^2-1)/2 + a (y^2-1)^2 + b (y^2-1)^3 - |y|."""
    t = np.asarray(y, dtype=np.float64) ** 2 - 1.0
    margin = 1.0 + t / 2 + a * t ** 2 + b * t ** 3 - np.abs(y)
    return float(margin) if np.ndim(margin) == 0 else margin

def ems_inequality_margin(y: ArrayLike) -> ArrayLike:
    """17/18 + (11/18)(y^2-1) - (1/18)(y^4-2) - |y| on |y| <= 2."""
    y = np.asarray(y, dtype=np.float64)
    if np.any(np.abs(y) > 2):
        raise DomainError("The inequality holds only for |y| <= 2")
    margin = 17 / 18 + 11 / 18 * (y ** 2 - 1) - (y ** 4 - 2) / 18 - np.abs(y)
    return float(margin) if np.ndim(margin) == 0 else margin

def _prime_power_values(table: EigenvalueTable, p: int, k_max: int) -> Tuple[List[float], bool]:
    """lambda(p^k) for k = 0..k_max; from the table while p^k <= limit, by the Hecke recursion beyond."""
    table.require(p, "prime powers")
    values = [1.0, table(p)]
    extended = False
    for k in range(2, k_max + 1):
        if p ** k <= table.limit:
            values.append(table(p ** k))
        else:
            values.append(values[1] * values[k - 1] - values[k - 2])
            extended = True
    return values, extended

def hecke_power_residuals(table: EigenvalueTable, p: int) -> HeckePowerResiduals:
    if not is_prime(p):
        raise ArgumentError(f"{p} is not prime")
    if p > table.limit:
        raise RangeError(f"Prime {p} exceeds table limit {table.limit}")
    lam, extended = _prime_power_values(table, p, 6)
    r2 = lam[1] ** 2 - 1 - lam[2]
    r4 = lam[1] ** 4 - 2 - lam[4] - 3 * lam[2]
    r6 = lam[1] ** 6 - 5 - lam[6] - 5 * lam[4] - 9 * lam[2]
    return HeckePowerResiduals(p=p, r2=r2, r4=r4, r6=r6, extended=extended)

def prime_margins(lam: np.ndarray) -> np.ndarray:
    """[-3/18 + (11/18)(l^2-1) - (7/18)(l^4-2) + (1/18)(l^6-5)] + (1 - |l|)^2 per prime."""
    polynomial = -3 / 18 + 11 / 18 * (lam ** 2 - 1) - 7 / 18 * (lam ** 4 - 2) + (lam ** 6 - 5) / 18
    return polynomial + (1.0 - np.abs(lam)) ** 2

def lemma41_check(table: EigenvalueTable, z: float) -> Lemma41Report:
    if z < 2 or z > table.limit:
        raise RangeError(f"Cutoff {z} must lie in [2, {table.limit}]")
    l2, l4, l6 = (partial_sym_power(table, m, z).log_value for m in (2, 4, 6))
    log_bound = (l6 - l2 - 2 * l4 - 3 * math.log(math.log(z))) / 18
    margins = prime_margins(table.values[table.primes(z)])
    return Lemma41Report(z=z, M=_m_product(table, z), bound=math.exp(log_bound), min_prime_margin=float(margins.min()),
                         L2=math.exp(l2), L4=math.exp(l4), L6=math.exp(l6))

def lemma41_trend(table: EigenvalueTable, zs: Iterable[float]) -> List[Lemma41Report]:
    return [lemma41_check(table, z) for z in zs]

def gamma_u(table: EigenvalueTable, prime_cutoff: Optional[int] = None) -> GammaFactor:
    """Truncated product for gamma_u(1) with the tail estimate sum_{p > cutoff} 2/p^2."""
    if prime_cutoff is None:
        prime_cutoff = min(settings.gamma_cutoff, table.limit)
    if prime_cutoff > table.limit:
        raise RangeError(f"Cutoff {prime_cutoff} exceeds table limit {table.limit}")
    primes = table.primes(prime_cutoff).astype(np.float64)
    t = table.values[primes.astype(np.int64)] ** 2
    p = primes
    small = (p == 2) | (p == 3)
    factors = np.where(
        small,
        1 - (p ** 2 + p - (2 * p ** 2 - p - 1) * t + (p ** 2 - p) * t ** 2) / (p ** 4 * (1 + 1 / p)),
        1 + (2 * p * t - p - 1) / (p ** 3 * (1 - t / p) * (1 + 1 / p)))
    if np.any(factors <= 0):
        raise ConsistencyError("Non-positive gamma_u factor")
    value = math.exp(block_sum(np.log(factors)))
    if not GAMMA_LOWER < value < GAMMA_UPPER:
        raise ConsistencyError(f"gamma_u = {value} outside ({GAMMA_LOWER}, {GAMMA_UPPER})")
    # sum_{p > P} 2/p^2 <= 2/P
    tail = 2.0 / max(prime_cutoff, 1)
    return GammaFactor(value=value, cutoff=prime_cutoff, tail_estimate=tail)

def theta_factor(table: EigenvalueTable, q: int, gamma: Optional[GammaFactor] = None) -> float:
    """gamma_u prod_{p | q, p | 6} (1 + lambda^2(p)/p)^-1 prod_{p | q, p not | 6} (1 - lambda^2(p)/p)."""
    if q < 1:
        raise ArgumentError(f"q must be positive, got {q}")
    gamma = gamma or gamma_u(table)
    value = gamma.value
    for p in factorize(q):
        table.require(p, "theta factor")
        t = table(p) ** 2
        value *= 1 / (1 + t / p) if 6 % p == 0 else 1 - t / p
    return value

def fourth_moment_check(table: EigenvalueTable, x: float) -> FourthMomentReport:
    """sum_{n<=x} lambda^4(n) against x (log x)^2 L_4(u, x) L_2(u, x)^3."""
    n = int(math.floor(x))
    table.require(n, "fourth moment")
    total = block_sum(table.values[1:n + 1] ** 4)
    if x < 2:
        return FourthMomentReport(x=x, sum=total, bound=0.0, ratio=None)
    log_bound = (math.log(x) + 2 * math.log(math.log(x)) + partial_sym_power(table, 4, x).log_value
                 + 3 * partial_sym_power(table, 2, x).log_value)
    bound = math.exp(log_bound)
    return FourthMomentReport(x=x, sum=total, bound=bound, ratio=total / bound)

def rankin_selberg_local_check(table: EigenvalueTable, z: float, terms: int = 80) -> float:
    """max_p relative gap between sum_k lambda(p^k)^2 p^-k and zeta_p(1) L_p(sym^2, 1) / zeta_p(2)."""
    primes = table.primes(z)
    worst = 0.0
    sym2 = _sym_power_factors(table, 2, primes)
    for p, sym2_factor in zip(primes, sym2):
        lam, _ = _prime_power_values(table, int(p), terms)
        series = math.fsum(value ** 2 * float(p) ** -k for k, value in enumerate(lam))
        closed = (1 - 1 / p ** 2) / ((1 - 1 / p) * sym2_factor)
        worst = max(worst, abs(series - closed) / closed)
    return worst

def _b_interval(a: float, y_above: np.ndarray, y_below: np.ndarray) -> Tuple[float, float]:
    """Admissible b for fixed a: b >= -f/t^3 where |y| > 1, b <= f/(-t^3) where |y| < 1."""
    def f(y: np.ndarray) -> np.ndarray:
        t = y ** 2 - 1
        return 1 + t / 2 + a * t ** 2 - np.abs(y)
    t_above = y_above ** 2 - 1
    t_below = y_below ** 2 - 1
    lower_curve = -f(y_above) / t_above ** 3
    i = int(np.argmax(lower_curve))
    lo, hi = y_above[max(i - 1, 0)], y_above[min(i + 1, y_above.size - 1)]
    refined = minimize_scalar(lambda y: float(f(np.array(y)) / (y ** 2 - 1) ** 3), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
    b_lo = max(float(lower_curve[i]), -float(refined.fun))
    b_hi = float(np.min(f(y_below) / -t_below ** 3))
    return b_lo, b_hi

def _y_grids() -> Tuple[np.ndarray, np.ndarray]:
    above = np.concatenate((np.linspace(1.001, 4.0, 30000), np.geomspace(4.0, 1e3, 2000)))
    below = np.linspace(0.0, 0.999, 10000)
    return above, below

def _admissible(a: float, b: float) -> bool:
    grid = np.concatenate((np.arange(-4.0, 4.0 + 1e-4, 1e-4), [-1e3, 1e3]))
    return bool(np.min(poly_inequality_margin(a, b, grid)) >= -1e-12)

def ab_scan(a_grid: Optional[Iterable[float]] = None) -> List[AbScanRow]:
    """Scan a, take the smallest admissible b, and report delta = -2(a + b).

    The reference choice (-1/9, 1/36) is always the first row; the last row is the refined optimum.
    """
    above, below = _y_grids()
    a_values = list(a_grid) if a_grid is not None else list(np.linspace(-1 / 8, 0.0, 9))
    reference_a, reference_b = REFERENCE_AB
    ref_lo, ref_hi = _b_interval(reference_a, above, below)
    rows = [AbScanRow(a=reference_a, b_lo=ref_lo, b_hi=ref_hi, b=reference_b, delta=-2 * (reference_a + reference_b),
                      admissible=_admissible(reference_a, reference_b), label="reference")]
    for a in a_values:
        if a < -1 / 8:
            rows.append(AbScanRow(a=a, b_lo=math.inf, b_hi=-math.inf, b=math.nan, delta=math.nan, admissible=False))
            continue
        b_lo, b_hi = _b_interval(a, above, below)
        rows.append(AbScanRow(a=a, b_lo=b_lo, b_hi=b_hi, b=b_lo, delta=-2 * (a + b_lo),
                              admissible=b_lo <= b_hi and _admissible(a, b_lo + 1e-12)))
    best = minimize_scalar(lambda a: a + _b_interval(a, above, below)[0], bounds=(-1 / 8, 0.0), method="bounded",
                           options={"xatol": 1e-10})
    best_a = float(best.x)
    b_lo, b_hi = _b_interval(best_a, above, below)
    rows.append(AbScanRow(a=best_a, b_lo=b_lo, b_hi=b_hi, b=b_lo, delta=-2 * (best_a + b_lo),
                          admissible=b_lo <= b_hi and _admissible(best_a, b_lo + 1e-12), label="optimum"))
    logger.info(f"(a, b) scan optimum delta = {rows[-1].delta:.6f}, ceiling {DELTA_CEILING:.6f}")
    return rows

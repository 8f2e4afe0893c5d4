import logging
import math
import numpy as np

from sympy import divisors
from typing import Dict, Iterable, List, Optional

from engines.eulerprod import M_factor, gamma_u, sieve_cutoff, theta_factor
from engines.sieveweights import (bilinear_G, density_g_double_prime, density_g_prime, linear_sieve_weights,
                                  make_context, theoremA_bound)
from exceptions import ArgumentError, RangeError
from kernels.primes import euler_phi, factorize, primes_up_to
from kernels.summation import block_sum
from models.eigenvalue_table import EigenvalueTable
from models.euler import ZETA2, GammaFactor
from models.shifted import (DecayRow, EtaFunction, PartitionSums, ProgressionSum, RankinSelbergCalibration,
                            SmoothSplit, SquareFullRemainder, Theorem1Row)
from models.sieve import SieveBoundReport
from settings import settings

logger = logging.getLogger(__name__)

def smooth_split(n: int, z: float) -> SmoothSplit:
    """n = a b with a z-smooth and b free of primes <= z."""
    if n < 1:
        raise ArgumentError(f"n must be positive, got {n}")
    a = math.prod(p ** k for p, k in factorize(n).items() if p <= z) if n > 1 else 1
    return SmoothSplit(n=n, z=z, a=a, b=n // a)

def smooth_parts(limit: int, z: float) -> np.ndarray:
    """z-smooth part of every n <= limit; entry 0 is 1."""
    parts = np.ones(limit + 1, dtype=np.int64)
    for p in primes_up_to(min(z, limit)):
        power = int(p)
        while power <= limit:
            parts[power::power] *= int(p)
            power *= int(p)
    return parts

def _check_shift(table: EigenvalueTable, ell: int, x: float) -> int:
    if ell == 0:
        raise ArgumentError("The shift must be non-zero")
    n = int(math.floor(x))
    if n < 1:
        raise ArgumentError(f"x must be at least 1, got {x}")
    if max(n + ell, abs(ell)) > table.limit:
        raise RangeError(f"Shift sum to {x} with shift {ell} needs a table to {max(n + ell, abs(ell))}")
    return n

def shifted_terms(table: EigenvalueTable, ell: int, x: float) -> np.ndarray:
    """|lambda(n) lambda(n + l)| for n = 1..x, with lambda(0) = 0 and lambda(-m) = lambda(m)."""
    n = _check_shift(table, ell, x)
    indices = np.arange(1, n + 1, dtype=np.int64)
    return np.abs(table.values[1:n + 1] * table.at(indices + ell))

def shifted_sum(table: EigenvalueTable, ell: int, x: float) -> float:
    """S_l(x) = sum_{n <= x} |lambda(n) lambda(n + l)|."""
    return block_sum(shifted_terms(table, ell, x))

def eta_value(etafn: EtaFunction, n: int) -> float:
    if n < 1:
        raise ArgumentError(f"eta is defined on positive integers, got {n}")
    if n <= etafn.limit:
        return float(etafn.values[n])
    value = 1.0
    for p, k in factorize(n).items():
        etafn.table.require(p, "eta")
        value *= etafn.table(p) ** (2 if p in (2, 3) else 2 * k)
    return value

def partition_sums(table: EigenvalueTable, ell: int, x: float, z: float,
                   cutoff: Optional[float] = None) -> PartitionSums:
    """Split S_l(x) by the z-smooth parts a of n and a_l of n + l against x^cutoff.

    Terms with both parts large are counted in S_A and in S_Al.
    """
    cutoff = settings.cutoff_exponent if cutoff is None else cutoff
    terms = shifted_terms(table, ell, x)
    n = terms.size
    parts = smooth_parts(n + abs(ell), z)
    a = parts[1:n + 1]
    a_l = parts[np.abs(np.arange(1, n + 1) + ell)]
    threshold = x ** cutoff
    large, large_l = a > threshold, a_l > threshold
    return PartitionSums(ell=ell, x=x, z=z, cutoff=cutoff, S_total=block_sum(terms), S_A=block_sum(terms[large]),
                         S_Al=block_sum(terms[large_l]), S_star=block_sum(terms[~large & ~large_l]))

def gcd_split(table: EigenvalueTable, ell: int, x: float, z: float, cutoff: Optional[float] = None) -> Dict[int, float]:
    """S_star grouped by v = gcd(a, a_l); every v divides l."""
    cutoff = settings.cutoff_exponent if cutoff is None else cutoff
    terms = shifted_terms(table, ell, x)
    n = terms.size
    parts = smooth_parts(n + abs(ell), z)
    a = parts[1:n + 1]
    a_l = parts[np.abs(np.arange(1, n + 1) + ell)]
    threshold = x ** cutoff
    star = (a <= threshold) & (a_l <= threshold)
    v = np.gcd(a, a_l)
    return {d: block_sum(terms[star & (v == d)]) for d in divisors(abs(ell))}

def _check_pair(a: int, a_l: int, z: float) -> None:
    if a < 1 or a_l < 1 or math.gcd(a, a_l) != 1:
        raise ArgumentError(f"Need coprime positive (a, a_l), got ({a}, {a_l})")
    if any(p > z for p in factorize(a * a_l)):
        raise ArgumentError(f"a = {a} and a_l = {a_l} must be {z}-smooth")

def _shifted_line(a: int, a_l: int, ell: int, x: float):
    """b <= x/a on the line a_l b_l = a b + l, with b_l for each b."""
    b = np.arange(1, int(math.floor(x / a)) + 1, dtype=np.int64)
    m = a * b + ell
    on_line = (m > 0) & (m % a_l == 0)
    return b[on_line], m[on_line] // a_l

def sifting_sum(table: EigenvalueTable, a: int, a_l: int, ell: int, x: float, z: float,
                etafn: Optional[EtaFunction] = None) -> float:
    """sum of eta(b) over b <= x/a with a_l b_l = a b + l and (b b_l, P_{6l}(z)) = 1."""
    _check_pair(a, a_l, z)
    etafn = etafn or EtaFunction.create(table)
    b, b_l = _shifted_line(a, a_l, ell, x)
    keep = np.ones(b.size, dtype=bool)
    for p in make_context(z, 6 * ell).primes:
        keep &= (b % p != 0) & (b_l % p != 0)
    b = b[keep]
    if b.size and int(b.max()) > etafn.limit:
        raise RangeError(f"eta needed up to {int(b.max())}, table ends at {etafn.limit}")
    return block_sum(etafn.values[b])

def calibrate_rankin_selberg(table: EigenvalueTable, x0: Optional[int] = None,
                             etafn: Optional[EtaFunction] = None,
                             gamma: Optional[GammaFactor] = None) -> RankinSelbergCalibration:
    """L_hat = zeta(2) (sum_{n <= X0} eta(n)) / (gamma_u X0), next to the raw zeta(2) mean of lambda^2."""
    x0 = min(x0 or settings.calibration_limit, table.limit)
    etafn = etafn or EtaFunction.create(table)
    gamma = gamma or gamma_u(table)
    eta_mean = block_sum(etafn.values[1:x0 + 1]) / x0
    raw = ZETA2 * block_sum(table.values[1:x0 + 1] ** 2) / x0
    calibration = RankinSelbergCalibration(x0=x0, L_hat=ZETA2 * eta_mean / gamma.value, raw=raw,
                                           gamma_u=gamma.value, eta_mean=eta_mean)
    logger.info(f"Rankin-Selberg calibration at X0 = {x0}: L_hat = {calibration.L_hat:.8f}")
    return calibration

def progression_sum(table: EigenvalueTable, a: int, a_l: int, d: int, d_l: int, ell: int, x: float,
                    calibration: RankinSelbergCalibration, etafn: Optional[EtaFunction] = None,
                    gamma: Optional[GammaFactor] = None) -> ProgressionSum:
    """A = sum eta(dc) over c <= x/(ad) with a_l d_l c_l = a d c + l, against its main term."""
    ad, q = a * d, a_l * d_l
    if min(a, a_l, d, d_l) < 1 or math.gcd(ad, q) != 1:
        raise ArgumentError(f"Need (ad, a_l d_l) = 1, got ad = {ad}, a_l d_l = {q}")
    etafn = etafn or EtaFunction.create(table)
    common = dict(a=a, a_l=a_l, d=d, d_l=d_l, ell=ell, x=x, modulus=q)
    if math.gcd(q, ell) != 1:
        return ProgressionSum(**common, solvable=False, A=0.0, main=0.0, error=0.0)
    residue = (-ell * pow(ad, -1, q)) % q if q > 1 else 0
    first = residue if residue > 0 else q
    c = np.arange(first, int(math.floor(x / ad)) + 1, q, dtype=np.int64)
    if c.size and int(d * c.max()) > etafn.limit:
        raise RangeError(f"eta needed up to {int(d * c.max())}, table ends at {etafn.limit}")
    total = block_sum(etafn.values[d * c])
    theta = theta_factor(table, q, gamma)
    main = theta / ZETA2 * calibration.L_hat * table(d) ** 2 / euler_phi(q) * x / ad
    return ProgressionSum(**common, residue=residue, solvable=True, A=total, main=main, error=total - main)

def theorem1_decay_table(table: EigenvalueTable, ell: int, xs: Iterable[float],
                         exponent: Optional[float] = None) -> List[DecayRow]:
    exponent = settings.decay_exponent if exponent is None else exponent
    xs = sorted(xs)
    terms = shifted_terms(table, ell, xs[-1])
    rows = []
    for x in xs:
        s = block_sum(terms[:int(math.floor(x))])
        rows.append(DecayRow(ell=ell, x=x, S=s, S_over_x=s / x, S_norm=s * math.log(x) ** exponent / x))
    return rows

def decay_slope(rows: List[DecayRow]) -> float:
    """Least-squares slope of log(S/x) against log log x; minus the empirical decay exponent."""
    if len(rows) < 2:
        raise ArgumentError("A slope needs at least two rows")
    loglog = np.log(np.log([row.x for row in rows]))
    return float(np.polyfit(loglog, np.log([row.S_over_x for row in rows]), 1)[0])

def lemma13_ratio(table: EigenvalueTable, ell: int, x: float, c: Optional[float],
                  calibration: RankinSelbergCalibration, gamma: Optional[GammaFactor] = None) -> float:
    """S_l(x) / (x L_hat M_u(x))."""
    factors = M_factor(table, x, c, gamma)
    return shifted_sum(table, ell, x) / (x * calibration.L_hat * factors.M)

def square_full_remainder(table: EigenvalueTable, a: int, a_l: int, ell: int, x: float, z: float,
                          coprime: bool = False) -> SquareFullRemainder:
    """sum of lambda^2(b) over b <= x/a on the shifted line with p^2 | b for some prime p > z.

    With coprime=True the sum also keeps (b b_l, P(z)) = 1.
    """
    _check_pair(a, a_l, z)
    b, b_l = _shifted_line(a, a_l, ell, x)
    limit = int(math.floor(x / a))
    table.require(limit, "square-full remainder")
    square_full = np.zeros(limit + 1, dtype=bool)
    for p in primes_up_to(math.isqrt(limit)):
        if p > z:
            square_full[int(p) ** 2::int(p) ** 2] = True
    keep = square_full[b]
    if coprime:
        for p in primes_up_to(z):
            keep &= (b % p != 0) & (b_l % p != 0)
    value = block_sum(table.values[b[keep]] ** 2)
    return SquareFullRemainder(a=a, a_l=a_l, ell=ell, x=x, z=z, value=value, coprime=coprime)

def sieve_bound(table: EigenvalueTable, a: int, a_l: int, ell: int, x: float, z: float, level: float,
                calibration: RankinSelbergCalibration, etafn: Optional[EtaFunction] = None,
                gamma: Optional[GammaFactor] = None) -> SieveBoundReport:
    """Sifting sum against X G'*G'' and X C V' V'', X = theta(a_l)/zeta(2) L_hat x/(a phi(a_l))."""
    context = make_context(z, 6 * ell)
    g_prime = density_g_prime(table, context, a_l)
    g_double_prime = density_g_double_prime(table, context, a, a_l)
    weights = linear_sieve_weights(context, level)
    bilinear = bilinear_G(weights, weights, g_prime, g_double_prime)
    factors = theoremA_bound(context, g_prime, g_double_prime, level, level)
    scale = theta_factor(table, a_l, gamma) / ZETA2 * calibration.L_hat * x / (a * euler_phi(a_l))
    sifted = sifting_sum(table, a, a_l, ell, x, z, etafn)
    upper = scale * bilinear
    return SieveBoundReport(a=a, a_l=a_l, ell=ell, x=x, z=z, level=level, sifting_sum=sifted, main_scale=scale,
                            bilinear=bilinear, theorem_a=factors, sieve_upper=upper,
                            theorem_a_upper=scale * factors.product, ratio=sifted / upper if upper > 0 else None)

def theorem1_experiment(table: EigenvalueTable, ells: Iterable[int], xs: Iterable[float], c: Optional[float],
                        calibration: RankinSelbergCalibration, z: Optional[float] = None,
                        cutoff: Optional[float] = None, gamma: Optional[GammaFactor] = None) -> List[Theorem1Row]:
    """Decay table, partition sums and S / (x L M) ratios for every (l, x)."""
    gamma = gamma or gamma_u(table)
    exponent = settings.decay_exponent
    rows = []
    for ell in ells:
        for x in sorted(xs):
            cut = z if z is not None else sieve_cutoff(x, c)
            parts = partition_sums(table, ell, x, cut, cutoff)
            factors = M_factor(table, x, c, gamma)
            rows.append(Theorem1Row(ell=ell, x=x, z=cut, S=parts.S_total, S_over_x=parts.S_total / x,
                                    S_norm=parts.S_total * math.log(x) ** exponent / x, S_A=parts.S_A,
                                    S_Al=parts.S_Al, S_star=parts.S_star, M=factors.M,
                                    lemma13_ratio=parts.S_total / (x * calibration.L_hat * factors.M)))
    return rows

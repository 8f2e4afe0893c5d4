import math
import numpy as np

from typing import Iterator, List

from exceptions import ArgumentError
from kernels.primes import primes_up_to
from kernels.summation import log_product
from models.smooth_count import RoughCount, SmoothCount

SEGMENT = 1 << 20

def _check_domain(x: float, z: float) -> None:
    if x < 1 or z < 2:
        raise ArgumentError(f"Smooth counting needs x >= 1 and z >= 2, got x={x}, z={z}")

def smooth_numbers(x: float, z: float) -> Iterator[int]:
    """All z-smooth n <= x by depth-first search over prime-power products (unordered)."""
    primes: List[int] = [int(p) for p in primes_up_to(min(z, x))]
    limit = int(math.floor(x))
    stack = [(1, 0)]
    while stack:
        value, index = stack.pop()
        yield value
        for i in range(index, len(primes)):
            multiple = value * primes[i]
            if multiple > limit:
                break
            stack.append((multiple, i))

def smooth_count(x: float, z: float) -> int:
    _check_domain(x, z)
    if z >= x:
        return int(math.floor(x))
    return sum(1 for _ in smooth_numbers(x, z))

def rankin_alpha_bound(x: float, z: float, alpha: float) -> float:
    """x^alpha prod_{p<=z} (1 - p^-alpha)^-1, a majorant of Phi(x, z) for 0 < alpha <= 1."""
    if not 0 < alpha <= 1:
        raise ArgumentError(f"Rankin exponent must lie in (0, 1], got {alpha}")
    primes = primes_up_to(z).astype(np.float64)
    return math.exp(alpha * math.log(x) - log_product(1.0 - primes ** -alpha))

def smooth_count_report(x: float, z: float, alpha: float) -> SmoothCount:
    return SmoothCount(x=x, z=z, count=smooth_count(x, z), alpha=alpha, bound=rankin_alpha_bound(x, z, alpha))

def rough_count(x: float, z: float) -> RoughCount:
    """Psi(x, z): n <= x coprime to P(z), with the Legendre main term and error bound 2^pi(z)."""
    _check_domain(x, z)
    limit = int(math.floor(x))
    primes = primes_up_to(z)
    count = 0
    for low in range(1, limit + 1, SEGMENT):
        high = min(low + SEGMENT, limit + 1)
        coprime = np.ones(high - low, dtype=bool)
        for p in primes:
            first = -low % int(p)
            coprime[first::int(p)] = False
        count += int(np.count_nonzero(coprime))
    main = x * math.exp(log_product(1.0 - 1.0 / primes.astype(np.float64)))
    return RoughCount(x=x, z=z, count=count, main=main, legendre_error=2.0 ** primes.size)

def smooth_reciprocal_tail(x: float, z: float, cutoff: float) -> float:
    """sum of 1/a over z-smooth a with x^cutoff < a <= x."""
    if not 0 <= cutoff < 1:
        raise ArgumentError(f"Cutoff exponent must lie in [0, 1), got {cutoff}")
    _check_domain(x, z)
    lower = x ** cutoff
    return math.fsum(1.0 / a for a in sorted(smooth_numbers(x, z)) if a > lower)

def rankin_reciprocal_bound(x: float, z: float, cutoff: float, eta: float) -> float:
    """x^(-cutoff eta) prod_{p<=z} (1 - p^(eta-1))^-1, which majorizes smooth_reciprocal_tail."""
    if not 0 < eta < 1:
        raise ArgumentError(f"Rankin shift must lie in (0, 1), got {eta}")
    primes = primes_up_to(z).astype(np.float64)
    return math.exp(-cutoff * eta * math.log(x) - log_product(1.0 - primes ** (eta - 1.0)))

def rankin_asymptotic(x: float, z: float) -> float:
    """x log z exp(-log x / log z); reported only, its implied constant is unknown."""
    return x * math.log(z) * math.exp(-math.log(x) / math.log(z))

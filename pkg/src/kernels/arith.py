import numpy as np

from functools import lru_cache
from typing import Tuple

from kernels.primes import smallest_prime_factors

@lru_cache(maxsize=2)
def prime_power_split(limit: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """For every n <= limit: (p, p^k, n / p^k) where p = spf(n) and p^k || n.

    Entries 0 and 1 map to (1, 1, 1).
    """
    spf = smallest_prime_factors(limit).copy()
    spf[:2] = 1
    part = spf.copy()
    rest = np.arange(limit + 1, dtype=np.int64) // spf
    rest[0] = 1
    dividing = np.flatnonzero((rest % spf == 0) & (spf > 1))
    while dividing.size:
        part[dividing] *= spf[dividing]
        rest[dividing] //= spf[dividing]
        dividing = dividing[rest[dividing] % spf[dividing] == 0]
    for table in (spf, part, rest):
        table.setflags(write=False)
    return spf, part, rest

def multiplicative_fill(values: np.ndarray) -> np.ndarray:
    """Complete a multiplicative function from its values at 1 and at prime powers.

    values[n] must already hold f(p^k) at every prime power n; composite entries are
    overwritten with f(p^k) f(n / p^k), one distinct prime per pass.
    """
    limit = values.size - 1
    _, part, rest = prime_power_split(limit)
    pending = np.flatnonzero(rest > 1)
    ready = np.ones(limit + 1, dtype=bool)
    ready[pending] = False
    while pending.size:
        fill = pending[ready[rest[pending]]]
        values[fill] = values[part[fill]] * values[rest[fill]]
        ready[fill] = True
        pending = pending[~ready[pending]]
    return values

def prime_power_exponents(limit: int) -> np.ndarray:
    """k with n = p^k for prime powers n <= limit, 0 elsewhere."""
    spf, part, rest = prime_power_split(limit)
    exponents = np.zeros(limit + 1, dtype=np.int64)
    powers = np.flatnonzero((rest == 1) & (spf > 1))
    exponents[powers] = np.round(np.log(powers) / np.log(spf[powers])).astype(np.int64)
    return exponents

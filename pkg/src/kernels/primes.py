import math
import numpy as np

from functools import lru_cache
from sympy import factorint, isprime, totient
from typing import Dict, List

def prime_mask(limit: int) -> np.ndarray:
    """Boolean array of length limit + 1, True exactly at the primes."""
    is_prime = np.ones(max(limit, 1) + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return is_prime[:limit + 1]

def primes_up_to(limit: float) -> np.ndarray:
    limit = int(math.floor(limit))
    if limit < 2:
        return np.array([], dtype=np.int64)
    return np.flatnonzero(prime_mask(limit)).astype(np.int64)

@lru_cache(maxsize=2)
def smallest_prime_factors(limit: int) -> np.ndarray:
    """spf[n] for 0 <= n <= limit, with spf[0] = 0 and spf[1] = 1."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    if limit >= 1:
        spf[1] = 1
    for p in range(2, limit + 1):
        if p * p > limit:
            break
        if spf[p] == 0:
            block = spf[p * p::p]
            block[block == 0] = p
    unset = np.flatnonzero(spf == 0)
    spf[unset[unset >= 2]] = unset[unset >= 2]
    spf.setflags(write=False)
    return spf

def divisor_counts(limit: int) -> np.ndarray:
    counts = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        counts[d::d] += 1
    return counts

def is_prime(n: int) -> bool:
    return bool(isprime(int(n)))

def factorize(n: int) -> Dict[int, int]:
    return {int(p): int(k) for p, k in factorint(int(n)).items()}

def prime_divisors(n: int) -> List[int]:
    return sorted(factorize(n)) if n > 1 else []

def euler_phi(n: int) -> int:
    return int(totient(int(n)))

def squarefree(n: int) -> bool:
    return all(k == 1 for k in factorize(n).values())

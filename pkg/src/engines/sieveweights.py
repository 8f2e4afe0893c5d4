import logging
import math
import numpy as np

from typing import Dict, List, Optional

from exceptions import ArgumentError, SingularityError
from models.eigenvalue_table import EigenvalueTable
from models.sieve import DensityFunction, SieveContext, SieveWeights, TheoremABound
from settings import settings

logger = logging.getLogger(__name__)

def make_context(z: float, exclude_divisors_of: int = 1) -> SieveContext:
    """Primes p <= z that do not divide exclude_divisors_of; P_{6l}(z) for exclude_divisors_of = 6l."""
    return SieveContext.create(z, exclude_divisors_of)

def _upper_beta_support(primes: List[int], level: float) -> Dict[int, int]:
    """d = p_1 > ... > p_r with p_1...p_(m-1) p_m^3 < D at every odd m, signed by mu(d)."""
    weights = {1: 1}
    descending = sorted(primes, reverse=True)
    stack = [(1, 0, 0)]
    while stack:
        prefix, depth, start = stack.pop()
        for i in range(start, len(descending)):
            p = descending[i]
            # odd positions m = depth + 1 carry the beta = 2 truncation
            if depth % 2 == 0 and prefix * p ** 3 >= level:
                continue
            d = prefix * p
            weights[d] = -1 if depth % 2 == 0 else 1
            stack.append((d, depth + 1, i + 1))
    return weights

def linear_sieve_weights(context: SieveContext, level: float) -> SieveWeights:
    if level <= 1:
        raise ArgumentError(f"Sieve level must exceed 1, got {level}")
    if level > context.product:
        weights = _upper_beta_support(context.primes, math.inf)
    else:
        weights = _upper_beta_support(context.primes, level)
    logger.debug(f"Linear sieve weights: z={context.z}, D={level}, support size {len(weights)}")
    return SieveWeights(context=context, level=level, weights=weights)

def upper_bound_residual(weights: SieveWeights, n: int) -> int:
    """sum_{d | (n, P(z))} xi_d - [(n, P(z)) = 1]; never negative for upper-bound weights."""
    if n < 1:
        raise ArgumentError(f"n must be positive, got {n}")
    divisor_sum = sum(xi for d, xi in weights.weights.items() if n % d == 0)
    return divisor_sum - int(math.gcd(n, weights.context.product) == 1)

def upper_bound_residuals(weights: SieveWeights, limit: int) -> np.ndarray:
    """upper_bound_residual for n = 1..limit (index n - 1)."""
    divisor_sums = np.zeros(limit + 1, dtype=np.int64)
    for d, xi in weights.weights.items():
        if xi and d <= limit:
            divisor_sums[d::d] += xi
    coprime = np.ones(limit + 1, dtype=np.int64)
    for p in weights.context.primes:
        coprime[p::p] = 0
    return (divisor_sums - coprime)[1:]

def bilinear_G(weights_prime: SieveWeights, weights_double_prime: SieveWeights,
               g_prime: DensityFunction, g_double_prime: DensityFunction) -> float:
    """sum_{d1} xi'_{d1} g'(d1) sum_{d2, (d1, d2) = 1} xi''_{d2} g''(d2)."""
    if not weights_prime.context.same_primes(weights_double_prime.context):
        raise ArgumentError("Both weight sets must share one sieve context")
    outer = [(d, xi * g_prime(d)) for d, xi in weights_prime.weights.items() if xi]
    inner = [(d, xi * g_double_prime(d)) for d, xi in weights_double_prime.weights.items() if xi]
    terms = [u * v for d1, u in outer for d2, v in inner if math.gcd(d1, d2) == 1]
    return math.fsum(terms)

def theoremA_bound(context: SieveContext, g_prime: DensityFunction, g_double_prime: DensityFunction,
                   level_prime: float, level_double_prime: float) -> TheoremABound:
    g1 = {p: g_prime(p) for p in context.primes}
    g2 = {p: g_double_prime(p) for p in context.primes}
    for p in context.primes:
        if g1[p] >= 1 or g2[p] >= 1:
            raise SingularityError(f"g(p) = 1 at p = {p}: h(p) is undefined")
    v_prime = math.exp(math.fsum(math.log1p(-g1[p]) for p in context.primes if p < level_prime))
    v_double_prime = math.exp(math.fsum(math.log1p(-g2[p]) for p in context.primes if p < level_double_prime))
    log_c = math.fsum(math.log1p(g1[p] * g2[p] / ((1 - g1[p]) * (1 - g2[p]))) for p in context.primes)
    c = math.exp(log_c)
    return TheoremABound(C=c, V_prime=v_prime, V_double_prime=v_double_prime, product=c * v_prime * v_double_prime)

def density_g_prime(table: EigenvalueTable, context: SieveContext, a_l: int) -> DensityFunction:
    """g'(p) = lambda^2(p)/p, vanishing at p | a_l."""
    return DensityFunction.create({p: 0.0 if a_l % p == 0 else table(p) ** 2 / p for p in context.primes})

def density_g_double_prime(table: EigenvalueTable, context: SieveContext, a: int, a_l: int) -> DensityFunction:
    """g''(p) = (1 - lambda^2(p)/p)/(p - 1) for p not dividing a a_l, 1/p for p | a_l, 0 for p | a."""
    values: Dict[int, float] = {}
    for p in context.primes:
        if a % p == 0:
            values[p] = 0.0
        elif a_l % p == 0:
            values[p] = 1.0 / p
        else:
            values[p] = (1.0 - table(p) ** 2 / p) / (p - 1)
    return DensityFunction.create(values)

def default_level(x: float, exponent: Optional[float] = None) -> float:
    return x ** (settings.sieve_level_exponent if exponent is None else exponent)

import itertools
import logging
import math
import numpy as np

from functools import lru_cache
from sympy import primitive_root
from typing import Iterable, List, Optional, Tuple

from engines.eulerprod import theta_factor
from exceptions import ArgumentError, ConsistencyError, RangeError
from kernels.bump import smooth_step
from kernels.primes import euler_phi, factorize
from kernels.summation import block_sum
from models.characters import CharacterTable, DirichletCharacter, ProgressionEtaSum, SmoothedSumResult
from models.euler import ZETA2, GammaFactor
from models.shifted import EtaFunction, RankinSelbergCalibration
from settings import settings

logger = logging.getLogger(__name__)

ORTHOGONALITY_TOLERANCE = 1e-7

def _cyclic_logs(q: int) -> List[Tuple[int, np.ndarray]]:
    """(order, log table) for each cyclic factor of (Z/qZ)^*; the log table is -1 off the unit group."""
    residues = np.arange(q, dtype=np.int64)
    factors = []
    for p, e in sorted(factorize(q).items()):
        pe = p ** e
        local = residues % pe
        if p == 2:
            if e == 1:
                continue
            order = 2 ** (e - 2)
            sign_log = np.full(pe, -1, dtype=np.int64)
            five_log = np.full(pe, -1, dtype=np.int64)
            for a in range(2):
                power = 1
                for b in range(order):
                    n = (-power if a else power) % pe
                    sign_log[n], five_log[n] = a, b
                    power = power * 5 % pe
            factors.append((2, sign_log[local]))
            if order > 1:
                factors.append((order, five_log[local]))
        else:
            order = pe - pe // p
            g = primitive_root(pe)
            table = np.full(pe, -1, dtype=np.int64)
            power = 1
            for k in range(order):
                table[power] = k
                power = power * g % pe
            factors.append((order, table[local]))
    return factors

@lru_cache(maxsize=64)
def characters_mod_q(q: int) -> CharacterTable:
    """Complete dual group of (Z/qZ)^*, indexed by exponent tuples in lexicographic order."""
    if q < 1:
        raise ArgumentError(f"Modulus must be positive, got {q}")
    factors = _cyclic_logs(q) if q > 1 else []
    coprime = np.array([math.gcd(n, q) == 1 for n in range(q)])
    characters = []
    for index, exponents in enumerate(itertools.product(*[range(order) for order, _ in factors])):
        phase = np.zeros(q, dtype=np.float64)
        for j, (order, logs) in zip(exponents, factors):
            phase += j * np.where(logs >= 0, logs, 0) / order
        values = np.where(coprime, np.exp(2j * np.pi * phase), 0.0)
        values.setflags(write=False)
        characters.append(DirichletCharacter(modulus=q, index=index, exponents=tuple(exponents), values=values))
    table = CharacterTable(modulus=q, characters=characters)
    if len(table) != euler_phi(q):
        raise ConsistencyError(f"Built {len(table)} characters mod {q}, expected {euler_phi(q)}")
    logger.debug(f"Built {len(table)} characters mod {q}")
    return table

def _check_length(etafn: EtaFunction, x: float) -> int:
    n = int(math.floor(x))
    if n > etafn.limit:
        raise RangeError(f"x = {x} exceeds table limit {etafn.limit}")
    return n

def residue_class_sums(etafn: EtaFunction, q: int, x: float) -> np.ndarray:
    """sum_{n <= x, n = r (q)} eta(n) for every r mod q."""
    n = _check_length(etafn, x)
    return np.bincount(np.arange(1, n + 1) % q, weights=etafn.values[1:n + 1], minlength=q)

def twisted_eta_sum(etafn: EtaFunction, chi: DirichletCharacter, x: float) -> complex:
    return complex(chi.values @ residue_class_sums(etafn, chi.modulus, x))

def _direct_progression(etafn: EtaFunction, m: int, q: int, x: float) -> float:
    n = _check_length(etafn, x)
    first = m % q or q
    return block_sum(etafn.values[first:n + 1:q])

def progression_eta_sum(etafn: EtaFunction, m: int, q: int, x: float,
                        calibration: RankinSelbergCalibration,
                        gamma: Optional[GammaFactor] = None) -> ProgressionEtaSum:
    """Progression sum of eta, its reconstruction from character twists and the main term."""
    if q < 1 or math.gcd(m, q) != 1:
        raise ArgumentError(f"Need (m, q) = 1, got m = {m}, q = {q}")
    direct = _direct_progression(etafn, m, q, x)
    characters = characters_mod_q(q)
    twisted = characters.matrix() @ residue_class_sums(etafn, q, x)
    conjugates = np.array([chi.conjugate(m) for chi in characters.characters])
    via = float((conjugates @ twisted).real) / len(characters)
    if abs(direct - via) > ORTHOGONALITY_TOLERANCE * (1 + abs(direct)):
        raise ConsistencyError(f"Orthogonality reconstruction mod {q} misses by {abs(direct - via):.3e}")
    phi = euler_phi(q)
    main = theta_factor(etafn.table, q, gamma) / ZETA2 * calibration.L_hat * x / phi
    return ProgressionEtaSum(m=m, q=q, x=x, direct=direct, via_orthogonality=via, main=main)

def equidistribution_spread(etafn: EtaFunction, q: int, x: float) -> float:
    """max over reduced residues m of |A_m - mean| / mean."""
    sums = np.array([_direct_progression(etafn, m, q, x) for m in range(1, q + 1) if math.gcd(m, q) == 1])
    mean = sums.mean()
    return float(np.abs(sums - mean).max() / mean)

def progression_error_exponent(etafn: EtaFunction, m: int, q: int, xs: Iterable[float],
                               calibration: RankinSelbergCalibration,
                               gamma: Optional[GammaFactor] = None) -> float:
    """Fitted slope of log|direct - main| against log x."""
    xs = sorted(xs)
    if len(xs) < 2:
        raise ArgumentError("A slope needs at least two x values")
    errors = [abs(s.direct - s.main) for s in (progression_eta_sum(etafn, m, q, x, calibration, gamma) for x in xs)]
    return float(np.polyfit(np.log(xs), np.log(np.maximum(errors, np.finfo(float).tiny)), 1)[0])

def smoothed_dyadic_sum(coeffs: np.ndarray, x: float, y: float, residue: float = 1.0, conductor: int = 1,
                        epsilon: Optional[float] = None) -> SmoothedSumResult:
    """Sharp sum over x <= n <= 2x between a smooth majorant on [x-y, 2x+y] and a minorant on [x, 2x].

    coeffs[n] is the n-th coefficient; coeffs[0] is ignored.
    """
    if not 1 <= y <= x:
        raise ArgumentError(f"Need 1 <= y <= x, got x = {x}, y = {y}")
    epsilon = settings.mollifier_epsilon if epsilon is None else epsilon
    top = int(math.floor(2 * x + y))
    if top >= len(coeffs):
        raise RangeError(f"Coefficients needed up to {top}, stream ends at {len(coeffs) - 1}")
    n = np.arange(max(1, int(math.ceil(x - y))), top + 1)
    a = np.asarray(coeffs[n], dtype=np.float64)
    if np.any(a < 0):
        raise ArgumentError("Smoothed sandwich needs non-negative coefficients")
    inner = (n >= x) & (n <= 2 * x)
    sharp = block_sum(np.where(inner, a, 0.0))
    majorant_weight = np.where(inner, 1.0, np.where(n < x, smooth_step((n - (x - y)) / y),
                                                    smooth_step((2 * x + y - n) / y)))
    width = min(y, x / 2)
    minorant_weight = np.where(inner, np.minimum(smooth_step((n - x) / width), smooth_step((2 * x - n) / width)), 0.0)
    majorant = sharp + block_sum(np.where(inner, 0.0, majorant_weight * a))
    minorant = sharp - block_sum(np.where(inner, (1 - minorant_weight) * a, 0.0))
    return SmoothedSumResult(x=x, y=y, sharp=sharp, majorant=majorant, minorant=minorant, main=residue * x,
                             error_bound=x ** (0.75 + epsilon) * conductor ** (0.5 + epsilon))

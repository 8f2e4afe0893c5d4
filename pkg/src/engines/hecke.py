import cmath
import logging
import math
import numpy as np

from pathlib import Path
from sympy import divisors
from typing import Optional, Union

from exceptions import ArgumentError, CapacityError, ConsistencyError, FormatError, ParseError, RangeError
from kernels.ntt import ResidueSeries
from kernels.primes import is_prime, primes_up_to
from models.eigenvalue_table import (BoundMode, EigenvalueFileHeader, EigenvalueFileKind, EigenvalueTable,
                                     LocalParams, TauSeries)
from settings import settings

logger = logging.getLogger(__name__)

EXACT_CHUNK = 2 ** 18

def jacobi_eta_cubed(length: int) -> np.ndarray:
    """Coefficients of prod_n (1 - q^n)^3 = sum_k (-1)^k (2k+1) q^(k(k+1)/2), truncated to q^(length-1)."""
    coefficients = np.zeros(length, dtype=np.int64)
    k = 0
    while k * (k + 1) // 2 < length:
        coefficients[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    return coefficients

def _check_capacity(limit: int) -> None:
    if limit < 1:
        raise ArgumentError(f"Table limit must be positive, got {limit}")
    if limit > settings.table_ceiling:
        raise CapacityError(f"Table limit {limit} exceeds the ceiling {settings.table_ceiling}")

def tau_residues(limit: int, threads: Optional[int] = None) -> ResidueSeries:
    """Residues of tau(1..limit): entry n - 1 holds tau(n), the coefficient of q^(n-1) in prod (1 - q^n)^24."""
    _check_capacity(limit)
    cubed = jacobi_eta_cubed(limit)
    l1_norm = int(np.abs(cubed).sum())
    return ResidueSeries.square_chain(cubed, 3, limit, l1_norm ** 8, threads)

def tau_series(limit: int, threads: Optional[int] = None) -> TauSeries:
    residues = tau_residues(limit, threads)
    return TauSeries(limit=limit, coeffs=[int(c) for c in residues.exact()])

def build_delta_table(limit: int, threads: Optional[int] = None) -> EigenvalueTable:
    """lambda(n) = tau(n) / n^(11/2) for the discriminant form.

    tau is exact up to the conversion of each integer to double, which is the only rounding
    before the final division.
    """
    residues = tau_residues(limit, threads)
    logger.info(f"Building Delta table to {limit} over {len(residues.primes)} residue channels")
    values = np.zeros(limit + 1, dtype=np.float64)
    for start in range(0, limit, EXACT_CHUNK):
        stop = min(start + EXACT_CHUNK, limit)
        tau = residues.exact(start, stop).astype(np.float64)
        n = np.arange(start + 1, stop + 1, dtype=np.float64)
        values[start + 1:stop + 1] = tau / (n ** 5 * np.sqrt(n))
    table = EigenvalueTable.from_values(values, "delta", BoundMode.DELIGNE)
    violations = table.bound_violations()
    if violations:
        raise ConsistencyError(f"Deligne bound fails at primes {violations[:10]}")
    return table

def _parse_value(text: str, line_number: int) -> float:
    try:
        return float(text.replace("−", "-"))
    except ValueError:
        raise ParseError(f"Invalid value '{text}'", line_number)

def load_eigenvalue_table(path: Union[str, Path], limit: int) -> EigenvalueTable:
    """Read prime entries from an eigenvalue file and extend them to all n <= limit."""
    _check_capacity(limit)
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ParseError("Missing header", 1)
    header = EigenvalueFileHeader.from_string(lines[0])
    prime_values = np.full(limit + 1, np.nan)
    for line_number, line in enumerate(lines[1:], start=2):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        fields = body.split()
        if len(fields) != 2:
            raise ParseError(f"Expected 'p value', got '{body}'", line_number)
        try:
            p = int(fields[0])
        except ValueError:
            raise ParseError(f"Invalid prime '{fields[0]}'", line_number)
        if not is_prime(p):
            raise ParseError(f"{p} is not prime", line_number)
        value = _parse_value(fields[1], line_number)
        if p <= limit:
            prime_values[p] = value / header.normalizer(p)
    primes = primes_up_to(limit)
    missing = primes[np.isnan(prime_values[primes])]
    if missing.size:
        raise FormatError(f"Prime {int(missing[0])} missing from {path}")
    table = EigenvalueTable.from_prime_values(np.nan_to_num(prime_values), limit, f"file:{header.label}",
                                              BoundMode.KIM_SARNAK)
    for p in table.bound_violations():
        logger.warning(f"Kim-Sarnak bound exceeded at p = {p}: lambda(p) = {table(p)}")
    logger.info(f"Loaded {primes.size} prime eigenvalues from {path} (label {header.label})")
    return table

def dump_eigenvalue_table(table: EigenvalueTable, path: Union[str, Path]) -> Path:
    label = table.source.replace(" ", "_")
    header = EigenvalueFileHeader(kind=EigenvalueFileKind.LAMBDA, weight=None, label=label)
    primes = table.primes()
    lines = [str(header)] + [f"{p} {value:.17g}" for p, value in zip(primes, table.values[primes])]
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path

def hecke_relation_residual(table: EigenvalueTable, m: int, n: int) -> float:
    """lambda(m) lambda(n) - sum_{d | (m, n)} lambda(mn / d^2)."""
    if m < 1 or n < 1:
        raise ArgumentError(f"Hecke relation needs positive indices, got ({m}, {n})")
    if m * n > table.limit:
        raise RangeError(f"m*n = {m * n} exceeds table limit {table.limit}")
    relation = math.fsum(table(m * n // (d * d)) for d in divisors(math.gcd(m, n)))
    return table(m) * table(n) - relation

def local_params(table: EigenvalueTable, p: int) -> LocalParams:
    """Roots of X^2 - lambda(p) X + 1, checked against the table at the powers of p."""
    if not is_prime(p):
        raise ArgumentError(f"{p} is not prime")
    table.require(p, "local parameters")
    lam = table(p)
    root = cmath.sqrt(complex(lam * lam - 4.0))
    params = LocalParams(p=p, alpha=(lam + root) / 2, beta=(lam - root) / 2)
    m, power = 1, p
    while power <= table.limit:
        expected = table(power)
        if abs(params.power_sum(m) - expected) > 1e-8 * max(1.0, abs(expected)):
            raise ConsistencyError(f"Satake reconstruction of lambda({p}^{m}) disagrees with the table")
        m, power = m + 1, power * p
    return params

def multiplicativity_defect(table: EigenvalueTable, limit: int) -> float:
    """max |lambda(mn) - lambda(m) lambda(n)| / max(1, |lambda(m) lambda(n)|) over coprime m, n, mn <= limit."""
    table.require(limit)
    worst = 0.0
    for m in range(2, math.isqrt(limit) + 1):
        n = np.arange(m + 1, limit // m + 1, dtype=np.int64)
        n = n[np.gcd(n, m) == 1]
        if not n.size:
            continue
        product = table(m) * table.values[n]
        defect = np.abs(table.values[m * n] - product) / np.maximum(1.0, np.abs(product))
        worst = max(worst, float(defect.max()))
    return worst

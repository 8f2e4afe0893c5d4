import math
import numpy as np

from enum import Enum
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from typing import List, Optional, Union

from exceptions import ParseError, RangeError
from kernels.arith import multiplicative_fill
from kernels.primes import primes_up_to

KIM_SARNAK_EXPONENT = 7 / 64
BOUND_TOLERANCE = 1e-9

class BoundMode(str, Enum):
    DELIGNE = "deligne"
    KIM_SARNAK = "kim-sarnak"

class EigenvalueFileKind(str, Enum):
    AP = "ap"
    LAMBDA = "lambda"

class TauSeries(BaseModel):
    limit: int
    coeffs: List[int]

    @model_validator(mode="after")
    def _check_normalization(self) -> "TauSeries":
        if len(self.coeffs) != self.limit:
            raise ValueError(f"Expected {self.limit} coefficients, got {len(self.coeffs)}")
        if self.limit and self.coeffs[0] != 1:
            raise ValueError("tau(1) must be 1")
        return self

    def __getitem__(self, n: int) -> int:
        return self.coeffs[n - 1]

class EigenvalueTable(BaseModel):
    """Hecke-normalized eigenvalues lambda(n), n = 0..limit, with lambda(0) = 0 and lambda(-n) = lambda(n)."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    limit: int
    values: np.ndarray
    source: str
    bound_mode: BoundMode = BoundMode.DELIGNE

    @field_validator("values")
    def _check_values(cls, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=np.float64)
        if values.size < 2 or values[1] != 1.0:
            raise ValueError("lambda(1) must be 1")
        values.setflags(write=False)
        return values

    @model_validator(mode="after")
    def _check_limit(self) -> "EigenvalueTable":
        if self.values.size != self.limit + 1:
            raise ValueError(f"Table of limit {self.limit} needs {self.limit + 1} entries")
        return self

    @classmethod
    def from_values(cls, values: np.ndarray, source: str, bound_mode: BoundMode = BoundMode.DELIGNE) -> "EigenvalueTable":
        values = np.array(values, dtype=np.float64)
        values[0] = 0.0
        return cls(limit=values.size - 1, values=values, source=source, bound_mode=bound_mode)

    @classmethod
    def from_prime_values(cls, prime_values: np.ndarray, limit: int, source: str,
                          bound_mode: BoundMode = BoundMode.KIM_SARNAK) -> "EigenvalueTable":
        """Extend lambda(p) to all n <= limit: Hecke recursion at prime powers, multiplicativity elsewhere.

        prime_values is indexed by n and read only at primes.
        """
        values = np.zeros(limit + 1, dtype=np.float64)
        values[1] = 1.0
        primes = primes_up_to(limit)
        lam_p = np.asarray(prime_values, dtype=np.float64)[primes]
        previous = np.ones(primes.size)
        current = lam_p.copy()
        powers = primes.copy()
        active = np.ones(primes.size, dtype=bool)
        while active.any():
            values[powers[active]] = current[active]
            # lambda(p^(k+1)) = lambda(p) lambda(p^k) - lambda(p^(k-1))
            previous, current = current, lam_p * current - previous
            active &= powers <= limit // primes
            powers = np.where(active, powers * primes, powers)
        return cls.from_values(multiplicative_fill(values), source, bound_mode)

    @classmethod
    def constant_at_primes(cls, value: float, limit: int) -> "EigenvalueTable":
        prime_values = np.full(limit + 1, value, dtype=np.float64)
        return cls.from_prime_values(prime_values, limit, f"stub:lambda_p={value:g}", BoundMode.KIM_SARNAK)

    @classmethod
    def ones(cls, limit: int) -> "EigenvalueTable":
        return cls.from_values(np.ones(limit + 1), "stub:ones", BoundMode.KIM_SARNAK)

    def require(self, n: int, purpose: str = "") -> None:
        if abs(n) > self.limit:
            raise RangeError(f"Index {n} exceeds table limit {self.limit}{' (' + purpose + ')' if purpose else ''}")

    def __call__(self, n: int) -> float:
        self.require(n)
        return float(self.values[abs(int(n))])

    def at(self, indices: Union[np.ndarray, range]) -> np.ndarray:
        indices = np.abs(np.asarray(indices, dtype=np.int64))
        if indices.size and int(indices.max()) > self.limit:
            raise RangeError(f"Index {int(indices.max())} exceeds table limit {self.limit}")
        return self.values[indices]

    def primes(self, up_to: Optional[float] = None) -> np.ndarray:
        return primes_up_to(self.limit if up_to is None else min(up_to, self.limit))

    def prime_bound(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=np.float64)
        if self.bound_mode == BoundMode.DELIGNE:
            return np.full(p.shape, 2.0)
        return 2.0 * p ** KIM_SARNAK_EXPONENT

    def bound_violations(self) -> List[int]:
        primes = self.primes()
        exceeding = np.abs(self.values[primes]) > self.prime_bound(primes) + BOUND_TOLERANCE
        return [int(p) for p in primes[exceeding]]

    def scaled(self, factor: float) -> "EigenvalueTable":
        """Coefficients multiplied by a constant; no longer Hecke-normalized."""
        return EigenvalueTable.model_construct(limit=self.limit, values=self.values * factor,
                                               source=f"{self.source}*{factor:g}", bound_mode=self.bound_mode)

class LocalParams(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    p: int
    alpha: complex
    beta: complex

    @model_validator(mode="after")
    def _check_satake(self) -> "LocalParams":
        product = self.alpha * self.beta
        if abs(product - 1) > 1e-12:
            raise ValueError(f"alpha * beta = {product} at p = {self.p}")
        unitary = abs(abs(self.alpha) - 1) <= 1e-12 and abs(abs(self.beta) - 1) <= 1e-12
        real = abs(self.alpha.imag) <= 1e-12 and abs(self.beta.imag) <= 1e-12
        if not (unitary or real):
            raise ValueError(f"Satake parameters at p = {self.p} are neither unitary nor real")
        return self

    def power_sum(self, m: int) -> complex:
        """sum_{j=0}^m alpha^(m-j) beta^j, i.e. lambda(p^m)."""
        return sum(self.alpha ** (m - j) * self.beta ** j for j in range(m + 1))

class EigenvalueFileHeader(BaseModel):
    kind: EigenvalueFileKind
    weight: Optional[int] = None
    label: str

    @classmethod
    def from_string(cls, line: str) -> "EigenvalueFileHeader":
        fields = line.lstrip("#").split()
        if len(fields) < 2 or fields[0] != "shiftsieve-eigen" or fields[1] != "v1":
            raise ParseError("Expected header '# shiftsieve-eigen v1 ...'", 1)
        entries = dict(field.split("=", 1) for field in fields[2:] if "=" in field)
        try:
            weight = entries.get("weight", "maass")
            return cls(kind=entries["kind"], weight=None if weight == "maass" else int(weight),
                       label=entries.get("label", "unnamed"))
        except (KeyError, ValueError) as error:
            raise ParseError(f"Invalid header: {error}", 1)

    def __str__(self) -> str:
        weight = "maass" if self.weight is None else str(self.weight)
        return f"# shiftsieve-eigen v1 kind={self.kind.value} weight={weight} label={self.label}"

    def normalizer(self, p: int) -> float:
        """Divisor applied to a file value at p."""
        if self.kind == EigenvalueFileKind.AP and self.weight is not None:
            return math.pow(p, (self.weight - 1) / 2)
        return 1.0

import math

from pydantic import BaseModel, Field, field_validator, model_validator
from typing import Dict, List, Optional

from exceptions import ArgumentError, SingularityError
from kernels.primes import prime_divisors, primes_up_to

class SieveContext(BaseModel):
    z: float
    excluded: List[int] = Field(default_factory=list)
    primes: List[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_primes(self) -> "SieveContext":
        if any(p in self.excluded for p in self.primes):
            raise ValueError("Context primes overlap the excluded set")
        if self.primes != sorted(self.primes) or (self.primes and self.primes[-1] > self.z):
            raise ValueError("Context primes must be sorted and <= z")
        return self

    @classmethod
    def create(cls, z: float, exclude_divisors_of: int = 1) -> "SieveContext":
        excluded = prime_divisors(abs(exclude_divisors_of))
        primes = [int(p) for p in primes_up_to(z) if int(p) not in excluded]
        return cls(z=z, excluded=excluded, primes=primes)

    @property
    def product(self) -> int:
        return math.prod(self.primes)

    def same_primes(self, other: "SieveContext") -> bool:
        return self.primes == other.primes

class SieveWeights(BaseModel):
    """Upper-bound sieve weights xi_d = mu(d) on an admissible support, zero elsewhere."""
    context: SieveContext
    level: float
    weights: Dict[int, int]

    @field_validator("weights")
    def _check_signs(cls, weights: Dict[int, int]) -> Dict[int, int]:
        if weights.get(1) != 1:
            raise ValueError("xi_1 must be 1")
        if any(xi not in (-1, 0, 1) for xi in weights.values()):
            raise ValueError("Weights must lie in {-1, 0, 1}")
        return weights

    @model_validator(mode="after")
    def _check_level(self) -> "SieveWeights":
        if any(d >= self.level for d, xi in self.weights.items() if xi):
            raise ValueError(f"Support exceeds level {self.level}")
        return self

    def __call__(self, d: int) -> int:
        return self.weights.get(d, 0)

    @property
    def support(self) -> List[int]:
        return sorted(d for d, xi in self.weights.items() if xi)

    def __json__(self) -> dict:
        return {
            "z": self.context.z,
            "level": self.level,
            "primes": self.context.primes,
            "weights": {str(d): self.weights[d] for d in self.support}
        }

class DensityFunction(BaseModel):
    """Multiplicative density g on squarefree d composed of context primes."""
    values: Dict[int, float]

    @field_validator("values")
    def _check_range(cls, values: Dict[int, float]) -> Dict[int, float]:
        if any(not 0 <= g < 1 for g in values.values()):
            raise ValueError("Densities must lie in [0, 1)")
        return values

    @classmethod
    def create(cls, values: Dict[int, float]) -> "DensityFunction":
        for p, g in values.items():
            if g >= 1:
                raise SingularityError(f"g({p}) = {g}: h(p) = g/(1-g) is undefined")
            if g < 0:
                raise ArgumentError(f"g({p}) = {g} is negative")
        return cls(values=values)

    @classmethod
    def zero(cls, context: SieveContext) -> "DensityFunction":
        return cls(values={p: 0.0 for p in context.primes})

    def __call__(self, d: int) -> float:
        return math.prod(self.values.get(p, 0.0) for p in prime_divisors(d)) if d > 1 else 1.0

class TheoremABound(BaseModel):
    C: float
    V_prime: float
    V_double_prime: float
    product: float

    def __json__(self) -> dict:
        return {
            "C": self.C,
            "V_prime": self.V_prime,
            "V_double_prime": self.V_double_prime,
            "product": self.product
        }

class SieveBoundReport(BaseModel):
    a: int
    a_l: int
    ell: int
    x: float
    z: float
    level: float
    sifting_sum: float
    main_scale: float
    bilinear: float
    theorem_a: TheoremABound
    sieve_upper: float
    theorem_a_upper: float
    ratio: Optional[float] = None

    def __json__(self) -> dict:
        return {
            "a": self.a,
            "a_l": self.a_l,
            "ell": self.ell,
            "x": self.x,
            "z": self.z,
            "level": self.level,
            "sifting_sum": self.sifting_sum,
            "main_scale": self.main_scale,
            "bilinear_G": self.bilinear,
            **self.theorem_a.__json__(),
            "sieve_upper": self.sieve_upper,
            "theorem_a_upper": self.theorem_a_upper,
            "ratio": self.ratio
        }

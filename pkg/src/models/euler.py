import math

from pydantic import BaseModel, model_validator
from typing import Optional

ZETA2 = math.pi ** 2 / 6
GAMMA_LOWER = 3 / (5 * math.pi ** 2)
GAMMA_UPPER = 15.0
DELTA_CEILING = 2 * (1 - 8 / (3 * math.pi))

class PartialEulerProduct(BaseModel):
    power: int
    cutoff: float
    value: float
    log_value: float
    prime_count: int = 0

    @model_validator(mode="after")
    def _check_positive(self) -> "PartialEulerProduct":
        if not self.value > 0:
            raise ValueError(f"L_{self.power}(u, {self.cutoff}) must be positive")
        return self

    def __json__(self) -> dict:
        return {
            "m": self.power,
            "z": self.cutoff,
            "value": self.value,
            "log_value": self.log_value,
            "primes": self.prime_count
        }

class GammaFactor(BaseModel):
    value: float
    cutoff: int
    tail_estimate: float

class MainTermFactors(BaseModel):
    x: float
    c: float
    z: float
    M: float
    gamma_u: float
    theta: float
    zeta2: float = ZETA2

    @model_validator(mode="after")
    def _check_bracket(self) -> "MainTermFactors":
        if not 0 < self.M <= 1:
            raise ValueError(f"M = {self.M} outside (0, 1]")
        if not GAMMA_LOWER < self.gamma_u < GAMMA_UPPER:
            raise ValueError(f"gamma_u = {self.gamma_u} outside its bracket")
        return self

    def __json__(self) -> dict:
        return {
            "x": self.x,
            "c": self.c,
            "z": self.z,
            "M": self.M,
            "gamma_u": self.gamma_u,
            "theta": self.theta,
            "zeta2": self.zeta2
        }

class HeckePowerResiduals(BaseModel):
    p: int
    r2: float
    r4: float
    r6: float
    extended: bool = False

    def worst(self) -> float:
        return max(abs(self.r2), abs(self.r4), abs(self.r6))

class Lemma41Report(BaseModel):
    z: float
    M: float
    bound: float
    min_prime_margin: float
    L2: float
    L4: float
    L6: float

    def __json__(self) -> dict:
        return {
            "z": self.z,
            "M": self.M,
            "bound": self.bound,
            "M_log_z_1_6": self.M * math.log(self.z) ** (1 / 6),
            "min_prime_margin": self.min_prime_margin,
            "L2": self.L2,
            "L4": self.L4,
            "L6": self.L6
        }

class FourthMomentReport(BaseModel):
    x: float
    sum: float
    bound: float
    ratio: Optional[float] = None

    def __json__(self) -> dict:
        return {
            "x": self.x,
            "sum": self.sum,
            "bound": self.bound,
            "ratio": self.ratio
        }

class AbScanRow(BaseModel):
    a: float
    b_lo: float
    b_hi: float
    b: float
    delta: float
    admissible: bool
    label: str = "scan"

    def __json__(self) -> dict:
        return {
            "label": self.label,
            "a": self.a,
            "b": self.b,
            "b_lo": self.b_lo,
            "b_hi": self.b_hi,
            "delta": self.delta,
            "admissible": self.admissible
        }

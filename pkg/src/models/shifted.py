import numpy as np

from pydantic import BaseModel, ConfigDict, model_validator
from typing import Optional

from kernels.arith import multiplicative_fill, prime_power_exponents, prime_power_split
from models.eigenvalue_table import EigenvalueTable

class SmoothSplit(BaseModel):
    n: int
    z: float
    a: int
    b: int

    @model_validator(mode="after")
    def _check_factorization(self) -> "SmoothSplit":
        if self.a * self.b != self.n:
            raise ValueError(f"{self.a} * {self.b} != {self.n}")
        return self

class PartitionSums(BaseModel):
    ell: int
    x: float
    z: float
    cutoff: float
    S_total: float
    S_A: float
    S_Al: float
    S_star: float

    @model_validator(mode="after")
    def _check_cover(self) -> "PartitionSums":
        if min(self.S_total, self.S_A, self.S_Al, self.S_star) < 0:
            raise ValueError("Partition sums must be non-negative")
        covered = self.S_A + self.S_Al + self.S_star
        if self.S_total > covered * (1 + 1e-12) + 1e-9:
            raise ValueError("S_total exceeds S_A + S_Al + S_star")
        return self

    def __json__(self) -> dict:
        return {
            "ell": self.ell,
            "x": self.x,
            "z": self.z,
            "cutoff": self.cutoff,
            "S": self.S_total,
            "S_A": self.S_A,
            "S_Al": self.S_Al,
            "S_star": self.S_star
        }

class EtaFunction(BaseModel):
    """eta(p^k) = lambda^2(p) for p | 6 and lambda(p)^(2k) otherwise, extended multiplicatively."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    table: EigenvalueTable
    values: np.ndarray

    @classmethod
    def create(cls, table: EigenvalueTable) -> "EtaFunction":
        limit = table.limit
        spf, _, rest = prime_power_split(limit)
        exponents = prime_power_exponents(limit)
        values = np.zeros(limit + 1, dtype=np.float64)
        values[1] = 1.0
        powers = np.flatnonzero((rest == 1) & (spf > 1))
        lam = table.values[spf[powers]]
        values[powers] = np.where((spf[powers] == 2) | (spf[powers] == 3), lam ** 2, lam ** (2 * exponents[powers]))
        values = multiplicative_fill(values)
        values.setflags(write=False)
        return cls(table=table, values=values)

    @property
    def limit(self) -> int:
        return self.table.limit

class ProgressionSum(BaseModel):
    a: int
    a_l: int
    d: int
    d_l: int
    ell: int
    x: float
    modulus: int
    residue: Optional[int] = None
    solvable: bool
    A: float
    main: float
    error: float

    def __json__(self) -> dict:
        return {
            "a": self.a,
            "a_l": self.a_l,
            "d": self.d,
            "d_l": self.d_l,
            "ell": self.ell,
            "x": self.x,
            "q": self.modulus,
            "residue": self.residue,
            "solvable": self.solvable,
            "A": self.A,
            "main": self.main,
            "error": self.error
        }

class DecayRow(BaseModel):
    ell: int
    x: float
    S: float
    S_over_x: float
    S_norm: float

    def __json__(self) -> dict:
        return {
            "x": self.x,
            "S": self.S,
            "S_over_x": self.S_over_x,
            "S_norm_1_7": self.S_norm
        }

class RankinSelbergCalibration(BaseModel):
    x0: int
    L_hat: float
    raw: float
    gamma_u: float
    eta_mean: float

    def __json__(self) -> dict:
        return {
            "X0": self.x0,
            "L_hat": self.L_hat,
            "L_hat_raw": self.raw,
            "gamma_u": self.gamma_u,
            "eta_mean": self.eta_mean
        }

class SquareFullRemainder(BaseModel):
    a: int
    a_l: int
    ell: int
    x: float
    z: float
    value: float
    coprime: bool = False

    @property
    def normalized(self) -> float:
        return self.value * self.a * self.a_l * self.z ** (1 / 32) / self.x

class Theorem1Row(BaseModel):
    ell: int
    x: float
    z: float
    S: float
    S_over_x: float
    S_norm: float
    S_A: float
    S_Al: float
    S_star: float
    M: float
    lemma13_ratio: float

    def __json__(self) -> dict:
        return {
            "ell": self.ell,
            "x": self.x,
            "z": self.z,
            "S": self.S,
            "S_over_x": self.S_over_x,
            "S_norm_1_7": self.S_norm,
            "S_A": self.S_A,
            "S_Al": self.S_Al,
            "S_star": self.S_star,
            "M": self.M,
            "lemma13_ratio": self.lemma13_ratio
        }

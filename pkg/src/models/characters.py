import math
import numpy as np

from pydantic import BaseModel, ConfigDict, model_validator
from typing import List, Tuple

class DirichletCharacter(BaseModel):
    """A character mod q stored as its values on residues 0..q-1."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    modulus: int
    index: int
    exponents: Tuple[int, ...] = ()
    values: np.ndarray

    @model_validator(mode="after")
    def _check_values(self) -> "DirichletCharacter":
        if self.values.shape != (self.modulus,):
            raise ValueError(f"Character mod {self.modulus} needs {self.modulus} values")
        return self

    @property
    def is_principal(self) -> bool:
        return not any(self.exponents)

    def __call__(self, n: int) -> complex:
        return complex(self.values[n % self.modulus])

    def conjugate(self, n: int) -> complex:
        return self(n).conjugate()

class CharacterTable(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    modulus: int
    characters: List[DirichletCharacter]

    @model_validator(mode="after")
    def _check_order(self) -> "CharacterTable":
        if not self.characters or not self.characters[0].is_principal:
            raise ValueError("The principal character must come first")
        return self

    def __len__(self) -> int:
        return len(self.characters)

    def matrix(self) -> np.ndarray:
        """Character values, one row per character, one column per residue."""
        return np.stack([chi.values for chi in self.characters])

    def orthogonality_error(self) -> float:
        """max deviation of both orthogonality relations from phi(q) times the identity."""
        matrix = self.matrix()
        reduced = np.array([math.gcd(r, self.modulus) == 1 for r in range(self.modulus)])
        columns = matrix[:, reduced]
        phi = columns.shape[1]
        rows_gram = matrix @ matrix.conj().T
        columns_gram = columns.conj().T @ columns
        return max(float(np.abs(rows_gram - phi * np.eye(len(self))).max()),
                   float(np.abs(columns_gram - phi * np.eye(phi)).max()))

class SmoothedSumResult(BaseModel):
    x: float
    y: float
    sharp: float
    majorant: float
    minorant: float
    main: float
    error_bound: float

    @model_validator(mode="after")
    def _check_sandwich(self) -> "SmoothedSumResult":
        if not self.minorant <= self.sharp <= self.majorant:
            raise ValueError("Smoothed sums do not sandwich the sharp sum")
        return self

    def __json__(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "sharp": self.sharp,
            "majorant": self.majorant,
            "minorant": self.minorant,
            "main": self.main,
            "deviation": self.sharp - self.main,
            "error_bound": self.error_bound
        }

class ProgressionEtaSum(BaseModel):
    m: int
    q: int
    x: float
    direct: float
    via_orthogonality: float
    main: float

    def __json__(self) -> dict:
        return {
            "q": self.q,
            "m": self.m,
            "x": self.x,
            "direct": self.direct,
            "via_orthogonality": self.via_orthogonality,
            "main": self.main
        }

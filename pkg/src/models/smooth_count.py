from pydantic import BaseModel, model_validator
from typing import Optional

class SmoothCount(BaseModel):
    x: float
    z: float
    count: int
    alpha: Optional[float] = None
    bound: Optional[float] = None

    @model_validator(mode="after")
    def _count_below_rankin_bound(self) -> "SmoothCount":
        if self.bound is not None and self.count > self.bound:
            raise ValueError(f"Phi({self.x}, {self.z}) = {self.count} exceeds its Rankin bound {self.bound}")
        return self

    def __json__(self) -> dict:
        return {
            "x": self.x,
            "z": self.z,
            "count": self.count,
            "alpha": self.alpha,
            "bound": self.bound
        }

class RoughCount(BaseModel):
    x: float
    z: float
    count: int
    main: float
    legendre_error: float

    def __json__(self) -> dict:
        return {
            "x": self.x,
            "z": self.z,
            "count": self.count,
            "main": self.main,
            "legendre_error": self.legendre_error
        }

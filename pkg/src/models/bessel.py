import math
import numpy as np

from pydantic import BaseModel, Field, model_validator
from typing import Iterable, List, Optional, Union

from exceptions import DomainError
from kernels.bump import bump
from kernels.quadrature import DEFAULT_ORDER, composite_legendre, panels_for
from settings import settings

ArrayLike = Union[float, np.ndarray]

EVALUATION_CHUNK = 64
TEST_FUNCTION_PANELS = 64

class BesselEvaluator(BaseModel):
    """K_{ir}(y) = int_0^T exp(-y cosh t) cos(rt) dt with cosh T = (log(1/eps) + y) / y.

    The dropped tail is below eps exp(-y). Arguments past the double-precision
    range of exp(-y) underflow to 0 unless the scaled form exp(y) K is asked for.
    """
    epsilon: float = Field(default_factory=lambda: settings.bessel_epsilon)
    order: int = DEFAULT_ORDER

    @model_validator(mode="after")
    def _check_accuracy(self) -> "BesselEvaluator":
        if not 1e-14 < self.epsilon < 1e-4:
            raise ValueError(f"Accuracy {self.epsilon} outside (1e-14, 1e-4)")
        if self.order < 2:
            raise ValueError("Need at least two nodes per panel")
        return self

    @property
    def log_inverse(self) -> float:
        return math.log(1 / self.epsilon)

    def truncation(self, y: float) -> float:
        return math.acosh((self.log_inverse + y) / y)

    def panel_width(self, r: float, y: float) -> float:
        return min(2 * math.pi / (r + 1), 8 / (1 + self.log_inverse + y))

    def evaluate(self, r: float, y: ArrayLike, scaled: bool = False) -> ArrayLike:
        if r < 0:
            raise DomainError(f"Order parameter must be non-negative, got {r}")
        values = np.asarray(y, dtype=np.float64)
        flat = np.atleast_1d(values).ravel()
        if flat.size and not np.all(flat > 0):
            raise DomainError("K_ir(y) needs y > 0")
        result = np.empty(flat.size, dtype=np.float64)
        ordering = np.argsort(flat)
        for chunk in np.array_split(ordering, max(1, math.ceil(flat.size / EVALUATION_CHUNK))):
            if not chunk.size:
                continue
            ys = flat[chunk]
            top = self.truncation(float(ys.min()))
            t, w = composite_legendre(0.0, top, panels_for(top, self.panel_width(r, float(ys.max()))), self.order)
            # cosh t - 1 = 2 sinh^2(t/2)
            exponent = -ys[:, None] * (2 * np.sinh(t / 2) ** 2)
            if not scaled:
                exponent -= ys[:, None]
            result[chunk] = np.exp(exponent) @ (w * np.cos(r * t))
        result = result.reshape(values.shape)
        return result if result.ndim else float(result)

class TestFunction(BaseModel):
    """amplitude * exp(-1/(1-t^2)) with t the affine image of (lower, upper) onto (-1, 1)."""
    __test__ = False

    lower: float
    upper: float
    amplitude: float = 1.0

    @model_validator(mode="after")
    def _check_support(self) -> "TestFunction":
        if not 0 < self.lower < self.upper:
            raise ValueError(f"Support ({self.lower}, {self.upper}) must lie in (0, inf)")
        return self

    def __call__(self, y: ArrayLike) -> ArrayLike:
        t = (2 * np.asarray(y, dtype=np.float64) - (self.lower + self.upper)) / (self.upper - self.lower)
        return self.amplitude * bump(t)

    def log_nodes(self, panels: int = TEST_FUNCTION_PANELS):
        return composite_legendre(math.log(self.lower), math.log(self.upper), panels)

    def mellin(self, s: complex, panels: int = TEST_FUNCTION_PANELS) -> complex:
        """G(s) = int g(y) y^(s-1) dy, over u = log y."""
        u, w = self.log_nodes(panels)
        return complex(np.sum(w * self(np.exp(u)) * np.exp(complex(s) * u)))

    def decay_constant(self, ss: Iterable[complex]) -> float:
        """max |G(s)| (1 + |s|)^2 over the given points."""
        return max(abs(self.mellin(s)) * (1 + abs(s)) ** 2 for s in ss)

class MellinCheck(BaseModel):
    mu: float
    nu: float
    s_re: float
    s_im: float = 0.0
    numeric_re: float
    numeric_im: float
    closed_re: float
    closed_im: float
    rel_err: float

    @property
    def numeric(self) -> complex:
        return complex(self.numeric_re, self.numeric_im)

    @property
    def closed_form(self) -> complex:
        return complex(self.closed_re, self.closed_im)

    def __json__(self) -> dict:
        return self.model_dump()

class SquareIntegral(BaseModel):
    w: float
    r: float
    value: float
    normalized: float

    def __json__(self) -> dict:
        return {
            "w": self.w,
            "r": self.r,
            "I": self.value,
            "normalized": self.normalized
        }

class SquareMoment(BaseModel):
    r: float
    sigma: float
    value: float
    normalized: float

class TheoremB5Grid(BaseModel):
    entries: List[SquareIntegral]
    reference: float
    max_normalized: float
    min_normalized: float

    @property
    def max_over_min(self) -> Optional[float]:
        return self.max_normalized / self.min_normalized if self.min_normalized > 0 else None

    @property
    def max_over_reference(self) -> float:
        return self.max_normalized / self.reference

    def __json__(self) -> dict:
        return {
            "reference": self.reference,
            "max_normalized": self.max_normalized,
            "min_normalized": self.min_normalized,
            "max_over_min": self.max_over_min,
            "max_over_reference": self.max_over_reference
        }

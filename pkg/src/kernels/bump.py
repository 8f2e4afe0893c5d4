import numpy as np

from scipy.special import expit
from typing import Union

ArrayLike = Union[float, np.ndarray]

def bump(t: ArrayLike) -> ArrayLike:
    """exp(-1/(1-t^2)) on (-1, 1), zero outside."""
    t = np.asarray(t, dtype=np.float64)
    inside = np.abs(t) < 1
    safe = np.where(inside, t, 0.0)
    values = np.where(inside, np.exp(-1.0 / (1.0 - safe ** 2)), 0.0)
    return values if values.ndim else float(values)

def smooth_step(t: ArrayLike) -> ArrayLike:
    """C-infinity step f(t) / (f(t) + f(1 - t)) with f(t) = exp(-1/t) for t > 0, 0 otherwise.

    Equal to 0 for t <= 0 and 1 for t >= 1; smooth_step(1 - t) = 1 - smooth_step(t).
    """
    t = np.asarray(t, dtype=np.float64)
    inside = (t > 0) & (t < 1)
    safe = np.where(inside, t, 0.5)
    values = np.where(inside, expit(1.0 / (1.0 - safe) - 1.0 / safe), np.where(t >= 1, 1.0, 0.0))
    return values if values.ndim else float(values)

import math
import numpy as np

from functools import lru_cache
from numpy.polynomial.legendre import leggauss
from typing import Tuple

DEFAULT_ORDER = 16

@lru_cache(maxsize=8)
def _reference_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights

def composite_legendre(a: float, b: float, panels: int, order: int = DEFAULT_ORDER) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of `order`-point Gauss-Legendre on `panels` equal pieces of [a, b]."""
    panels = max(1, int(panels))
    nodes, weights = _reference_rule(order)
    edges = np.linspace(a, b, panels + 1)
    half = (edges[1:] - edges[:-1]) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    return (mid[:, None] + half[:, None] * nodes).ravel(), (half[:, None] * weights).ravel()

def panels_for(length: float, width: float) -> int:
    return max(1, math.ceil(length / width))

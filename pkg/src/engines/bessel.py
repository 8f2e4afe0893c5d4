import logging
import math
import numpy as np

from typing import Callable, Iterable, List, Optional

from exceptions import ArgumentError, DomainError, RangeError
from kernels.gamma import abs_gamma_half_line, complex_gamma, gamma_product_imaginary
from kernels.quadrature import composite_legendre, panels_for
from models.bessel import BesselEvaluator, MellinCheck, SquareIntegral, SquareMoment, TestFunction, TheoremB5Grid
from models.eigenvalue_table import EigenvalueTable

logger = logging.getLogger(__name__)

# Gamma(s/2) has residue 2 at s = 0, so the s = 0 pole carries half of Gamma(ir) Gamma(-ir) G(0)
RESIDUE_COEFFICIENT = 0.5
MELLIN_GRID = ((0.0, 0.0, 1.0), (1.0, 1.0, 1.0), (1.0, 0.0, 1.5), (2.0, 1.0, 2.0), (0.5, 2.0, 1 + 0.5j), (3.0, 3.0, 2.5))
THEOREM_B5_RS = tuple(range(1, 13))
THEOREM_B5_WS = (0.1, 1.0, 10.0)
KERNEL_PANELS = 32

def _evaluator(evaluator: Optional[BesselEvaluator]) -> BesselEvaluator:
    return evaluator or BesselEvaluator()

def bessel_K_imag(r: float, y: float, epsilon: Optional[float] = None) -> float:
    """K_{ir}(y) for y > 0, r >= 0, to absolute accuracy epsilon * max(1, exp(-y))."""
    if y <= 0 or r < 0:
        raise DomainError(f"K_ir(y) needs y > 0 and r >= 0, got r = {r}, y = {y}")
    evaluator = BesselEvaluator() if epsilon is None else BesselEvaluator(epsilon=epsilon)
    return evaluator.evaluate(r, y)

def mellin_closed_form(mu: float, nu: float, s: complex) -> complex:
    """2^(s-3) / Gamma(s) * prod Gamma((s +- i mu +- i nu) / 2)."""
    s = complex(s)
    value = 2 ** (s - 3) / complex_gamma(s)
    for a in (mu + nu, mu - nu, -mu + nu, -mu - nu):
        value *= complex_gamma((s + 1j * a) / 2)
    return value

def _mellin_numeric(evaluator: BesselEvaluator, mu: float, nu: float, s: complex) -> complex:
    """int_0^inf K_{i mu}(y) K_{i nu}(y) y^(s-1) dy over u = log y."""
    u_min = max(-45.0 / s.real, -700.0)
    u_max = math.log(40.0 + 4 * s.real)
    width = min(0.5, 2 * math.pi / (mu + nu + abs(s.imag) + 1))
    u, w = composite_legendre(u_min, u_max, panels_for(u_max - u_min, width), evaluator.order)
    y = np.exp(u)
    k_mu = evaluator.evaluate(mu, y)
    k_nu = k_mu if nu == mu else evaluator.evaluate(nu, y)
    return complex(np.sum(w * k_mu * k_nu * np.exp(s * u)))

def mellin_gamma_check(mu: float, nu: float, s: complex,
                       evaluator: Optional[BesselEvaluator] = None) -> MellinCheck:
    s = complex(s)
    if s.real <= 0:
        raise DomainError(f"Mellin transform of K K needs Re s > 0, got {s}")
    numeric = _mellin_numeric(_evaluator(evaluator), abs(mu), abs(nu), s)
    closed = mellin_closed_form(mu, nu, s)
    return MellinCheck(mu=mu, nu=nu, s_re=s.real, s_im=s.imag, numeric_re=numeric.real, numeric_im=numeric.imag,
                       closed_re=closed.real, closed_im=closed.imag, rel_err=abs(numeric - closed) / abs(closed))

def mellin_grid(evaluator: Optional[BesselEvaluator] = None) -> List[MellinCheck]:
    evaluator = _evaluator(evaluator)
    return [mellin_gamma_check(mu, nu, s, evaluator) for mu, nu, s in MELLIN_GRID]

def _square_integral(g: TestFunction, w: float, r: float, evaluator: BesselEvaluator) -> float:
    # K_{ir}(wy)^2 oscillates with frequency up to 2r in log y
    length = math.log(g.upper / g.lower)
    u, weights = g.log_nodes(max(16, math.ceil(4 * (r + 1) * length)))
    y = np.exp(u)
    return float(np.sum(weights * g(y) * evaluator.evaluate(r, w * y) ** 2))

def _log_scaled(value: float, log_factor: float) -> float:
    """value * exp(log_factor) without forming exp(log_factor)."""
    if value == 0:
        return 0.0
    return math.copysign(math.exp(math.log(abs(value)) + log_factor), value)

def weighted_square_integral(g: TestFunction, w: float, r: float,
                             evaluator: Optional[BesselEvaluator] = None) -> SquareIntegral:
    """I = int g(y) K_{ir}(wy)^2 dy / y and r exp(pi r) I."""
    if w <= 0 or r <= 0:
        raise DomainError(f"Need w > 0 and r > 0, got w = {w}, r = {r}")
    value = _square_integral(g, w, r, _evaluator(evaluator))
    return SquareIntegral(w=w, r=r, value=value, normalized=_log_scaled(value, math.log(r) + math.pi * r))

def residue_closed_form(g: TestFunction, r: float) -> float:
    return RESIDUE_COEFFICIENT * gamma_product_imaginary(r) * g.mellin(0).real

def residue_formula_error(g: TestFunction, r: float, evaluator: Optional[BesselEvaluator] = None) -> float:
    """(int g K_{ir}^2 dy / y - G(0) Gamma(ir) Gamma(-ir) / 2) * r^2 exp(pi r)."""
    if r < 2:
        raise DomainError(f"Residue formula check needs r >= 2, got {r}")
    difference = _square_integral(g, 1.0, r, _evaluator(evaluator)) - residue_closed_form(g, r)
    return _log_scaled(difference, 2 * math.log(r) + math.pi * r)

def residue_relative_error(g: TestFunction, r: float, evaluator: Optional[BesselEvaluator] = None) -> float:
    closed = residue_closed_form(g, r)
    return abs(_square_integral(g, 1.0, r, _evaluator(evaluator)) - closed) / closed

def bessel_bound_constant(r: float, y: float, evaluator: Optional[BesselEvaluator] = None) -> float:
    """|K_{ir}(y)| y^2 / (|Gamma(1/2 + ir)| (1 + r^2))."""
    k = _evaluator(evaluator).evaluate(r, y)
    return abs(k) * y ** 2 / (abs_gamma_half_line(r) * (1 + r ** 2))

def asymptotic_constant(r: float, y: float, evaluator: Optional[BesselEvaluator] = None) -> float:
    """|K - sqrt(pi/2y) e^-y| y / ((1 + r^2) sqrt(pi/2y) e^-y), for y >= 1 + r^2."""
    if y < 1 + r ** 2:
        raise DomainError(f"Asymptotic regime needs y >= 1 + r^2, got r = {r}, y = {y}")
    scaled = _evaluator(evaluator).evaluate(r, y, scaled=True)
    return abs(scaled * math.sqrt(2 * y / math.pi) - 1) * y / (1 + r ** 2)

def square_moment(r: float, sigma: float, evaluator: Optional[BesselEvaluator] = None) -> SquareMoment:
    """int K_{ir}^2 y^(sigma-1) dy and its r^(1-sigma) exp(pi r) normalization."""
    if sigma <= 0 or r <= 0:
        raise DomainError(f"Need sigma > 0 and r > 0, got sigma = {sigma}, r = {r}")
    value = _mellin_numeric(_evaluator(evaluator), r, r, complex(sigma)).real
    return SquareMoment(r=r, sigma=sigma, value=value,
                        normalized=_log_scaled(value, (1 - sigma) * math.log(r) + math.pi * r))

def theorem_b5_grid(g: TestFunction, ws: Iterable[float] = THEOREM_B5_WS, rs: Iterable[float] = THEOREM_B5_RS,
                    evaluator: Optional[BesselEvaluator] = None) -> TheoremB5Grid:
    """r exp(pi r) I over the (w, r) grid, against the large-r limit pi G(0)."""
    evaluator = _evaluator(evaluator)
    entries = [weighted_square_integral(g, w, r, evaluator) for w in ws for r in rs]
    if not entries:
        raise ArgumentError("Empty (w, r) grid")
    normalized = [entry.normalized for entry in entries]
    grid = TheoremB5Grid(entries=entries, reference=math.pi * g.mellin(0).real,
                         max_normalized=max(normalized), min_normalized=min(normalized))
    logger.info(f"Normalized square integrals: max {grid.max_normalized:.4e}, min {grid.min_normalized:.4e}")
    return grid

def kernel_shifted_sum(table: EigenvalueTable, X: float, r: float, ell: int, h: TestFunction, g: TestFunction,
                       weight: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                       evaluator: Optional[BesselEvaluator] = None) -> float:
    """sum_n h(|n|/rX) h(|n+l|/rX) lambda(n) lambda(n+l) int w(y) g(Xy) K_ir(2pi|n|y) K_ir(2pi|n+l|y) dy / y."""
    if ell == 0 or X <= 0 or r <= 0:
        raise ArgumentError(f"Need l != 0, X > 0 and r > 0, got l = {ell}, X = {X}, r = {r}")
    scale = r * X
    reach = int(math.floor(h.upper * scale))
    if reach > table.limit:
        raise RangeError(f"Coefficients needed up to {reach}, table ends at {table.limit}")
    n = np.arange(-reach - abs(ell), reach + 1, dtype=np.int64)
    m = n + ell
    keep = (n != 0) & (m != 0) & (np.abs(n) <= reach) & (np.abs(m) <= reach)
    n, m = n[keep], m[keep]
    h_weights = h(np.abs(n) / scale) * h(np.abs(m) / scale)
    live = h_weights != 0
    n, m, h_weights = n[live], m[live], h_weights[live]
    if not n.size:
        return 0.0
    evaluator = _evaluator(evaluator)
    u, w = composite_legendre(math.log(g.lower / X), math.log(g.upper / X), KERNEL_PANELS, evaluator.order)
    y = np.exp(u)
    y_weights = w * g(X * y) * (weight(y) if weight is not None else 1.0)
    k_n = evaluator.evaluate(r, 2 * math.pi * np.abs(n)[:, None] * y[None, :])
    k_m = evaluator.evaluate(r, 2 * math.pi * np.abs(m)[:, None] * y[None, :])
    integrals = (k_n * k_m) @ y_weights
    coefficients = table.at(np.abs(n)) * table.at(np.abs(m))
    return float(np.sum(h_weights * coefficients * integrals))

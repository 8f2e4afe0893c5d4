import cmath
import math

LANCZOS_G = 7
LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7
)

def complex_gamma(z: complex) -> complex:
    """Gamma(z) by the Lanczos approximation, reflected into Re z >= 1/2."""
    z = complex(z)
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * complex_gamma(1 - z))
    z -= 1
    series = LANCZOS_COEFFICIENTS[0]
    for i, c in enumerate(LANCZOS_COEFFICIENTS[1:], start=1):
        series += c / (z + i)
    t = z + LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * cmath.exp((z + 0.5) * cmath.log(t) - t) * series

def log_cosh(x: float) -> float:
    x = abs(x)
    return x + math.log1p(math.exp(-2 * x)) - math.log(2)

def log_sinh(x: float) -> float:
    return x + math.log1p(-math.exp(-2 * x)) - math.log(2)

def abs_gamma_half_line(r: float) -> float:
    """|Gamma(1/2 + ir)| = sqrt(pi / cosh(pi r))."""
    return math.exp((math.log(math.pi) - log_cosh(math.pi * r)) / 2)

def gamma_product_imaginary(r: float) -> float:
    """Gamma(ir) Gamma(-ir) = pi / (r sinh(pi r)), r > 0."""
    return math.exp(math.log(math.pi) - math.log(r) - log_sinh(math.pi * r))

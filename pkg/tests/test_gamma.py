import math
import mpmath
import pytest

from kernels.gamma import abs_gamma_half_line, complex_gamma, gamma_product_imaginary, log_cosh, log_sinh

@pytest.mark.parametrize("z", [0.5, 1.0, 3.7, 1 + 2j, 0.25 + 5j, -1.5 + 0.5j, 2.5 - 6j])
def test_complex_gamma_against_mpmath(z):
    expected = complex(mpmath.gamma(z))
    assert abs(complex_gamma(z) - expected) <= 1e-12 * abs(expected)

def test_gamma_at_half():
    assert complex_gamma(0.5).real == pytest.approx(math.sqrt(math.pi), rel=1e-14)

@pytest.mark.parametrize("r", [0.0, 0.5, 1.0, 5.0, 12.0, 40.0])
def test_abs_gamma_half_line(r):
    expected = float(abs(mpmath.gamma(0.5 + 1j * r)))
    assert abs_gamma_half_line(r) == pytest.approx(expected, rel=1e-12)

@pytest.mark.parametrize("r", [0.1, 1.0, 3.0, 10.0, 60.0])
def test_gamma_product_imaginary(r):
    expected = float((mpmath.gamma(1j * r) * mpmath.gamma(-1j * r)).real)
    assert gamma_product_imaginary(r) == pytest.approx(expected, rel=1e-12)

def test_log_hyperbolics():
    assert log_cosh(0.0) == 0.0
    assert log_cosh(-2.0) == pytest.approx(math.log(math.cosh(2.0)))
    assert log_sinh(3.0) == pytest.approx(math.log(math.sinh(3.0)))
    assert log_sinh(800.0) == pytest.approx(800.0 - math.log(2.0))

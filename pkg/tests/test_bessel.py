import math
import mpmath
import numpy as np
import pytest

from engines.bessel import (asymptotic_constant, bessel_bound_constant, bessel_K_imag, kernel_shifted_sum,
                            mellin_closed_form, mellin_gamma_check, mellin_grid, residue_closed_form,
                            residue_formula_error, residue_relative_error, square_moment, theorem_b5_grid,
                            weighted_square_integral)
from exceptions import ArgumentError, DomainError, RangeError
from models.bessel import BesselEvaluator, TestFunction

@pytest.fixture(scope="module")
def evaluator():
    return BesselEvaluator()

@pytest.fixture(scope="module")
def bump_1_2():
    return TestFunction(lower=1.0, upper=2.0)

def _mp_k(r: float, y: float) -> float:
    return float(mpmath.besselk(1j * r, y).real)

def test_k0_at_one():
    assert bessel_K_imag(0.0, 1.0) == pytest.approx(0.421024438240708, abs=1e-12)

@pytest.mark.parametrize("r, y", [(0.0, 0.01), (1.0, 0.5), (2.5, 3.0), (5.0, 2.0), (10.0, 20.0), (12.0, 0.3),
                                  (3.0, 40.0)])
def test_k_against_mpmath(evaluator, r, y):
    assert evaluator.evaluate(r, y) == pytest.approx(_mp_k(r, y), abs=1e-11)

def test_vectorized_matches_scalar(evaluator):
    ys = np.array([[0.2, 1.0], [5.0, 30.0]])
    values = evaluator.evaluate(4.0, ys)
    assert values.shape == (2, 2)
    for y, value in zip(ys.ravel(), values.ravel()):
        assert value == pytest.approx(evaluator.evaluate(4.0, float(y)), abs=1e-11)

def test_scaled_evaluation(evaluator):
    expected = float((mpmath.besselk(2j, 100) * mpmath.exp(100)).real)
    assert evaluator.evaluate(2.0, 100.0, scaled=True) == pytest.approx(expected, rel=1e-9)

def test_domain_errors(evaluator):
    with pytest.raises(DomainError):
        bessel_K_imag(1.0, 0.0)
    with pytest.raises(DomainError):
        bessel_K_imag(-1.0, 1.0)
    with pytest.raises(DomainError):
        evaluator.evaluate(1.0, np.array([1.0, -2.0]))

def test_evaluator_accuracy_range():
    with pytest.raises(ValueError):
        BesselEvaluator(epsilon=1e-2)

def test_mellin_closed_form_at_one():
    assert mellin_closed_form(0.0, 0.0, 1.0).real == pytest.approx(math.pi ** 2 / 4, rel=1e-13)

def test_mellin_grid_agrees(evaluator):
    checks = mellin_grid(evaluator)
    assert len(checks) == 6
    for check in checks:
        assert check.rel_err < 1e-6

def test_mellin_symmetry(evaluator):
    forward = mellin_gamma_check(1.0, 0.0, 1.5, evaluator)
    backward = mellin_gamma_check(0.0, 1.0, 1.5, evaluator)
    assert forward.closed_form == pytest.approx(backward.closed_form, rel=1e-14)
    assert forward.numeric == pytest.approx(backward.numeric, rel=1e-12)
    with pytest.raises(DomainError):
        mellin_gamma_check(1.0, 1.0, -0.5, evaluator)

def test_square_integral_positive_and_decaying(evaluator, bump_1_2):
    near = weighted_square_integral(bump_1_2, 1.0, 1.0, evaluator)
    far = weighted_square_integral(bump_1_2, 10.0, 1.0, evaluator)
    assert near.value > 0
    assert far.value > 0
    assert far.value < near.value
    assert near.normalized == pytest.approx(near.value * math.exp(math.pi), rel=1e-12)
    with pytest.raises(DomainError):
        weighted_square_integral(bump_1_2, 0.0, 1.0, evaluator)

def test_theorem_b5_grid_is_bounded(evaluator, bump_1_2):
    grid = theorem_b5_grid(bump_1_2, evaluator=evaluator)
    assert len(grid.entries) == 36
    assert grid.reference == pytest.approx(math.pi * bump_1_2.mellin(0).real)
    assert grid.max_over_reference < 100
    assert grid.min_normalized > 0
    with pytest.raises(ArgumentError):
        theorem_b5_grid(bump_1_2, ws=[], evaluator=evaluator)

def test_residue_closed_form(bump_1_2):
    r = 5.0
    expected = 0.5 * math.pi / (r * math.sinh(math.pi * r)) * bump_1_2.mellin(0).real
    assert residue_closed_form(bump_1_2, r) == pytest.approx(expected, rel=1e-12)

def test_residue_agreement_improves_with_r(evaluator):
    g = TestFunction(lower=0.5, upper=4.0)
    assert residue_relative_error(g, 10.0, evaluator) < residue_relative_error(g, 3.0, evaluator)
    assert math.isfinite(residue_formula_error(g, 5.0, evaluator))
    with pytest.raises(DomainError):
        residue_formula_error(g, 1.0, evaluator)

def test_bound_constant_on_grid(evaluator):
    worst = max(bessel_bound_constant(r, y, evaluator) for r in range(1, 13) for y in np.geomspace(0.5, 50, 25))
    assert worst <= 2

def test_asymptotic_constant(evaluator):
    for r in (0.0, 1.0, 3.0, 6.0):
        for factor in (1.0, 2.0, 10.0):
            assert asymptotic_constant(r, factor * (1 + r ** 2), evaluator) <= 2
    with pytest.raises(DomainError):
        asymptotic_constant(3.0, 5.0, evaluator)

def test_square_moments_are_positive(evaluator):
    for r in (2.0, 6.0):
        for sigma in (0.5, 1.0, 1.5):
            moment = square_moment(r, sigma, evaluator)
            assert moment.value > 0
            assert math.isfinite(moment.normalized)

def test_kernel_sum_vanishes_for_zero_weight(delta_table, evaluator, bump_1_2):
    h = TestFunction(lower=0.5, upper=1.5, amplitude=0.0)
    assert kernel_shifted_sum(delta_table, 5.0, 10.0, 1, h, bump_1_2, evaluator=evaluator) == 0.0

def test_kernel_sum_single_term(delta_table, evaluator, bump_1_2):
    h = TestFunction(lower=0.5, upper=1.5)
    # only n = -1, n + 2 = 1 survives |n|, |n + 2| <= 1
    value = kernel_shifted_sum(delta_table, 1.0, 1.0, 2, h, bump_1_2, evaluator=evaluator)
    expected = h(1.0) ** 2 * weighted_square_integral(bump_1_2, 2 * math.pi, 1.0, evaluator).value
    assert value == pytest.approx(expected, rel=1e-6)

def test_kernel_sum_scales_quadratically(delta_table, evaluator, bump_1_2):
    h = TestFunction(lower=0.5, upper=1.5)
    base = kernel_shifted_sum(delta_table, 5.0, 10.0, 1, h, bump_1_2, evaluator=evaluator)
    scaled = kernel_shifted_sum(delta_table.scaled(3.0), 5.0, 10.0, 1, h, bump_1_2, evaluator=evaluator)
    assert math.isfinite(base)
    assert scaled == pytest.approx(9.0 * base, rel=1e-12)

def test_kernel_sum_errors(delta_table, bump_1_2):
    h = TestFunction(lower=0.5, upper=1.5)
    with pytest.raises(ArgumentError):
        kernel_shifted_sum(delta_table, 5.0, 10.0, 0, h, bump_1_2)
    with pytest.raises(RangeError):
        kernel_shifted_sum(delta_table, 1e4, 10.0, 1, h, bump_1_2)

import math
import numpy as np
import pytest

from engines.dirichlet import (characters_mod_q, equidistribution_spread, progression_error_exponent,
                               progression_eta_sum, residue_class_sums, smoothed_dyadic_sum, twisted_eta_sum)
from engines.shiftsums import calibrate_rankin_selberg
from exceptions import ArgumentError, RangeError
from models.shifted import EtaFunction

@pytest.fixture(scope="module")
def ones_eta(ones_table):
    return EtaFunction.create(ones_table)

def test_trivial_modulus():
    table = characters_mod_q(1)
    assert len(table) == 1
    assert table.characters[0](5) == 1

def test_characters_mod_3():
    table = characters_mod_q(3)
    assert len(table) == 2
    principal, quadratic = table.characters
    assert principal.is_principal
    assert principal(2) == 1
    assert quadratic(2) == pytest.approx(-1)
    assert quadratic(3) == 0

@pytest.mark.parametrize("q", [4, 5, 8, 12, 16, 45, 50])
def test_character_orthogonality(q):
    table = characters_mod_q(q)
    assert len(table) == int(round(sum(1 for r in range(q) if math.gcd(r, q) == 1)))
    assert table.orthogonality_error() < 1e-10

def test_characters_are_multiplicative():
    for chi in characters_mod_q(20).characters:
        for m in range(1, 20):
            for n in range(1, 20):
                assert chi(m * n) == pytest.approx(chi(m) * chi(n), abs=1e-12)

def test_modulus_must_be_positive():
    with pytest.raises(ArgumentError):
        characters_mod_q(0)

def test_twisted_sums(delta_eta):
    principal_one = characters_mod_q(1).characters[0]
    assert twisted_eta_sum(delta_eta, principal_one, 1000) == pytest.approx(delta_eta.values[1:1001].sum())
    principal_two = characters_mod_q(2).characters[0]
    assert twisted_eta_sum(delta_eta, principal_two, 1000) == pytest.approx(delta_eta.values[1:1001:2].sum())
    with pytest.raises(RangeError):
        twisted_eta_sum(delta_eta, principal_one, delta_eta.limit + 1)

def test_progression_on_stub(ones_table, ones_eta):
    calibration = calibrate_rankin_selberg(ones_table, etafn=ones_eta)
    result = progression_eta_sum(ones_eta, 1, 4, 100, calibration)
    assert result.direct == 25.0
    assert result.via_orthogonality == pytest.approx(25.0, abs=1e-9)

def test_progression_reconstruction(delta_eta, delta_calibration):
    for q in (1, 7, 12, 50):
        for m in (1, q - 1):
            if math.gcd(m, q) != 1:
                continue
            result = progression_eta_sum(delta_eta, m, q, delta_eta.limit, delta_calibration)
            assert abs(result.direct - result.via_orthogonality) <= 1e-7 * abs(result.direct)
            assert result.main > 0

def test_progression_needs_reduced_residue(delta_eta, delta_calibration):
    with pytest.raises(ArgumentError):
        progression_eta_sum(delta_eta, 2, 4, 100, delta_calibration)

def test_progressions_partition_the_coprime_total(delta_eta, delta_calibration):
    q, x = 12, delta_eta.limit
    classes = [progression_eta_sum(delta_eta, m, q, x, delta_calibration).direct
               for m in range(1, q) if math.gcd(m, q) == 1]
    sums = residue_class_sums(delta_eta, q, x)
    total = sum(sums[r] for r in range(q) if math.gcd(r, q) == 1)
    assert math.fsum(classes) == pytest.approx(total, rel=1e-9)

def test_equidistribution(delta_eta):
    assert equidistribution_spread(delta_eta, 7, delta_eta.limit) < 0.15

def test_error_exponent_is_finite(delta_eta, delta_calibration):
    slope = progression_error_exponent(delta_eta, 1, 5, [2000, 5000, 10_000, 20_000], delta_calibration)
    assert math.isfinite(slope)
    with pytest.raises(ArgumentError):
        progression_error_exponent(delta_eta, 1, 5, [2000], delta_calibration)

def test_sharp_sum_of_ones():
    result = smoothed_dyadic_sum(np.ones(400), 100, 10)
    assert result.sharp == 101.0
    assert result.minorant <= result.sharp <= result.majorant
    assert result.main == 100.0

def test_widest_mollification():
    result = smoothed_dyadic_sum(np.ones(400), 100, 100)
    assert result.minorant <= result.sharp <= result.majorant
    assert result.minorant < result.sharp < result.majorant

def test_smoothed_sum_of_eta(delta_eta):
    x = 5000.0
    y = x ** 0.75
    result = smoothed_dyadic_sum(delta_eta.values, x, y, residue=float(delta_eta.values[1:].mean()))
    assert result.minorant <= result.sharp <= result.majorant
    assert result.error_bound > 0

def test_smoothed_sum_errors():
    with pytest.raises(ArgumentError):
        smoothed_dyadic_sum(np.ones(400), 100, 101)
    with pytest.raises(ArgumentError):
        smoothed_dyadic_sum(np.ones(400), 100, 0.5)
    with pytest.raises(RangeError):
        smoothed_dyadic_sum(np.ones(200), 100, 10)
    coeffs = np.ones(400)
    coeffs[150] = -1.0
    with pytest.raises(ArgumentError):
        smoothed_dyadic_sum(coeffs, 100, 10)

@pytest.mark.acceptance
@pytest.mark.parametrize("q", [3, 5, 7, 11])
def test_equidistribution_at_scale(large_delta_eta, q):
    assert equidistribution_spread(large_delta_eta, q, 1_000_000) < 0.05

@pytest.mark.acceptance
def test_orthogonality_reconstruction_at_scale(large_delta_eta, large_calibration):
    for q in range(1, 51):
        for m in range(1, q + 1):
            if math.gcd(m, q) == 1:
                result = progression_eta_sum(large_delta_eta, m, q, 1_000_000, large_calibration)
                assert result.via_orthogonality == pytest.approx(result.direct, rel=1e-7)

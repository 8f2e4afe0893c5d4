import math
import numpy as np
import pytest

from kernels.arith import multiplicative_fill, prime_power_exponents, prime_power_split
from kernels.bump import bump, smooth_step
from kernels.primes import divisor_counts, euler_phi, prime_divisors, primes_up_to, smallest_prime_factors, squarefree
from kernels.quadrature import composite_legendre, panels_for
from kernels.summation import block_sum, log_product, thread_scope, worker_threads

def test_primes_up_to():
    assert list(primes_up_to(30)) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert list(primes_up_to(29.9)) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert list(primes_up_to(28.9)) == [2, 3, 5, 7, 11, 13, 17, 19, 23]
    assert primes_up_to(1).size == 0

def test_smallest_prime_factors():
    spf = smallest_prime_factors(30)
    assert spf[1] == 1
    assert [int(spf[n]) for n in (2, 9, 15, 25, 29, 30)] == [2, 3, 3, 5, 29, 2]

def test_arithmetic_helpers():
    assert euler_phi(12) == 4
    assert prime_divisors(60) == [2, 3, 5]
    assert prime_divisors(1) == []
    assert squarefree(30)
    assert not squarefree(12)
    assert list(divisor_counts(6)[1:]) == [1, 2, 2, 3, 2, 4]

def test_prime_power_split():
    spf, part, rest = prime_power_split(100)
    assert (int(spf[72]), int(part[72]), int(rest[72])) == (2, 8, 9)
    assert (int(spf[49]), int(part[49]), int(rest[49])) == (7, 49, 1)
    exponents = prime_power_exponents(100)
    assert exponents[64] == 6
    assert exponents[81] == 4
    assert exponents[12] == 0

def test_multiplicative_fill_builds_divisor_function():
    limit = 200
    values = np.zeros(limit + 1)
    values[1] = 1.0
    exponents = prime_power_exponents(limit)
    powers = np.flatnonzero(exponents)
    values[powers] = exponents[powers] + 1
    filled = multiplicative_fill(values)
    assert np.array_equal(filled[1:], divisor_counts(limit)[1:].astype(np.float64))

def test_block_sum_is_independent_of_threads():
    values = np.random.default_rng(7).standard_normal(100_003)
    one = block_sum(values, threads=1, block_size=1000)
    many = block_sum(values, threads=8, block_size=1000)
    assert one == many
    assert one == pytest.approx(float(np.sum(values)), abs=1e-9)
    assert block_sum(np.array([])) == 0.0

def test_thread_scope_is_restored():
    default = worker_threads()
    with thread_scope(8):
        assert worker_threads() == 8
        assert worker_threads(2) == 2
    assert worker_threads() == default

def test_log_product():
    assert log_product(np.array([2.0, 3.0, 7.0])) == pytest.approx(math.log(42.0))

def test_composite_legendre_integrates_polynomials():
    nodes, weights = composite_legendre(0.0, 2.0, 4, 8)
    assert nodes.size == 32
    assert np.sum(weights * nodes ** 5) == pytest.approx(2.0 ** 6 / 6, rel=1e-13)
    assert panels_for(1.0, 0.3) == 4

def test_bump_and_step():
    assert bump(np.array([-1.0, 1.0, 2.0])).tolist() == [0.0, 0.0, 0.0]
    assert bump(0.0) == pytest.approx(math.exp(-1))
    assert smooth_step(0.0) == 0.0
    assert smooth_step(1.0) == 1.0
    assert smooth_step(0.5) == 0.5
    assert smooth_step(-3.0) == 0.0
    assert smooth_step(4.0) == 1.0
    assert smooth_step(0.25) == pytest.approx(1 / (1 + math.exp(4 - 4 / 3)), rel=1e-14)
    t = np.linspace(0.01, 0.99, 99)
    assert np.allclose(smooth_step(t) + smooth_step(1 - t), 1.0, atol=1e-15)
    steps = smooth_step(np.linspace(0.0, 1.0, 101))
    assert np.all(np.diff(steps) >= 0)

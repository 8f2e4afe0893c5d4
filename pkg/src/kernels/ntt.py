import logging
import numpy as np

from concurrent.futures import ThreadPoolExecutor
from sympy import isprime, primitive_root
from typing import List, Optional

from exceptions import CapacityError
from kernels.summation import worker_threads

logger = logging.getLogger(__name__)

# residues stay below 2^32 so that every product fits in uint64
PRIME_LIMIT = 2 ** 32

def transform_size(length: int) -> int:
    size = 1
    while size < length:
        size *= 2
    return size

def ntt_primes(size: int, modulus_bound: int) -> List[int]:
    """Largest primes p = k*size + 1 < 2^32 whose product exceeds modulus_bound."""
    primes: List[int] = []
    product = 1
    k = (PRIME_LIMIT - 2) // size
    while product <= modulus_bound and k > 0:
        candidate = k * size + 1
        if isprime(candidate):
            primes.append(candidate)
            product *= candidate
        k -= 1
    if product <= modulus_bound:
        raise CapacityError(f"Not enough NTT primes for transform size {size}")
    return primes

def _powers(base: int, count: int, prime: int) -> np.ndarray:
    powers = np.ones(1, dtype=np.uint64)
    while powers.size < count:
        step = np.uint64(pow(base, int(powers.size), prime))
        powers = np.concatenate((powers, powers * step % np.uint64(prime)))
    return powers[:count]

def _bit_reverse(size: int) -> np.ndarray:
    bits = size.bit_length() - 1
    index = np.arange(size, dtype=np.int64)
    reverse = np.zeros(size, dtype=np.int64)
    for bit in range(bits):
        reverse |= ((index >> bit) & 1) << (bits - 1 - bit)
    return reverse

class NttChannel:
    """Cyclic number theoretic transform of a fixed power-of-two size modulo one prime."""
    _prime: int
    _size: int

    def __init__(self, prime: int, size: int):
        if (prime - 1) % size:
            raise CapacityError(f"Prime {prime} does not support transform size {size}")
        self._prime = prime
        self._size = size
        root = pow(primitive_root(prime), (prime - 1) // size, prime)
        self._roots = _powers(root, max(size // 2, 1), prime)
        self._inverse_roots = _powers(pow(root, -1, prime), max(size // 2, 1), prime)
        self._size_inverse = np.uint64(pow(size, -1, prime))
        self._permutation = _bit_reverse(size)

    @property
    def prime(self) -> int:
        return self._prime

    def _transform(self, values: np.ndarray, roots: np.ndarray) -> np.ndarray:
        p = np.uint64(self._prime)
        values = values[self._permutation]
        half = 1
        while half < self._size:
            twiddles = roots[::self._size // (2 * half)][:half]
            blocks = values.reshape(-1, 2 * half)
            u = blocks[:, :half]
            v = blocks[:, half:] * twiddles % p
            values = np.concatenate(((u + v) % p, (u + p - v) % p), axis=1).ravel()
            half *= 2
        return values

    def reduce(self, coefficients: np.ndarray) -> np.ndarray:
        reduced = np.mod(np.asarray(coefficients, dtype=np.int64), self._prime).astype(np.uint64)
        padded = np.zeros(self._size, dtype=np.uint64)
        padded[:reduced.size] = reduced
        return padded

    def square(self, values: np.ndarray, length: int) -> np.ndarray:
        """Square a residue series and truncate it to its first length coefficients."""
        p = np.uint64(self._prime)
        padded = np.zeros(self._size, dtype=np.uint64)
        padded[:min(values.size, length)] = values[:length]
        spectrum = self._transform(padded, self._roots)
        spectrum = spectrum * spectrum % p
        result = self._transform(spectrum, self._inverse_roots) * self._size_inverse % p
        return result[:length]

class ResidueSeries:
    """A truncated integer power series held as residues over several NTT primes."""
    _primes: List[int]
    _residues: List[np.ndarray]

    def __init__(self, primes: List[int], residues: List[np.ndarray]):
        self._primes = primes
        self._residues = residues

    @property
    def primes(self) -> List[int]:
        return self._primes

    @property
    def modulus(self) -> int:
        modulus = 1
        for prime in self._primes:
            modulus *= prime
        return modulus

    def __len__(self) -> int:
        return self._residues[0].size

    @classmethod
    def square_chain(cls, coefficients: np.ndarray, squarings: int, length: int, modulus_bound: int,
                     threads: Optional[int] = None) -> "ResidueSeries":
        """Residues of (sum c_k q^k)^(2^squarings) mod q^length, exact while |coeff| < modulus_bound."""
        size = transform_size(2 * length - 1)
        primes = ntt_primes(size, 2 * modulus_bound)
        threads = worker_threads(threads)
        logger.debug(f"Residue channels: {len(primes)} primes, transform size {size}")

        def run_channel(prime: int) -> np.ndarray:
            channel = NttChannel(prime, size)
            values = channel.reduce(coefficients[:length])[:length]
            for _ in range(squarings):
                values = channel.square(values, length)
            return values

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as executor:
                residues = list(executor.map(run_channel, primes))
        else:
            residues = [run_channel(prime) for prime in primes]
        return cls(primes, residues)

    def mixed_radix_digits(self, start: int = 0, stop: Optional[int] = None) -> List[np.ndarray]:
        """Garner digits d_i with value = d_0 + d_1 p_0 + d_2 p_0 p_1 + ... in [0, modulus)."""
        digits: List[np.ndarray] = []
        for i, prime in enumerate(self._primes):
            p = np.uint64(prime)
            t = self._residues[i][start:stop].copy()
            for j, digit in enumerate(digits):
                inverse = np.uint64(pow(self._primes[j], -1, prime))
                t = (t + p - digit % p) % p * inverse % p
            digits.append(t)
        return digits

    def exact(self, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
        """Balanced integer representatives as a Python-int object array."""
        digits = self.mixed_radix_digits(start, stop)
        value = np.zeros(digits[0].size, dtype=object)
        weight = 1
        for prime, digit in zip(self._primes, digits):
            value = value + digit.astype(object) * weight
            weight *= prime
        modulus = weight
        negative = np.array([v > modulus // 2 for v in value], dtype=bool)
        value[negative] = value[negative] - modulus
        return value

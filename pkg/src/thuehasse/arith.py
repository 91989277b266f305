"""Integer helpers: prime sieves, valuations, CRT, bounded factorization,
and fraction-free determinants."""

from __future__ import annotations

import functools
import math
from typing import Iterable, Sequence

import sympy


class FactorizationBudgetExceeded(RuntimeError):
    """Raised when an integer resists factorization within the configured budget."""

    def __init__(self, n: int, cofactor: int):
        super().__init__(f"could not factor cofactor with {len(str(cofactor))} digits")
        self.n = n
        self.cofactor = cofactor


@functools.lru_cache(maxsize=8)
def primes_up_to(limit: int) -> tuple[int, ...]:
    if limit < 2:
        return ()
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def is_prime(n: int) -> bool:
    return n >= 2 and bool(sympy.isprime(n))


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    return int(sympy.nextprime(n))


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer (infinity is reported as a large sentinel for 0)."""
    if n == 0:
        return 10**9
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def mobius(r: int) -> int:
    if r < 1:
        raise ValueError("mobius is defined for r >= 1")
    result = 1
    for _, e in sympy.factorint(r).items():
        if e > 1:
            return 0
        result = -result
    return result


def crt(residues: Sequence[int], moduli: Sequence[int]) -> tuple[int, int]:
    """Combine x = r_i mod m_i for pairwise coprime moduli; returns (x mod M, M)."""
    x, m = 0, 1
    for r, mi in zip(residues, moduli):
        inv = pow(m, -1, mi)
        t = ((r - x) * inv) % mi
        x += m * t
        m *= mi
        x %= m
    return x, m


def _split(n: int, rho_steps: int) -> int | None:
    """Find a nontrivial factor of a composite n, or None within budget."""
    for seed in (2, 3, 5, 7):
        d = sympy.pollard_rho(n, s=seed, max_steps=rho_steps, retries=0)
        if d and 1 < d < n:
            return int(d)
    d = sympy.pollard_pm1(n, B=rho_steps, retries=0)
    if d and 1 < d < n:
        return int(d)
    return None


@functools.lru_cache(maxsize=256)
def _factor_cached(n: int, trial_limit: int, rho_steps: int) -> tuple[tuple[int, int], ...]:
    original = n
    factors: dict[int, int] = {}
    for p in primes_up_to(trial_limit):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors[p] = e
    stack = [n] if n > 1 else []
    while stack:
        c = stack.pop()
        if c == 1:
            continue
        if is_prime(c):
            factors[c] = factors.get(c, 0) + 1
            continue
        root, exact = sympy.integer_nthroot(c, 2)
        if exact:
            stack.extend([int(root), int(root)])
            continue
        d = _split(c, rho_steps)
        if d is None:
            raise FactorizationBudgetExceeded(original, c)
        stack.extend([d, c // d])
    return tuple(sorted(factors.items()))


def factor(n: int, trial_limit: int = 10**6, rho_steps: int = 20000) -> dict[int, int]:
    """Factor |n| by trial division, primality testing and a bounded rho/p-1 fallback.

    Deterministic: the same input always succeeds or always raises
    FactorizationBudgetExceeded.
    """
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    return dict(_factor_cached(n, trial_limit, rho_steps))


def prime_divisors(n: int, **budget) -> list[int]:
    return sorted(factor(n, **budget)) if abs(n) > 1 else []


def bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix by fraction-free elimination."""
    a = [list(row) for row in matrix]
    size = len(a)
    if size == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(size - 1):
        if a[k][k] == 0:
            for i in range(k + 1, size):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, size):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, size):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[-1][-1]


def gcd_all(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, v)
    return g

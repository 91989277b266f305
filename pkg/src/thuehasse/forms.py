"""Exact arithmetic on integral binary forms.

Coefficient convention used everywhere: ``coeffs[i]`` multiplies
``x^(n-i) y^i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .arith import bareiss_det, gcd_all


@dataclass(frozen=True)
class BinaryForm:
    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int]):
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) < 2:
            raise ValueError("a binary form needs at least 2 coefficients")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: int, y: int) -> int:
        return evaluate(self, x, y)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __repr__(self):
        return f"BinaryForm({list(self.coeffs)})"

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence) -> "BinaryForm":
        return cls(int(c) for c in data)


@dataclass(frozen=True)
class IntegerSubstitution:
    """(x, y) -> (a x + b y, c x + d y)."""

    a: int
    b: int
    c: int
    d: int

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "IntegerSubstitution") -> "IntegerSubstitution":
        return IntegerSubstitution(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    @classmethod
    def identity(cls) -> "IntegerSubstitution":
        return cls(1, 0, 0, 1)

    def as_rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]


def _as_form(F) -> BinaryForm:
    return F if isinstance(F, BinaryForm) else BinaryForm(F)


def evaluate(F, x: int, y: int) -> int:
    coeffs = F.coeffs if isinstance(F, BinaryForm) else tuple(F)
    r = coeffs[0]
    ypow = 1
    for c in coeffs[1:]:
        ypow *= y
        r = r * x + c * ypow
    return r


def linear_power(a: int, b: int, e: int) -> list[int]:
    """Coefficients of (a x + b y)^e in the x^(e-k) y^k convention."""
    out = [0] * (e + 1)
    apow = [1] * (e + 1)
    bpow = [1] * (e + 1)
    for i in range(1, e + 1):
        apow[i] = apow[i - 1] * a
        bpow[i] = bpow[i - 1] * b
    for k in range(e + 1):
        out[k] = math.comb(e, k) * apow[e - k] * bpow[k]
    return out


def multiply(P: Sequence[int], Q: Sequence[int]) -> list[int]:
    out = [0] * (len(P) + len(Q) - 1)
    for i, p in enumerate(P):
        if p:
            for j, q in enumerate(Q):
                out[i + j] += p * q
    return out


def act(F, A: IntegerSubstitution) -> BinaryForm:
    """F^A(x, y) = F(a x + b y, c x + d y)."""
    F = _as_form(F)
    if A.det == 0:
        raise ValueError("substitution must have nonzero determinant")
    n = F.degree
    left = [linear_power(A.a, A.b, e) for e in range(n + 1)]
    right = [linear_power(A.c, A.d, e) for e in range(n + 1)]
    out = [0] * (n + 1)
    for i, f in enumerate(F.coeffs):
        if f:
            term = multiply(left[n - i], right[i])
            for k, t in enumerate(term):
                out[k] += f * t
    return BinaryForm(out)


def _resultant(f: Sequence[int], g: Sequence[int]) -> int:
    """Resultant of univariate polynomials given high-to-low."""
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + list(f) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(g) + [0] * (size - n - 1 - i))
    return bareiss_det(rows)


def discriminant(F) -> int:
    F = _as_form(F)
    n = F.degree
    if n < 2:
        raise ValueError("discriminant needs degree >= 2")
    if F.is_zero():
        return 0
    if F.coeffs[0] == 0:
        # y -> y + t x moves a nonzero value F(1, t) into the leading slot; det = 1
        for t in range(1, n + 2):
            if evaluate(F, 1, t) != 0:
                return discriminant(act(F, IntegerSubstitution(1, 0, t, 1)))
        return 0
    f = list(F.coeffs)
    fprime = [(n - i) * c for i, c in enumerate(f[:-1])]
    res = _resultant(f, fprime)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * res // f[0]


def content(F) -> int:
    return gcd_all(_as_form(F).coeffs)


def height(F) -> int:
    return max(abs(c) for c in _as_form(F).coeffs)


def is_primitive(F) -> bool:
    return content(F) == 1


def sublattice_forms(F, p: int) -> list[BinaryForm]:
    """The p+1 forms F(p x + a y, y) for a = 0..p-1 and F(x, p y)."""
    F = _as_form(F)
    out = [act(F, IntegerSubstitution(p, a, 0, 1)) for a in range(p)]
    out.append(act(F, IntegerSubstitution(1, 0, 0, p)))
    return out


def is_maximal_at_p(F, p: int) -> bool:
    F = _as_form(F)
    if F.is_zero():
        raise ValueError("zero form")
    if content(F) % p == 0:
        return False
    target = p**F.degree
    return all(content(G) % target != 0 for G in sublattice_forms(F, p))


def is_maximal(F) -> bool:
    """True iff F is primitive and not a proper subform at any prime.

    Non-maximality at p forces both p^2 | disc(F) and F = c L^n (mod p);
    the second condition confines p to an explicitly computed finite set
    (see ``modp.power_pattern_candidates``), so no factorization of the
    discriminant is needed.
    """
    from .modp import power_pattern_candidates

    F = _as_form(F)
    D = discriminant(F)
    if D == 0:
        raise ValueError("is_maximal needs a nonzero discriminant")
    if content(F) != 1:
        return False
    for p in power_pattern_candidates(F, full_power_only=True):
        if D % (p * p) == 0 and not is_maximal_at_p(F, p):
            return False
    return True


def non_maximal_primes(F) -> list[int]:
    from .modp import power_pattern_candidates

    F = _as_form(F)
    D = discriminant(F)
    return [
        p
        for p in power_pattern_candidates(F, full_power_only=True)
        if D % (p * p) == 0 and not is_maximal_at_p(F, p)
    ]


def equivalent_bounded(F, G, entry_bound: int):
    """Search unimodular A with |entries| <= entry_bound and F^A = G.

    Returns the witness substitution, or None (no witness up to the bound).
    """
    F, G = _as_form(F), _as_form(G)
    if F.degree != G.degree:
        raise ValueError("forms of different degree")
    rng = range(-entry_bound, entry_bound + 1)
    first = [(a, c) for a in rng for c in rng if evaluate(F, a, c) == G.coeffs[0]]
    last = [(b, d) for b in rng for d in rng if evaluate(F, b, d) == G.coeffs[-1]]
    for a, c in first:
        for b, d in last:
            if a * d - b * c in (1, -1):
                A = IntegerSubstitution(a, b, c, d)
                if act(F, A) == G:
                    return A
    return None

"""Box enumeration of solutions of F(x, y) = h and the solution-count bound for Thue equations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import gfp
from .arith import next_prime
from .forms import BinaryForm, evaluate


@dataclass
class SolutionSet:
    form: BinaryForm
    h: int
    box: int
    solutions: list[tuple[int, int]] = field(default_factory=list)

    @property
    def primitive_count(self) -> int:
        return primitive_count(self)

    def to_json(self) -> dict:
        return {
            "form": self.form.to_json(),
            "h": str(self.h),
            "box": str(self.box),
            "solutions": [[str(x), str(y)] for x, y in self.solutions],
            "primitive_count": str(self.primitive_count),
        }


def _canonical(x: int, y: int, even: bool) -> tuple[int, int]:
    # for even degree (x, y) and (-x, -y) are one solution; keep y > 0, or y = 0 and x > 0
    if even and (y < 0 or (y == 0 and x < 0)):
        return -x, -y
    return x, y


def _integer_roots_in_range(poly_high: list[int], bound: int) -> list[int]:
    """Integer roots t of the polynomial with |t| <= bound (exact)."""
    while poly_high and poly_high[0] == 0:
        poly_high.pop(0)
    if not poly_high:
        return list(range(-bound, bound + 1))
    if len(poly_high) == 1:
        return []
    q = next_prime(2 * bound + 1)
    for _ in range(8):
        low = gfp.reduce(reversed(poly_high), q)
        if len(low) > 1:
            cands = []
            for r in gfp.roots(low, q):
                t = r if r <= bound else r - q
                if -bound <= t <= bound:
                    cands.append(t)
            break
        if low:  # nonzero constant mod q: no roots at all
            return []
        q = next_prime(q)
    else:
        cands = range(-bound, bound + 1)
    out = []
    for t in cands:
        r = 0
        for c in poly_high:
            r = r * t + c
        if r == 0:
            out.append(t)
    return out


def enumerate_solutions(F, h: int, B: int) -> SolutionSet:
    """All (x, y) with max(|x|, |y|) <= B and F(x, y) = h.

    For each y the univariate F(t, y) - h is reduced modulo one prime
    q > 2B + 1; its roots mod q single out at most n candidates t in the
    box, which are then checked by exact evaluation.
    """
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    if h == 0:
        raise ValueError("h must be nonzero")
    if B < 1:
        raise ValueError("box bound must be at least 1")
    n = F.degree
    even = n % 2 == 0
    found = set()
    for y in range(-B, B + 1):
        poly = []
        ypow = 1
        for c in F.coeffs:
            poly.append(c * ypow)
            ypow *= y
        poly[-1] -= h
        for x in _integer_roots_in_range(poly, B):
            found.add(_canonical(x, y, even))
    return SolutionSet(F, h, B, sorted(found))


def naive_solutions(F, h: int, B: int) -> list[tuple[int, int]]:
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    even = F.degree % 2 == 0
    rng = range(-B, B + 1)
    return sorted({_canonical(x, y, even) for x in rng for y in rng if evaluate(F, x, y) == h})


def primitive_count(S: SolutionSet) -> int:
    even = S.form.degree % 2 == 0
    return len({_canonical(x, y, even) for x, y in S.solutions if math.gcd(x, y) == 1})


# ---------------------------------------------------------------------------
# solution-count bound


@dataclass(frozen=True)
class SolutionCountBound:
    n: int
    D: int  # |disc|
    m: int
    eps: Fraction
    hypothesis_ok: bool
    formula_bound: int

    @property
    def bound(self) -> Optional[int]:
        return self.formula_bound if self.hypothesis_ok else None

    def to_json(self) -> dict:
        return {
            "n": str(self.n),
            "abs_disc": str(self.D),
            "m": str(self.m),
            "eps": str(self.eps),
            "hypothesis_ok": self.hypothesis_ok,
            "formula_bound": str(self.formula_bound),
            "bound": None if self.bound is None else str(self.bound),
        }


def bound_value(n: int, eps: Fraction) -> int:
    """floor(7n + n/((n-1) eps)) for n >= 5, floor(9n + n/((n-1) eps)) for n = 3, 4."""
    eps = Fraction(eps)
    lead = 7 * n if n >= 5 else 9 * n
    return math.floor(lead + Fraction(n) / ((n - 1) * eps))


def hypothesis_holds(n: int, D: int, m: int, eps: Fraction) -> bool:
    """Exact test of m <= |D|^(1/(2(n-1)) - eps) / ((7/2)^(n/2) n^(n/(2(n-1)))).

    Both sides are raised to N = lcm(2(n-1), denominator of the exponent);
    every power then becomes an integer power.
    """
    eps = Fraction(eps)
    D = abs(D)
    a = Fraction(1, 2 * (n - 1)) - eps
    N = math.lcm(2 * (n - 1), a.denominator)
    e_half = n * N // 2
    e_n = n * N // (2 * (n - 1))
    lhs = m**N * 7**e_half * n**e_n
    rhs = D ** int(a * N) * 2**e_half
    return lhs <= rhs


def theorem_bound(n: int, D: int, m: int, eps) -> SolutionCountBound:
    eps = Fraction(eps)
    if n < 3:
        raise ValueError("degree must be at least 3")
    if D == 0:
        raise ValueError("discriminant must be nonzero")
    if m < 1:
        raise ValueError("m must be positive")
    if not (0 < eps < Fraction(1, 2 * (n - 1))):
        raise ValueError("eps must lie strictly between 0 and 1/(2(n-1))")
    return SolutionCountBound(n, abs(D), m, eps, hypothesis_holds(n, D, m, eps), bound_value(n, eps))


def standard_eps(n: int) -> Fraction:
    """The choice of eps used by the constructions: 1/5 for cubics, 1/(4(n-1)) otherwise."""
    return Fraction(1, 5) if n == 3 else Fraction(1, 4 * (n - 1))

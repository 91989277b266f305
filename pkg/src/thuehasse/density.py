"""Local densities of the constructed families and their truncated Euler products."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import mobius, primes_up_to, valuation

__all__ = [
    "mobius",
    "upsilon_p",
    "cubic_local_density",
    "split_density",
    "l1l2_density",
    "density_lower_bound",
    "dh_reference",
    "DensityValue",
]

KINDS = ("F-cubic", "G-cubic", "F-general", "G-general")
SCALE_BITS = 256

# pi lies in [PI_LO, PI_LO + 10^-38]
PI_LO = Fraction(314159265358979323846264338327950288419, 10**38)
PI_HI = PI_LO + Fraction(1, 10**38)


def upsilon_p(n: int, p: int) -> Fraction:
    """Density of forms mod p that are not a constant times an r-th power for any r > 1."""
    total = Fraction(0)
    for r in range(1, n + 1):
        if n % r == 0:
            total += mobius(r) * Fraction(p ** (n // r + 1) - 1, p ** (n + 1))
    return total


def cubic_local_density(p: int, regime: str) -> Fraction:
    if regime == "two":
        if p != 2:
            raise ValueError("regime 'two' is for p = 2")
        # imprimitive, the three index-2 sublattice sets and xy(x+y) mod 2 are
        # subtracted separately; half of each sublattice set is imprimitive, so
        # this is a lower bound (the exact proportion is 109/128)
        return 1 - Fraction(1, 2**4) - Fraction(3, 2**6) - Fraction(1, 2**4)
    if regime == "three":
        if p != 3:
            raise ValueError("regime 'three' is for p = 3")
        # irreducible mod 3: (p - 1) units times (p^3 - p)/3 monic irreducible cubics
        return Fraction((p - 1) * (p**3 - p) // 3, p**4)
    if regime == "split":
        if p < 5:
            raise ValueError("regime 'split' is for p >= 5")
        return Fraction((p - 1) ** 2 * p * (p + 1), 6 * p**4)
    if regime == "one-mod-3":
        if p % 3 != 1:
            raise ValueError("regime 'one-mod-3' needs p = 1 mod 3")
        return 1 - Fraction(p * p - 1, p**4)
    if regime == "two-mod-3":
        if p % 3 != 2:
            raise ValueError("regime 'two-mod-3' needs p = 2 mod 3")
        return 1 - Fraction(p**3 + p**2 - 1, p**7)
    raise ValueError(f"unknown regime {regime!r}")


def split_density(n: int, p: int) -> Fraction:
    if p + 1 < n:
        raise ValueError("no forms of this degree split completely mod p")
    return Fraction(math.comb(p + 1, n) * (p - 1), p ** (n + 1))


def _l(n: int, p: int) -> int:
    return 1 + valuation(n, p) + (1 if p == 2 and n % 2 == 0 else 0)


def l1l2_density(n: int, p: int) -> Fraction:
    l = _l(n, p)
    return Fraction((p + 1) * p * (p - 1) * p ** (3 * (l - 1)), p ** (l * (n + 1)))


@dataclass
class DensityValue:
    kind: str
    n: int
    k: int
    leading: tuple[Fraction, Fraction]
    exact_factors: list[tuple[str, Fraction]] = field(default_factory=list)
    truncated_product: tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))
    cutoff: int = 0
    tail_bound: Fraction = Fraction(0)

    @property
    def lower(self) -> Fraction:
        """Rigorous lower bound on the full infinite product."""
        return self.truncated_product[0] * (1 - self.tail_bound)

    @property
    def width(self) -> Fraction:
        return self.truncated_product[1] - self.lower

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n": str(self.n),
            "k": str(self.k),
            "leading": [str(self.leading[0]), str(self.leading[1])],
            "exact_factors": [[label, str(v)] for label, v in self.exact_factors],
            "truncated_product": [str(self.truncated_product[0]), str(self.truncated_product[1])],
            "cutoff": str(self.cutoff),
            "tail_bound": str(self.tail_bound),
            "lower": str(self.lower),
            "decimal": {
                "lower": f"{float(self.lower):.12e}",
                "upper": f"{float(self.truncated_product[1]):.12e}",
            },
        }


class _Interval:
    """Product of positive rationals as integers over 2^shift, rounded outward.

    The shift grows whenever the lower end drops below 2^SCALE_BITS, so
    relative precision stays near 2^-SCALE_BITS however small the product gets.
    """

    def __init__(self):
        self.shift = SCALE_BITS
        self.lo = 1 << SCALE_BITS
        self.hi = 1 << SCALE_BITS

    def mul(self, q: Fraction) -> None:
        self.lo = self.lo * q.numerator // q.denominator
        self.hi = -(-self.hi * q.numerator // q.denominator)
        while self.lo < 1 << SCALE_BITS:
            self.lo <<= 64
            self.hi <<= 64
            self.shift += 64

    def as_fractions(self) -> tuple[Fraction, Fraction]:
        d = 1 << self.shift
        return Fraction(self.lo, d), Fraction(self.hi, d)


def _sqrt_interval(x: int, bits: int = 128) -> tuple[Fraction, Fraction]:
    s = math.isqrt(x << (2 * bits))
    lo = Fraction(s, 1 << bits)
    hi = lo if s * s == x << (2 * bits) else Fraction(s + 1, 1 << bits)
    return lo, hi


def density_lower_bound(n: int, k: int, kind: str, cutoff: int = 10**5) -> DensityValue:
    """Truncated Euler product for the density of the F (or G_j) family, with a tail bound."""
    from .construct import choose_primes
    from .solve import bound_value, standard_eps

    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if k < 1:
        raise ValueError("k must be positive")
    cubic = kind.endswith("cubic")
    if cubic and n != 3:
        raise ValueError("cubic kinds need n = 3")
    bound = bound_value(n, standard_eps(n))
    if kind.startswith("G") and n**k <= bound:
        raise ValueError(f"need n^k > {bound}")

    value = DensityValue(kind, n, k, (Fraction(1), Fraction(1)), cutoff=cutoff)
    prod = _Interval()
    is_g = kind.startswith("G")

    if cubic:
        ps = list(choose_primes(3, 1, k)[0])
        lead = Fraction(3**k - bound) if is_g else Fraction(1)
        value.leading = (lead, lead)
        factors = [("2", cubic_local_density(2, "two")), ("3", cubic_local_density(3, "three"))]
        for p in ps:
            factors.append((f"split:{p}", cubic_local_density(p, "split")))
            if is_g:
                factors.append((f"index:{p}", Fraction(1, p * p)))
        tail_from = max(ps)
        tail = (
            (q, cubic_local_density(q, "one-mod-3" if q % 3 == 1 else "two-mod-3"))
            for q in primes_up_to(cutoff)
            if q > tail_from
        )
        C = 1
    else:
        ps = list(choose_primes(n, 1, k)[0])
        g = (n - 1) * (n - 2) // 2
        small = (2 * g + 1) ** 2
        if is_g:
            # (n^k - bound) (n+1)^(k/2) / 2^((n+1)k + 1), with the square root enclosed
            base = Fraction((n**k - bound) * (n + 1) ** (k // 2), 2 ** ((n + 1) * k + 1))
            if k % 2:
                r_lo, r_hi = _sqrt_interval(n + 1)
                value.leading = (base * r_lo, base * r_hi)
            else:
                value.leading = (base, base)
        else:
            value.leading = (Fraction(1, 2), Fraction(1, 2))
        factors = []
        for p in ps:
            if is_g:
                factors.append((f"split:{p}", Fraction(math.comb(p + 1, n) * (p - 1), p ** (2 * n))))
            else:
                factors.append((f"split:{p}", split_density(n, p)))
        for p in primes_up_to(small):
            if p not in ps:
                factors.append((f"l1l2:{p}", l1l2_density(n, p)))
        excluded = set(ps)
        tail = ((q, upsilon_p(n, q)) for q in primes_up_to(cutoff) if q > small and q not in excluded)
        C = sum(1 for r in range(1, n + 1) if n % r == 0)

    value.exact_factors = factors
    for _, f in factors:
        prod.mul(f)
    for _, f in tail:
        prod.mul(f)
    lo, hi = prod.as_fractions()
    value.truncated_product = (lo * value.leading[0], hi * value.leading[1])
    if cutoff < 2 * C:
        raise ValueError("cutoff too small for the tail estimate")
    value.tail_bound = Fraction(2 * C, cutoff)
    return value


def pi_squared_interval() -> tuple[Fraction, Fraction]:
    return PI_LO * PI_LO, PI_HI * PI_HI


def dh_reference_interval(X, sign: str) -> tuple[Fraction, Fraction]:
    X = Fraction(X)
    if X < 0:
        raise ValueError("X must be positive")
    if sign == "negative":
        c = 24
    elif sign == "positive":
        c = 72
    else:
        raise ValueError("sign must be 'negative' or 'positive'")
    lo, hi = pi_squared_interval()
    return lo * X / c, hi * X / c


def dh_reference(X, sign: str) -> Fraction:
    """Main term pi^2/24 X (negative discriminants) or pi^2/72 X (positive), midpoint of an enclosure."""
    lo, hi = dh_reference_interval(X, sign)
    return (lo + hi) / 2

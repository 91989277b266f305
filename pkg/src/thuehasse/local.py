"""Local solubility of F(x, y) = h over the reals and the p-adic integers."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import gfp
from .arith import FactorizationBudgetExceeded, factor, primes_up_to, valuation
from .forms import BinaryForm, content, discriminant, evaluate
from .modp import is_const_times_power, matches_L1L2_power, power_pattern_candidates, splits_completely

log = logging.getLogger(__name__)

SCAN_LIMIT = 2000  # primes above this use root finding instead of a residue scan
FACTOR_BITS = 200  # larger discriminants are not factored

OBSTRUCTIONS = (
    "split-2-pattern",
    "nonresidue-cube-pattern",
    "power-pattern",
    "exhausted-depth",
    "sign-obstruction",
)


@dataclass(frozen=True)
class Witness:
    x: int
    y: int
    modulus: int
    margin: int
    scale: int = 0  # the point solves F = h / p^(n*scale); the p-adic point is p^scale * (x, y)

    def to_json(self) -> dict:
        return {
            "x": str(self.x),
            "y": str(self.y),
            "modulus": str(self.modulus),
            "margin": str(self.margin),
            "scale": str(self.scale),
        }

    @classmethod
    def from_json(cls, d: dict) -> "Witness":
        return cls(int(d["x"]), int(d["y"]), int(d["modulus"]), int(d["margin"]), int(d.get("scale", 0)))


@dataclass
class LocalEvidence:
    place: object  # "real" or a prime
    verdict: str  # soluble | insoluble | undetermined
    witness: Optional[Witness] = None
    obstruction: Optional[str] = None
    depth: int = 0
    criterion: Optional[dict] = None

    def to_json(self) -> dict:
        return {
            "place": str(self.place),
            "verdict": self.verdict,
            "witness": self.witness.to_json() if self.witness else None,
            "obstruction": self.obstruction,
            "depth": str(self.depth),
            "criterion": self.criterion,
        }

    @classmethod
    def from_json(cls, d: dict) -> "LocalEvidence":
        place = d["place"] if d["place"] == "real" else int(d["place"])
        w = Witness.from_json(d["witness"]) if d.get("witness") else None
        return cls(place, d["verdict"], w, d.get("obstruction"), int(d.get("depth", 0)), d.get("criterion"))


# ---------------------------------------------------------------------------
# the real place


def _poly_rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    while len(a) >= len(b) and a:
        c = a[0] / b[0]
        for i in range(len(b)):
            a[i] -= c * b[i]
        a.pop(0)
    while a and a[0] == 0:
        a.pop(0)
    return a


def _sign_at(poly: list[Fraction], at_plus_inf: bool) -> int:
    if not poly:
        return 0
    lead = poly[0]
    deg = len(poly) - 1
    s = 1 if lead > 0 else -1
    if not at_plus_inf and deg % 2:
        s = -s
    return s


def _count_sign_changes(signs: list[int]) -> int:
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def real_root_count(poly_high: list[int]) -> int:
    """Number of distinct real roots via a Sturm sequence (exact rationals)."""
    p0 = [Fraction(c) for c in poly_high]
    while p0 and p0[0] == 0:
        p0.pop(0)
    if len(p0) <= 1:
        return 0
    n = len(p0) - 1
    p1 = [c * (n - i) for i, c in enumerate(p0[:-1])]
    seq = [p0, p1]
    while True:
        r = _poly_rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return _count_sign_changes([_sign_at(q, False) for q in seq]) - _count_sign_changes(
        [_sign_at(q, True) for q in seq]
    )


def _odd_multiplicity_part(poly_high: list[int]) -> list[int]:
    import sympy

    t = sympy.Symbol("t")
    P = sympy.Poly(poly_high, t)
    _, parts = sympy.sqf_list(P)
    out = sympy.Poly(1, t)
    for q, e in parts:
        if e % 2:
            out *= q
    return [int(c) for c in out.all_coeffs()]


def represents_over_reals(F, h: int) -> bool:
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    if F.is_zero() or h == 0:
        raise ValueError("need a nonzero form and nonzero h")
    n = F.degree
    if n % 2:
        return True
    want = 1 if h > 0 else -1
    f = list(F.coeffs)
    while f and f[0] == 0:
        f.pop(0)
    # the sign of F(1, 0), then the sign of F(t, 1) for large t
    if F.coeffs[0] and (F.coeffs[0] > 0) == (want > 0):
        return True
    if (f[0] > 0) == (want > 0):
        return True
    return real_root_count(_odd_multiplicity_part(f)) > 0


# ---------------------------------------------------------------------------
# closed-form criterion for cubics and h = 1


def cubic_local_criterion(F, p: int) -> str:
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    if F.degree != 3 or content(F) != 1:
        raise ValueError("criterion applies to primitive cubics")
    if p == 3:
        raise ValueError("p = 3 is not covered by the closed-form criterion")
    if p == 2:
        red = tuple(c % 2 for c in F.coeffs)
        return "insoluble" if red == (0, 1, 1, 0) else "soluble"
    if p % 3 == 2:
        return "soluble"
    if p == 7 and splits_completely(F, 7)[0]:
        # the point count p + 1 - 2 sqrt(p) does not exceed the three roots here,
        # so the cubic residues {1, 6} may be missed; decide by a finite scan
        values = {evaluate(F, x, y) % 7 for x in range(7) for y in range(7)}
        return "soluble" if values & {1, 6} else "insoluble"
    pat = is_const_times_power(F, p)
    if pat is not None and pat.exponent == 3 and pow(pat.unit, (p - 1) // 3, p) != 1:
        return "insoluble"
    return "soluble"


# ---------------------------------------------------------------------------
# generic p-adic decider


def _partials(coeffs, x: int, y: int) -> tuple[int, int]:
    n = len(coeffs) - 1
    fx = sum((n - i) * c * x ** (n - i - 1) * y**i for i, c in enumerate(coeffs) if i < n)
    fy = sum(i * c * x ** (n - i) * y ** (i - 1) for i, c in enumerate(coeffs) if i > 0)
    return fx, fy


def _value(coeffs, x: int, y: int) -> int:
    n = len(coeffs) - 1
    return sum(c * x ** (n - i) * y**i for i, c in enumerate(coeffs))


def _margin(coeffs, x: int, y: int, p: int) -> int:
    fx, fy = _partials(coeffs, x, y)
    return min(valuation(fx, p), valuation(fy, p))


def default_depth(F: BinaryForm, h: int, p: int) -> int:
    return 2 * valuation(F.degree**2 * h * discriminant(F), p) + 3


def _pattern_obstruction(F: BinaryForm, h: int, p: int) -> Optional[str]:
    """Tag explaining a mod-p obstruction to primitive solutions, if a known pattern applies."""
    n = F.degree
    if p == 2 and n == 3 and tuple(c % 2 for c in F.coeffs) == (0, 1, 1, 0) and h % 2:
        return "split-2-pattern"
    if h % p and content(F) % p:
        pat = is_const_times_power(F, p)
        if pat is not None and pat.exponent == n:
            target = h * pow(pat.unit, -1, p) % p
            if not _is_nth_power_residue(target, n, p):
                return "nonresidue-cube-pattern" if n == 3 else "power-pattern"
    return None


def _is_nth_power_residue(a: int, n: int, p: int) -> bool:
    g = math.gcd(n, p - 1)
    return pow(a, (p - 1) // g, p) == 1


def _scan_primitive(F: BinaryForm, h: int, p: int, depth_max: int):
    """Breadth-first search over primitive residue pairs; returns (verdict, witness, depth)."""
    coeffs = F.coeffs
    top = p ** (depth_max + 1)
    red = tuple(c % top for c in coeffs)
    hr = h % top
    level = []
    for y in range(p):
        for x in range(p):
            if x == 0 and y == 0:
                continue
            v = _value(red, x, y) - hr
            if v % p:
                continue
            e = _margin(red, x, y, p)
            if 1 > 2 * e:
                return "soluble", Witness(x, y, p, e), 1
            level.append((x, y))
    l = 1
    while level:
        if l >= depth_max:
            return "undetermined", None, l
        pl = p**l
        mod_next = pl * p
        nxt = []
        for x0, y0 in level:
            for a in range(p):
                x = x0 + a * pl
                for b in range(p):
                    y = y0 + b * pl
                    if (_value(red, x, y) - hr) % mod_next:
                        continue
                    e = _margin(red, x, y, p)
                    if l + 1 > 2 * e:
                        return "soluble", Witness(x, y, mod_next, e), l + 1
                    nxt.append((x, y))
        level = nxt
        l += 1
    return "insoluble", None, l


def _root_search(F: BinaryForm, h: int, p: int, tries: int = 40):
    """Large p: look for a simple point of F = h mod p by univariate root finding."""
    coeffs = [c % p for c in F.coeffs]
    n = F.degree
    for y in range(0, tries):
        # F(t, y) - h as a polynomial in t, low-to-high
        poly = [0] * (n + 1)
        for i, c in enumerate(coeffs):
            poly[n - i] = c * pow(y, i, p) % p
        poly[0] = (poly[0] - h) % p
        poly = gfp.trim(poly)
        if len(poly) <= 1:
            continue
        for t in gfp.roots(poly, p):
            if t == 0 and y == 0:
                continue
            e = _margin(F.coeffs, t, y, p)
            if e == 0:
                return Witness(t, y, p, 0)
    return None


def soluble_p_adic(F, h: int, p: int, depth_max: Optional[int] = None) -> LocalEvidence:
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    if h == 0:
        raise ValueError("h must be nonzero")
    if depth_max is None:
        depth_max = default_depth(F, h, p)
    n = F.degree
    if p > SCAN_LIMIT:
        w = _root_search(F, h, p)
        if w is not None:
            return LocalEvidence(p, "soluble", w, depth=1)
        tag = _large_prime_obstruction(F, h, p)
        if tag:
            return LocalEvidence(p, "insoluble", obstruction=tag, depth=1)
        return LocalEvidence(p, "undetermined", depth=1)

    verdict, w, depth = _scan_primitive(F, h, p, depth_max)
    if verdict == "soluble":
        return LocalEvidence(p, "soluble", w, depth=depth)
    if valuation(h, p) >= n:
        sub = soluble_p_adic(F, h // p**n, p, depth_max)
        if sub.verdict == "soluble":
            w2 = sub.witness
            return LocalEvidence(
                p, "soluble", Witness(w2.x, w2.y, w2.modulus, w2.margin, w2.scale + 1), depth=sub.depth
            )
        if sub.verdict == "undetermined":
            verdict = "undetermined"
    if verdict == "insoluble":
        tag = _pattern_obstruction(F, h, p) or "exhausted-depth"
        return LocalEvidence(p, "insoluble", obstruction=tag, depth=depth)
    return LocalEvidence(p, "undetermined", depth=depth)


def _large_prime_obstruction(F: BinaryForm, h: int, p: int) -> Optional[str]:
    if h % p == 0 or content(F) % p == 0:
        return None
    pat = is_const_times_power(F, p)
    n = F.degree
    if pat is not None and pat.exponent == n:
        target = h * pow(pat.unit, -1, p) % p
        if not _is_nth_power_residue(target, n, p):
            return "nonresidue-cube-pattern" if n == 3 else "power-pattern"
    return None


def verify_witness(F, h: int, p: int, w: Witness) -> bool:
    """Independent re-check: congruence, Hensel margin, primitivity of the residue point."""
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    n = F.degree
    if w.modulus <= 1 or w.modulus % p:
        return False
    l = valuation(w.modulus, p)
    if p**l != w.modulus:
        return False
    target = h
    for _ in range(w.scale):
        if target % p**n:
            return False
        target //= p**n
    if w.x % p == 0 and w.y % p == 0:
        return False
    value = sum(c * w.x ** (n - i) * w.y**i for i, c in enumerate(F.coeffs))
    if (value - target) % w.modulus:
        return False
    fx = sum((n - i) * c * w.x ** (n - i - 1) * w.y**i for i, c in enumerate(F.coeffs[:-1]))
    fy = sum(i * c * w.x ** (n - i) * w.y ** (i - 1) for i, c in enumerate(F.coeffs) if i)
    e = min(valuation(fx, p), valuation(fy, p))
    return e == w.margin and l > 2 * e


# ---------------------------------------------------------------------------
# which primes need checking


def genus(n: int) -> int:
    return (n - 1) * (n - 2) // 2


def disc_prime_support(F) -> tuple[list[int], bool]:
    """Prime divisors of disc(F) if it factors within budget; else the power-pattern candidate set.

    The boolean reports whether the discriminant was fully factored.
    """
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    D = discriminant(F)
    if abs(D).bit_length() <= FACTOR_BITS:
        try:
            return sorted(factor(D)), True
        except FactorizationBudgetExceeded:
            pass
    return list(power_pattern_candidates(F)), False


def required_prime_set(F, h: int) -> list[int]:
    """Primes at which solubility of F = h must be checked explicitly.

    Small primes up to (2g+1)^2, the primes dividing n*h, and the primes of
    disc(F). For primes beyond this set solubility is automatic. When
    disc(F) cannot be factored the primes where F is a constant times a
    proper power mod p are used instead (a finite superset of the primes
    where the Hasse-Weil argument fails).
    """
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    if discriminant(F) == 0:
        raise ValueError("disc(F) = 0")
    if h == 0:
        raise ValueError("h must be nonzero")
    n = F.degree
    g = genus(n)
    primes = set(primes_up_to((2 * g + 1) ** 2))
    primes.update(factor(n * h))
    support, _ = disc_prime_support(F)
    primes.update(support)
    return sorted(primes)


@dataclass
class LocalVerdict:
    status: str  # yes | no | undetermined
    evidence: list[LocalEvidence] = field(default_factory=list)
    place: object = None

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "place": None if self.place is None else str(self.place),
            "evidence": [e.to_json() for e in self.evidence],
        }


def local_evidence_at(F: BinaryForm, h: int, p: int) -> LocalEvidence:
    ev = soluble_p_adic(F, h, p)
    if h % p == 0:
        m = matches_L1L2_power(F, p, 1)
        if m is not None:
            ev.criterion = {
                "kind": "L1L2-power",
                "modulus": str(m.modulus),
                "L1": [str(c) for c in m.L1],
                "L2": [str(c) for c in m.L2],
            }
    if F.degree == 3 and h == 1 and p != 3:
        closed = cubic_local_criterion(F, p)
        if ev.verdict != "undetermined" and closed != ev.verdict:
            raise AssertionError(f"closed-form and Hensel verdicts disagree at p={p}")
    return ev


def locally_represents_everywhere(F, h: int, primes: Optional[list[int]] = None) -> LocalVerdict:
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    if discriminant(F) == 0 or h == 0:
        raise ValueError("need disc(F) != 0 and h != 0")
    evidence = []
    real_ok = represents_over_reals(F, h)
    evidence.append(
        LocalEvidence("real", "soluble" if real_ok else "insoluble", obstruction=None if real_ok else "sign-obstruction")
    )
    if not real_ok:
        return LocalVerdict("no", evidence, "real")
    pending = None
    for p in primes if primes is not None else required_prime_set(F, h):
        ev = local_evidence_at(F, h, p)
        evidence.append(ev)
        if ev.verdict == "insoluble":
            return LocalVerdict("no", evidence, p)
        if ev.verdict == "undetermined" and pending is None:
            pending = p
    if pending is not None:
        return LocalVerdict("undetermined", evidence, pending)
    return LocalVerdict("yes", evidence)

"""Factorization and congruence analysis of binary forms modulo primes and prime powers."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Sequence, Union

from . import gfp
from .arith import bareiss_det, factor, gcd_all, primes_up_to
from .forms import BinaryForm, IntegerSubstitution, act, content, evaluate

INF = "inf"
RootLabel = Union[int, str]


def label_key(label: RootLabel) -> tuple[int, int]:
    """Sort key: finite labels ascending, then infinity."""
    return (1, 0) if label == INF else (0, int(label))


@dataclass(frozen=True)
class FactorizationModP:
    prime: int
    unit: int
    factors: tuple[tuple[tuple[int, ...], int], ...]

    def degrees(self) -> list[int]:
        """Cycle type: degree of each irreducible factor, repeated by multiplicity."""
        out = []
        for f, e in self.factors:
            out.extend([len(f) - 1] * e)
        return sorted(out)

    def expand(self) -> tuple[int, ...]:
        """Re-multiply unit * prod factors^e, reduced mod p."""
        p = self.prime
        acc = [self.unit % p]
        for f, e in self.factors:
            for _ in range(e):
                acc = [c % p for c in _mul_forms(acc, f)]
        return tuple(acc)


def _mul_forms(P: Sequence[int], Q: Sequence[int]) -> list[int]:
    out = [0] * (len(P) + len(Q) - 1)
    for i, a in enumerate(P):
        for j, b in enumerate(Q):
            out[i + j] += a * b
    return out


def _check_not_zero(F: BinaryForm, p: int) -> None:
    if content(F) % p == 0:
        raise ValueError(f"form vanishes modulo {p}")


@functools.lru_cache(maxsize=4096)
def _factor_cached(coeffs: tuple[int, ...], p: int) -> FactorizationModP:
    red = [c % p for c in coeffs]
    n = len(red) - 1
    e_inf = 0
    while red[e_inf] == 0:
        e_inf += 1
    # F(t, 1) low-to-high
    uni = gfp.trim(list(reversed(red[e_inf:])))
    factors = []
    if len(uni) > 1:
        unit, fac = gfp.factor(uni, p)
        for g, e in fac:
            d = len(g) - 1
            # monic t^d + ... homogenizes to x^d + ... y^d
            factors.append((tuple(reversed(g)) if d else (1,), e))
    else:
        unit = uni[0]
    if e_inf:
        factors.append(((0, 1), e_inf))
    assert sum((len(f) - 1) * e for f, e in factors) == n
    factors.sort()
    return FactorizationModP(p, unit, tuple(factors))


def factor_mod_p(F, p: int) -> FactorizationModP:
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    _check_not_zero(F, p)
    return _factor_cached(F.coeffs, p)


def splits_completely(F, p: int) -> tuple[bool, list[RootLabel]]:
    """Whether F mod p is a unit times n pairwise non-proportional linear forms.

    Returns (flag, labels); labels are the n roots when the flag is true
    (finite a for x - a y, INF for y), else [].
    """
    fac = factor_mod_p(F, p)
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    if any(len(f) != 2 or e != 1 for f, e in fac.factors) or len(fac.factors) != F.degree:
        return False, []
    labels: list[RootLabel] = []
    for f, _ in fac.factors:
        labels.append(INF if f == (0, 1) else (-f[1]) % p)
    return True, sorted(labels, key=label_key)


def is_irreducible_mod_p(F, p: int) -> bool:
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    fac = factor_mod_p(F, p)
    return len(fac.factors) == 1 and fac.factors[0][1] == 1 and len(fac.factors[0][0]) == F.degree + 1


@dataclass(frozen=True)
class PowerPattern:
    unit: int
    base: tuple[int, ...]
    exponent: int


def is_const_times_power(F, p: int) -> PowerPattern | None:
    """Maximal r > 1 with F = c M^r (mod p), or None."""
    fac = factor_mod_p(F, p)
    r = gcd_all(e for _, e in fac.factors)
    if r <= 1:
        return None
    base = [1]
    for f, e in fac.factors:
        for _ in range(e // r):
            base = [c % p for c in _mul_forms(base, f)]
    return PowerPattern(fac.unit, tuple(base), r)


@dataclass(frozen=True)
class L1L2Match:
    modulus: int
    L1: tuple[int, int]
    L2: tuple[int, int]


def matches_L1L2_power(F, p: int, l: int) -> L1L2Match | None:
    """Search L1, L2 (independent mod p) with F = L1 * L2^(n-1) (mod p^l).

    L2 is normalized (its first coefficient that is a unit mod p equals 1,
    the other coefficient reduced mod p^l); L1 absorbs the constant. Given
    L2 the factor L1 is forced, so only the p^l + p^(l-1) normalized L2
    need to be tried.
    """
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    n = F.degree
    q = p**l
    Fq = BinaryForm(c % q for c in F.coeffs)
    for b in range(q):
        G = act(Fq, IntegerSubstitution(1, -b, 0, 1)).coeffs
        if all(g % q == 0 for g in G[2:]) and G[1] % p:
            g0, g1 = G[0] % q, G[1] % q
            return L1L2Match(q, (g0, (g0 * b + g1) % q), (1, b))
    for a in range(0, q, p):
        G = act(Fq, IntegerSubstitution(1, 0, -a, 1)).coeffs
        if all(g % q == 0 for g in G[: n - 1]) and G[n - 1] % p:
            gm, gn = G[n - 1] % q, G[n] % q
            return L1L2Match(q, ((gm + gn * a) % q, gn), (a, 1))
    return None


def check_L1L2(F, match: L1L2Match, p: int) -> bool:
    """Independent re-check of an L1 L2^(n-1) witness by coefficient comparison."""
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    q = match.modulus
    prod = list(match.L1)
    for _ in range(F.degree - 1):
        prod = _mul_forms(prod, match.L2)
    det = match.L1[0] * match.L2[1] - match.L1[1] * match.L2[0]
    return det % p != 0 and all((a - b) % q == 0 for a, b in zip(F.coeffs, prod))


# ---------------------------------------------------------------------------
# congruences modulo prime powers


@dataclass
class CongruenceClassSolution:
    prime: int
    k: int
    classes: list[tuple[int, int]] = field(default_factory=list)

    @property
    def modulus(self) -> int:
        return self.prime**self.k

    def expand(self) -> list[int]:
        """All residues mod p^k covered by the classes."""
        pk = self.modulus
        out = set()
        for c, u in self.classes:
            step = self.prime ** (self.k - u)
            out.update(range(c % step, pk, step))
        return sorted(out)


def _taylor(f_low: list[int], c: int) -> list[int]:
    """Coefficients of f(c + t), low-to-high."""
    a = list(f_low)
    n = len(a)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            a[j] += c * a[j + 1]
    return a


def roots_mod_prime_power(f: Sequence[int], p: int, k: int) -> CongruenceClassSolution:
    """Complete solution of f(X) = 0 (mod p^k) as classes X = c (mod p^(k-u)).

    ``f`` is given high-to-low. Classes are maximal: a class modulo p^j is
    emitted (with u = k - j) as soon as every member is a root.
    """
    from .forms import discriminant

    f = [int(c) for c in f]
    while f and f[0] == 0:
        f.pop(0)
    if gcd_all(f) != 1:
        raise ValueError("polynomial must have content 1")
    if len(f) < 2 or (len(f) > 2 and discriminant(BinaryForm(f)) == 0):
        raise ValueError("polynomial must have nonzero discriminant")
    f_low = list(reversed(f))
    pk = p**k
    out = CongruenceClassSolution(p, k)

    def full(c: int, j: int) -> bool:
        shift = _taylor(f_low, c)
        pj = p**j
        scale = 1
        for s in shift:
            if (s * scale) % pk:
                return False
            scale *= pj
        return True

    def rec(c: int, j: int) -> None:
        if full(c, j):
            out.classes.append((c, k - j))
            return
        if j == k:
            return
        pj = p**j
        nxt = p ** (j + 1)
        for d in range(p):
            c2 = c + d * pj
            if _eval_low(f_low, c2) % nxt == 0:
                rec(c2, j + 1)

    rec(0, 0)
    out.classes.sort()
    return out


def _eval_low(f_low: list[int], x: int) -> int:
    r = 0
    for c in reversed(f_low):
        r = r * x + c
    return r


# ---------------------------------------------------------------------------
# primes at which a form can be a constant times a proper power


def _psc(f_high: list[int], g_high: list[int], j: int) -> int:
    """j-th principal subresultant coefficient of f and g (formal degrees)."""
    m, n = len(f_high) - 1, len(g_high) - 1
    f_low = list(reversed(f_high))
    g_low = list(reversed(g_high))
    size = m + n - 2 * j
    top = m + n - j - 1
    cols = list(range(top, j - 1, -1))
    rows = []
    for i in range(n - j):
        rows.append([f_low[d - i] if 0 <= d - i <= m else 0 for d in cols])
    for i in range(m - j):
        rows.append([g_low[d - i] if 0 <= d - i <= n else 0 for d in cols])
    assert len(rows) == size and len(cols) == size
    return bareiss_det(rows)


@functools.lru_cache(maxsize=1024)
def _power_candidates(coeffs: tuple[int, ...], depth: int) -> tuple[int, ...]:
    F = BinaryForm(coeffs)
    n = F.degree
    shifts = []
    t = 0
    while len(shifts) < n + 1:
        if evaluate(F, 1, t) != 0:
            shifts.append(t)
        t += 1
    primes = set(primes_up_to(max(n, shifts[-1])))
    # a large p with the pattern divides F(1, t) or B_t for every shift t
    G = 0
    for t in shifts:
        g = list(act(F, IntegerSubstitution(1, 0, t, 1)).coeffs)
        gp = [(n - i) * c for i, c in enumerate(g[:-1])]
        B = 0
        for j in range(depth):
            B = gcd_all([B, _psc(g, gp, j)])
            if B == 1:
                break
        if B == 0:
            raise ValueError("form has a repeated factor over Q")
        G = gcd_all([G, B * g[0]])
        if G == 1:
            break
    if G > 1:
        primes.update(factor(G))
    return tuple(sorted(primes))


def power_pattern_candidates(F, full_power_only: bool = False) -> tuple[int, ...]:
    """A finite set of primes containing every p with F = c M^r (mod p), r > 1.

    If F = c M^r mod p then after the shift y -> y + t x the univariate
    polynomial g_t shares a factor of degree >= n - n/r with g_t', so p
    divides the first n - n/r principal subresultant coefficients of
    (g_t, g_t') whenever p does not divide the leading coefficient.
    Among n + 1 shifts at least one has a leading coefficient prime to a
    large p, so every such p is small or divides gcd_t(B_t * F(1, t)),
    with B_t the subresultant gcd; that integer is small and gets factored.
    With ``full_power_only`` only r = n (F = c L^n) is covered.
    """
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    n = F.degree
    if full_power_only:
        depth = n - 1
    else:
        r_min = min(d for d in range(2, n + 1) if n % d == 0)
        depth = n - n // r_min
    return _power_candidates(F.coeffs, depth)

"""Univariate polynomials over GF(p).

A polynomial a_0 + a_1 X + ... + a_d X^d is the list [a_0, ..., a_d] of
residues in {0, ..., p-1} with a_d != 0; the zero polynomial is [].
Works for any prime p, including very large ones (root finding and
equal-degree splitting use deterministic trial polynomials).
"""

from __future__ import annotations

import itertools

Poly = list


def trim(a: Poly) -> Poly:
    while a and a[-1] == 0:
        a.pop()
    return a


def reduce(coeffs, p: int) -> Poly:
    return trim([c % p for c in coeffs])


def add(a: Poly, b: Poly, p: int) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % p
    return trim(out)


def sub(a: Poly, b: Poly, p: int) -> Poly:
    return add(a, [(-c) % p for c in b], p)


def mul(a: Poly, b: Poly, p: int) -> Poly:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim([c % p for c in out])


def scale(a: Poly, c: int, p: int) -> Poly:
    return trim([(x * c) % p for x in a])


def divmod_(a: Poly, b: Poly, p: int) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    if len(a) - 1 < db:
        return [], a
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] * inv % p
        if c:
            q[i - db] = c
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    return trim(q), trim(a[:db])


def mod(a: Poly, b: Poly, p: int) -> Poly:
    return divmod_(a, b, p)[1]


def monic(a: Poly, p: int) -> Poly:
    if not a:
        return []
    inv = pow(a[-1], -1, p)
    return [(c * inv) % p for c in a]


def gcd(a: Poly, b: Poly, p: int) -> Poly:
    while b:
        a, b = b, mod(a, b, p)
    return monic(a, p)


def powmod(base: Poly, e: int, m: Poly, p: int) -> Poly:
    result = [1]
    base = mod(base, m, p)
    while e:
        if e & 1:
            result = mod(mul(result, base, p), m, p)
        e >>= 1
        if e:
            base = mod(mul(base, base, p), m, p)
    return result


def deriv(a: Poly, p: int) -> Poly:
    return trim([(i * c) % p for i, c in enumerate(a)][1:])


def evaluate(a: Poly, x: int, p: int) -> int:
    r = 0
    for c in reversed(a):
        r = (r * x + c) % p
    return r


def _pth_root(a: Poly, p: int) -> Poly:
    return [a[i] for i in range(0, len(a), p)]


def squarefree_decomposition(f: Poly, p: int) -> list[tuple[Poly, int]]:
    """Monic squarefree factors with multiplicities: f = prod g_i^{e_i} (f monic)."""
    if len(f) <= 1:
        return []
    out: list[tuple[Poly, int]] = []
    g = deriv(f, p)
    if g:
        c = gcd(f, g, p)
        w = divmod_(f, c, p)[0]
        i = 1
        while len(w) > 1:
            y = gcd(w, c, p)
            z = divmod_(w, y, p)[0]
            if len(z) > 1:
                out.append((monic(z, p), i))
            i += 1
            w = y
            c = divmod_(c, y, p)[0]
        if len(c) > 1:
            out.extend((h, e * p) for h, e in squarefree_decomposition(_pth_root(c, p), p))
    else:
        out.extend((h, e * p) for h, e in squarefree_decomposition(_pth_root(f, p), p))
    return out


def distinct_degree(f: Poly, p: int) -> list[tuple[Poly, int]]:
    """Split a monic squarefree f into products of irreducibles of equal degree."""
    out = []
    x = [0, 1]
    h = x
    d = 0
    while len(f) - 1 >= 2 * (d + 1):
        d += 1
        h = powmod(h, p, f, p)
        g = gcd(f, sub(h, x, p), p)
        if len(g) > 1:
            out.append((g, d))
            f = divmod_(f, g, p)[0]
            h = mod(h, f, p)
    if len(f) > 1:
        out.append((f, len(f) - 1))
    return out


def _trial_polys(p: int, max_deg: int):
    # t + c first (enough for large p), then all polynomials of higher degree
    for c in range(min(p, 10**6)):
        yield [c, 1]
    for deg in range(2, max_deg + 1):
        for low in itertools.product(range(min(p, 50)), repeat=deg):
            yield list(low) + [1]


def equal_degree(f: Poly, d: int, p: int) -> list[Poly]:
    """Split a monic product of irreducibles of degree d into its factors."""
    if len(f) - 1 == d:
        return [f]
    for a in _trial_polys(p, len(f) - 2):
        if p == 2:
            t = mod(a, f, p)
            acc = t
            for _ in range(d - 1):
                t = mod(mul(t, t, p), f, p)
                acc = add(acc, t, p)
            u = gcd(f, acc, p)
        else:
            b = sub(powmod(a, (p**d - 1) // 2, f, p), [1], p)
            u = gcd(f, b, p)
        if 1 < len(u) < len(f):
            v = divmod_(f, u, p)[0]
            return sorted(equal_degree(u, d, p) + equal_degree(monic(v, p), d, p))
    raise RuntimeError("equal-degree splitting failed")  # unreachable for prime p


def factor(f: Poly, p: int) -> tuple[int, list[tuple[Poly, int]]]:
    """Complete factorization: (unit, [(monic irreducible, multiplicity), ...]) sorted."""
    f = trim(list(f))
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    unit = f[-1]
    g = monic(f, p)
    result: list[tuple[Poly, int]] = []
    for s, e in squarefree_decomposition(g, p):
        for block, d in distinct_degree(s, p):
            for irr in equal_degree(block, d, p):
                result.append((irr, e))
    result.sort(key=lambda fe: (len(fe[0]), fe[0][::-1], fe[1]))
    return unit, result


def roots(f: Poly, p: int) -> list[int]:
    """Distinct roots of f in GF(p), ascending."""
    f = monic(trim(list(f)), p)
    if len(f) <= 1:
        return []
    if p < 64:
        return [x for x in range(p) if evaluate(f, x, p) == 0]
    g = gcd(f, sub(powmod([0, 1], p, f, p), [0, 1], p), p)
    if len(g) <= 1:
        return []
    out = []
    for lin in equal_degree(g, 1, p):
        out.append((-lin[0]) % p)
    return sorted(out)

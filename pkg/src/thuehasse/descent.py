"""Descent: from F split completely modulo p to the content-reduced forms
F(p x + a y, y)/p and F(x, p y)/p, chained over several primes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .forms import BinaryForm, IntegerSubstitution, act, content, discriminant, evaluate, height
from .modp import INF, RootLabel, label_key, splits_completely


class DescentError(ValueError):
    """A descent precondition failed; ``condition`` names which one."""

    def __init__(self, condition: str, form: BinaryForm, prime: int):
        super().__init__(f"{condition} (p={prime}, form={list(form.coeffs)})")
        self.condition = condition
        self.form = form
        self.prime = prime


@dataclass(frozen=True)
class DescentStep:
    prime: int
    label: RootLabel

    def substitution(self) -> IntegerSubstitution:
        if self.label == INF:
            return IntegerSubstitution(1, 0, 0, self.prime)
        return IntegerSubstitution(self.prime, int(self.label), 0, 1)

    def to_json(self) -> list[str]:
        return [str(self.prime), str(self.label)]

    @classmethod
    def from_json(cls, data) -> "DescentStep":
        p, lab = data
        return cls(int(p), INF if lab == INF else int(lab))


@dataclass(frozen=True)
class DescentPath:
    steps: tuple[DescentStep, ...]
    index: int

    def to_json(self) -> list[list[str]]:
        return [s.to_json() for s in self.steps]


@dataclass(frozen=True)
class DescentOutput:
    origin: BinaryForm
    path: DescentPath
    form: BinaryForm

    def to_json(self) -> dict:
        return {
            "origin": self.origin.to_json(),
            "path": self.path.to_json(),
            "index": str(self.path.index),
            "form": self.form.to_json(),
        }


def substituted(F: BinaryForm, step: DescentStep) -> BinaryForm:
    """The undivided form F(p x + a y, y) or F(x, p y)."""
    return act(F, step.substitution())


def descend_at_prime(F, p: int, check: bool = True) -> list[tuple[RootLabel, BinaryForm]]:
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    if content(F) % p == 0:
        raise DescentError("p divides the content", F, p)
    if check and discriminant(F) % p == 0:
        raise DescentError("p divides the discriminant", F, p)
    ok, labels = splits_completely(F, p)
    if not ok:
        raise DescentError("form does not split completely", F, p)
    out = []
    for label in labels:
        G = substituted(F, DescentStep(p, label))
        c = content(G)
        if c % p or (c // p) % p == 0:
            raise DescentError("content not exactly divisible by p", F, p)
        out.append((label, BinaryForm(g // p for g in G.coeffs)))
    return out


def descend_chain(F, primes: Sequence[int]) -> list[DescentOutput]:
    """All n^k descended forms, indexed in mixed radix over (prime order, label order)."""
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    primes = list(primes)
    if sorted(set(primes)) != primes:
        raise ValueError("primes must be distinct and ascending")
    level: list[tuple[tuple[DescentStep, ...], BinaryForm]] = [((), F)]
    for p in primes:
        nxt = []
        for steps, G in level:
            for label, H in descend_at_prime(G, p):
                nxt.append((steps + (DescentStep(p, label),), H))
        level = nxt
    return [DescentOutput(F, DescentPath(steps, j + 1), G) for j, (steps, G) in enumerate(level)]


def rederive(origin: BinaryForm, steps: Sequence[DescentStep]) -> BinaryForm:
    G = origin
    for step in steps:
        H = substituted(G, step)
        if content(H) % step.prime:
            raise DescentError("content not divisible by p", G, step.prime)
        G = BinaryForm(h // step.prime for h in H.coeffs)
    return G


def height_bound_holds(F: BinaryForm, G: BinaryForm, p: int, label: RootLabel) -> bool:
    """H(G) < p^(n-1) 2^(n+1)/sqrt(n+1) H(F) for finite labels, H(G) <= p^(n-1) H(F) at infinity."""
    n = F.degree
    hF, hG = height(F), height(G)
    if label == INF:
        return hG <= p ** (n - 1) * hF
    # squared, integer form
    return hG * hG * (n + 1) < p ** (2 * (n - 1)) * 4 ** (n + 1) * hF * hF


def dotss_coefficients(F: BinaryForm, p: int, a: int) -> list[int]:
    """Coefficients e_0..e_n of F(p x + a y, y) from the closed binomial formula."""
    n = F.degree
    f = F.coeffs
    e = [0] * (n + 1)
    for j in range(n + 1):
        e[n - j] = p**j * sum(f[i] * a ** (n - i - j) * math.comb(n - i, j) for i in range(n - j + 1))
    return e


def pushforward_solution(F, p: int, point: tuple[int, int]) -> tuple[RootLabel, tuple[int, int]]:
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    x0, y0 = point
    if math.gcd(x0, y0) != 1:
        raise ValueError("point is not primitive")
    if evaluate(F, x0, y0) % p:
        raise ValueError("p does not divide F(x0, y0)")
    if y0 % p == 0:
        return INF, (x0, y0 // p)
    a = x0 * pow(y0, -1, p) % p
    return a, ((x0 - a * y0) // p, y0)


def pushforward_chain(F, primes: Sequence[int], point: tuple[int, int]):
    """Transport a primitive point with m | F(point) along the chain.

    Returns (j, steps, image) where j is the index of the receiving G_j
    in ``descend_chain`` order.
    """
    G = F if isinstance(F, BinaryForm) else BinaryForm(F)
    n = G.degree
    steps = []
    j = 0
    for p in primes:
        _, labels = splits_completely(G, p)
        label, point = pushforward_solution(G, p, point)
        step = DescentStep(p, label)
        j = j * n + labels.index(label)
        steps.append(step)
        G = rederive(G, [step])
    return j + 1, tuple(steps), point


def step_inverse(step: DescentStep, point: tuple[int, int]) -> tuple[int, int]:
    x, y = point
    if step.label == INF:
        return x, step.prime * y
    return step.prime * x + int(step.label) * y, y


def pullback_solution(output: DescentOutput | Sequence[DescentStep], point: tuple[int, int]) -> tuple[int, int]:
    steps = output.path.steps if isinstance(output, DescentOutput) else tuple(output)
    for step in reversed(steps):
        point = step_inverse(step, point)
    return point

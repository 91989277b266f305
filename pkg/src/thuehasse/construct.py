"""Construction of forms F with prescribed local behaviour, the descent to the G_j, and failure certificates."""

from __future__ import annotations

import json
import logging
import math
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .arith import crt, primes_up_to, valuation
from .descent import DescentError, DescentStep, descend_chain, rederive
from .forms import BinaryForm, content, discriminant, is_maximal, multiply
from .local import (
    LocalEvidence,
    genus,
    locally_represents_everywhere,
    represents_over_reals,
    required_prime_set,
    verify_witness,
)
from .modp import (
    L1L2Match,
    check_L1L2,
    factor_mod_p,
    is_const_times_power,
    is_irreducible_mod_p,
    matches_L1L2_power,
    power_pattern_candidates,
    splits_completely,
)
from .solve import enumerate_solutions, standard_eps, theorem_bound

log = logging.getLogger(__name__)

DEMO_THRESHOLD = 10**6


class ConstructionError(RuntimeError):
    pass


class ConstructionBudgetExceeded(ConstructionError):
    def __init__(self, histogram: dict):
        super().__init__(f"no admissible F within budget; failures: {dict(histogram)}")
        self.histogram = dict(histogram)


class GaloisTimeout(ConstructionError):
    pass


@dataclass(frozen=True)
class PipelineParams:
    n: int
    h: int = 1
    k: int = 4
    scale: str = "full"
    box: int = 100
    seed: int = 0
    threshold_override: Optional[int] = None
    budget: int = 4000
    workers: int = 1

    def validate(self) -> None:
        if self.n < 3:
            raise ValueError("degree must be at least 3")
        if self.h == 0:
            raise ValueError("h must be nonzero")
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.scale not in ("full", "demo"):
            raise ValueError("scale must be 'full' or 'demo'")
        if self.box < 1:
            raise ValueError("box must be positive")
        if self.scale == "full":
            if self.threshold_override is not None:
                raise ValueError("threshold override is only allowed at demo scale")
            t = theorem_bound_value(self.n)
            if self.n**self.k <= t:
                raise ValueError(f"full scale needs n^k > {t}")

    def to_json(self) -> dict:
        return {
            "n": str(self.n),
            "h": str(self.h),
            "k": str(self.k),
            "scale": self.scale,
            "box": str(self.box),
            "seed": str(self.seed),
            "threshold_override": None if self.threshold_override is None else str(self.threshold_override),
            "budget": str(self.budget),
        }


def theorem_bound_value(n: int) -> int:
    from .solve import bound_value

    return bound_value(n, standard_eps(n))


def choose_primes(n: int, h: int, k: int) -> tuple[tuple[int, ...], int]:
    if k < 1:
        raise ValueError("k must be positive")
    start = 5 if n == 3 else n
    out = []
    p = start - 1
    from .arith import next_prime

    while len(out) < k:
        p = next_prime(p)
        if h % p:
            out.append(p)
    return tuple(out), math.prod(out)


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def disc_threshold(n: int, h: int, m: int) -> int:
    """Exact integer ceiling of the discriminant size needed for the solution-count bound."""
    hm = abs(h) * m
    if n == 3:
        return _ceil_div(hm**20 * 7**30 * 3**15, 2**30)
    e = 2 * n * (n - 1)
    return _ceil_div(7**e * n ** (2 * n) * hm ** (4 * (n - 1)), 2**e)


def delta2(p: int, n: int) -> int:
    return 1 if p == 2 and n % 2 == 0 else 0


def l1l2_exponent(p: int, n: int) -> int:
    return 1 + valuation(n, p) + delta2(p, n)


# ---------------------------------------------------------------------------
# residue targets


@dataclass(frozen=True)
class Condition:
    prime: int
    modulus: int
    kind: str  # not-split-2 | irreducible | split | L1L2
    residues: tuple[int, ...]


def _linear_power_mod(a: int, b: int, e: int, q: int) -> list[int]:
    out = [1]
    for _ in range(e):
        out = [c % q for c in multiply(out, [a, b])]
    return out


def _random_l1l2(rng: random.Random, n: int, p: int, q: int) -> list[int]:
    while True:
        a1, b1, a2, b2 = (rng.randrange(q) for _ in range(4))
        if (a1 * b2 - a2 * b1) % p:
            break
    return [c % q for c in multiply([a1, b1], _linear_power_mod(a2, b2, n - 1, q))]


def _random_split(rng: random.Random, n: int, p: int) -> list[int]:
    points = rng.sample(range(p + 1), n)
    c = rng.randrange(1, p)
    out = [c]
    for a in points:
        lin = [0, 1] if a == p else [1, (-a) % p]
        out = [v % p for v in multiply(out, lin)]
    return out


def _random_form_mod(rng: random.Random, n: int, p: int) -> list[int]:
    return [rng.randrange(p) for _ in range(n + 1)]


def residue_conditions(n: int, h: int, primes: tuple[int, ...], rng: random.Random) -> list[Condition]:
    """Target residue classes of the coefficients, one per constrained prime."""
    conds = []
    small: list[int]
    if n == 3:
        small = [2, 3]
    else:
        small = [p for p in primes_up_to((2 * genus(n) + 1) ** 2) if p not in primes]
    for p in primes:
        conds.append(Condition(p, p, "split", tuple(_random_split(rng, n, p))))
    covered = set(primes)
    for p in small:
        if h % p == 0 and n == 3:
            continue  # handled below with the p | h condition
        q = p if n == 3 else p ** l1l2_exponent(p, n)
        if n == 3 and p == 2:
            while True:
                f = _random_form_mod(rng, 3, 2)
                if any(f) and f != [0, 1, 1, 0] and is_const_times_power(BinaryForm(f), 2) is None:
                    break
            conds.append(Condition(2, 2, "not-split-2", tuple(f)))
        elif n == 3 and p == 3:
            while True:
                f = _random_form_mod(rng, 3, 3)
                if f[0] and is_irreducible_mod_p(BinaryForm(f), 3):
                    break
            conds.append(Condition(3, 3, "irreducible", tuple(f)))
        else:
            conds.append(Condition(p, q, "L1L2", tuple(_random_l1l2(rng, n, p, q))))
        covered.add(p)
    for p in sorted(_prime_factors(h)):
        if p in covered:
            continue
        conds.append(Condition(p, p, "L1L2", tuple(_random_l1l2(rng, n, p, p))))
    conds.sort(key=lambda c: c.prime)
    return conds


def _prime_factors(h: int) -> list[int]:
    from .arith import factor

    return sorted(factor(abs(h))) if abs(h) > 1 else []


def condition_holds(F: BinaryForm, c: Condition) -> bool:
    p, q = c.prime, c.modulus
    if c.kind == "split":
        return content(F) % p != 0 and discriminant(F) % p != 0 and splits_completely(F, p)[0]
    if c.kind == "not-split-2":
        return content(F) % 2 != 0 and tuple(x % 2 for x in F.coeffs) != (0, 1, 1, 0)
    if c.kind == "irreducible":
        return content(F) % 3 != 0 and is_irreducible_mod_p(F, 3)
    if c.kind == "L1L2":
        l = valuation(q, p)
        m = matches_L1L2_power(F, p, l)
        return m is not None and check_L1L2(F, m, p)
    raise ValueError(c.kind)


# ---------------------------------------------------------------------------
# Galois group


@dataclass
class GaloisCertificate:
    status: str  # certified | rejected
    witnesses: dict = field(default_factory=dict)
    reason: Optional[str] = None

    def to_json(self) -> dict:
        return {"status": self.status, "witnesses": {k: str(v) for k, v in sorted(self.witnesses.items())}, "reason": self.reason}


def _irreducible_over_q(F: BinaryForm) -> bool:
    import sympy

    t = sympy.Symbol("t")
    coeffs = list(F.coeffs)
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    if len(coeffs) - 1 < F.degree:
        return False  # y divides F
    _, facs = sympy.factor_list(sympy.Poly(coeffs, t))
    return len(facs) == 1 and facs[0][1] == 1


def certify_galois(F, prime_limit: int = 20000) -> GaloisCertificate:
    """Certify Gal = S_n: n = 3 by irreducibility and a non-square discriminant;
    otherwise by Frobenius cycle types n, n-1 and a transposition at unramified primes."""
    F = F if isinstance(F, BinaryForm) else BinaryForm(F)
    n = F.degree
    D = discriminant(F)
    if D == 0:
        return GaloisCertificate("rejected", reason="zero discriminant")
    wanted = {
        "n-cycle": [n],
        "(n-1)-cycle": sorted([1, n - 1]),
        "transposition": sorted([1] * (n - 2) + [2]),
    }
    found: dict[str, int] = {}
    for p in primes_up_to(prime_limit):
        if D % p == 0 or F.coeffs[0] % p == 0:
            continue
        degs = factor_mod_p(F, p).degrees()
        for name, pattern in wanted.items():
            if name not in found and degs == pattern:
                found[name] = p
        if "n-cycle" in found and (n == 3 or len(found) == 3):
            break
    if "n-cycle" not in found and not _irreducible_over_q(F):
        return GaloisCertificate("rejected", reason="reducible")
    if n == 3:
        if D > 0 and math.isqrt(D) ** 2 == D:
            return GaloisCertificate("rejected", found, reason="square discriminant")
        found["disc-nonsquare"] = 1
        return GaloisCertificate("certified", found)
    if len(found) < 3:
        raise GaloisTimeout(f"cycle-type witnesses incomplete below {prime_limit}: {sorted(found)}")
    return GaloisCertificate("certified", found)


# ---------------------------------------------------------------------------
# building F


@dataclass
class BuildReport:
    primes: tuple[int, ...]
    m: int
    threshold: int
    conditions: list[Condition]
    galois: GaloisCertificate
    attempts: int
    histogram: dict
    power_checked: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "primes": [str(p) for p in self.primes],
            "m": str(self.m),
            "threshold": str(self.threshold),
            "conditions": [
                {"prime": str(c.prime), "modulus": str(c.modulus), "kind": c.kind} for c in self.conditions
            ],
            "galois": self.galois.to_json(),
            "attempts": str(self.attempts),
            "rejections": {k: str(v) for k, v in sorted(self.histogram.items())},
            "power_pattern_primes_checked": [str(p) for p in self.power_checked],
        }


def large_prime_conditions_hold(F: BinaryForm, n: int, primes: tuple[int, ...]) -> tuple[bool, tuple[int, ...]]:
    """No c M^r (mod p) at the relevant large primes (only candidates can fail)."""
    cands = power_pattern_candidates(F)
    if n == 3:
        relevant = [p for p in cands if p > max(primes) and p % 3 == 1]
    else:
        cutoff = (2 * genus(n) + 1) ** 2
        relevant = [p for p in cands if p > cutoff]
    for p in relevant:
        if content(F) % p == 0:
            return False, tuple(relevant)
        pat = is_const_times_power(F, p)
        if pat is not None and (n != 3 or pat.exponent == 3):
            return False, tuple(relevant)
    return True, tuple(relevant)


def build_F(params: PipelineParams) -> tuple[BinaryForm, BuildReport]:
    params.validate()
    n, h = params.n, params.h
    rng = random.Random(params.seed)
    primes, m = choose_primes(n, h, params.k)
    thr = disc_threshold(n, h, m)
    if params.scale == "demo":
        thr = params.threshold_override if params.threshold_override is not None else DEMO_THRESHOLD
    conds = residue_conditions(n, h, primes, rng)
    moduli = [c.modulus for c in conds]
    res_coeffs = []
    for i in range(n + 1):
        r, M = crt([c.residues[i] for c in conds], moduli)
        res_coeffs.append(r)
    # coefficient size aimed at |disc| ~ S^(2n-2) comfortably above the threshold
    S = max(M, 16 * (_iroot(thr, 2 * n - 2) + 1))
    span = max(1, S // M)
    coeffs = [r + M * rng.randrange(-span, span + 1) for r in res_coeffs]
    coeffs[0] = res_coeffs[0] + M * rng.randrange(span, 2 * span + 1)
    hist: Counter = Counter()
    for attempt in range(1, params.budget + 1):
        F = BinaryForm(coeffs)
        reason, galois, checked = _admissibility(F, n, h, primes, thr, conds)
        if reason is None:
            report = BuildReport(primes, m, thr, conds, galois, attempt, dict(hist), checked)
            log.info("F found after %d attempts", attempt)
            return F, report
        hist[reason] += 1
        coeffs[0] += M
    raise ConstructionBudgetExceeded(hist)


def _iroot(x: int, e: int) -> int:
    lo, hi = 0, 1 << (x.bit_length() // e + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**e <= x:
            lo = mid
        else:
            hi = mid - 1
    return lo


def _admissibility(F: BinaryForm, n, h, primes, thr, conds):
    if F.coeffs[0] <= 0:
        return "positive-leading", None, ()
    D = discriminant(F)
    if abs(D) <= thr:
        return "disc-threshold", None, ()
    if content(F) != 1:
        return "content", None, ()
    for c in conds:
        if not condition_holds(F, c):
            return f"congruence-{c.kind}", None, ()
    ok, checked = large_prime_conditions_hold(F, n, primes)
    if not ok:
        return "large-prime-power-pattern", None, ()
    if not is_maximal(F):
        return "maximality", None, ()
    galois = certify_galois(F)
    if galois.status != "certified":
        return f"galois-{galois.reason}", None, ()
    return None, galois, checked


# ---------------------------------------------------------------------------
# the pipeline


def local_primes(G: BinaryForm, h: int, path_primes) -> list[int]:
    """The required prime set plus the descent primes, which always divide disc(G)."""
    return sorted(set(required_prime_set(G, h)) | set(path_primes))


def _analyze_output(args):
    G, h, B, path_primes = args
    maximal = is_maximal(G)
    verdict = locally_represents_everywhere(G, h, local_primes(G, h, path_primes))
    sols = enumerate_solutions(G, h, B)
    return maximal, verdict, sols.solutions


@dataclass
class PipelineResult:
    params: PipelineParams
    F: BinaryForm
    report: BuildReport
    certificates: list[dict]
    summary: dict
    outputs: list = field(default_factory=list)


def run_pipeline(params: PipelineParams) -> PipelineResult:
    F, report = build_F(params)
    n, h = params.n, params.h
    primes, m = report.primes, report.m
    outputs = descend_chain(F, primes)
    jobs = [(o.form, h, params.box, primes) for o in outputs]
    if params.workers > 1:
        with ProcessPoolExecutor(max_workers=params.workers) as ex:
            analyses = list(ex.map(_analyze_output, jobs, chunksize=4))
    else:
        analyses = [_analyze_output(j) for j in jobs]

    total = n ** params.k
    D = discriminant(F)
    eps = standard_eps(n)
    tb = theorem_bound(n, D, abs(h) * m, eps)
    t = tb.formula_bound
    s = sum(1 for _, _, sols in analyses if sols)
    full = params.scale == "full"
    if full and not tb.hypothesis_ok:
        raise ConstructionError("full-scale F does not meet the discriminant hypothesis")
    if full and s > t:
        raise ConstructionError(f"{s} descended forms have solutions, more than the bound {t}")
    guarantee = total - t if (full and tb.hypothesis_ok) else None
    distinct = len({o.form.coeffs for o in outputs}) == len(outputs)

    aggregate = {
        "m": str(m),
        "h": str(h),
        "n": str(n),
        "k": str(params.k),
        "total": str(total),
        "origin_disc": str(D),
        "eps": str(eps),
        "theorem_bound": str(t),
        "hypothesis_ok": tb.hypothesis_ok,
        "siblings_with_solutions": str(s),
        "guarantee": None if guarantee is None else str(guarantee),
        "scale": params.scale,
    }
    certs = []
    if s <= t:
        for o, (maximal, verdict, sols) in zip(outputs, analyses):
            if sols or not maximal or verdict.status != "yes":
                continue
            certs.append(
                {
                    "form": o.form.to_json(),
                    "h": str(h),
                    "origin": F.to_json(),
                    "path": o.path.to_json(),
                    "index": str(o.path.index),
                    "maximality": _maximality_attestation(o.form),
                    "local": verdict.to_json(),
                    "search": {"box": str(params.box), "solutions": []},
                    "aggregate": aggregate,
                }
            )
    summary = {
        "params": params.to_json(),
        "origin": F.to_json(),
        "origin_disc": str(D),
        "build": report.to_json(),
        "total": str(total),
        "with_solutions": str(s),
        "theorem_bound": str(t),
        "hypothesis_ok": tb.hypothesis_ok,
        "guarantee_formula": {"expression": "n^k - bound", "value": str(total - t)},
        "aggregate_guarantee": None if guarantee is None else str(guarantee),
        "candidates_without_solutions": str(total - s),
        "certificates": str(len(certs)),
        "all_maximal": all(a[0] for a in analyses),
        "all_locally_soluble": all(a[1].status == "yes" for a in analyses),
        "pairwise_distinct": distinct,
        "forms": [
            {
                "index": str(o.path.index),
                "form": o.form.to_json(),
                "maximal": a[0],
                "local": a[1].status,
                "solutions": [[str(x), str(y)] for x, y in a[2]],
            }
            for o, a in zip(outputs, analyses)
        ],
    }
    return PipelineResult(params, F, report, certs, summary, outputs)


def _maximality_attestation(G: BinaryForm) -> dict:
    D = discriminant(G)
    cands = power_pattern_candidates(G, full_power_only=True)
    return {
        "content": str(content(G)),
        "disc": str(D),
        "candidate_primes": [str(p) for p in cands],
        "checked_primes": [str(p) for p in cands if D % (p * p) == 0],
    }


# ---------------------------------------------------------------------------
# audit


@dataclass(frozen=True)
class AuditResult:
    valid: bool
    reason: Optional[str] = None


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


class _LargeNumber(ValueError):
    pass


def _int_hook(text: str) -> int:
    v = int(text)
    if abs(v) > 2**53:
        raise _LargeNumber(text)
    return v


def _float_hook(text: str) -> float:
    v = float(text)
    if abs(v) > 2**53:
        raise _LargeNumber(text)
    return v


def load_json_strict(text: str):
    """Parse JSON, rejecting numeric literals beyond 2^53 (those must be strings)."""
    return json.loads(text, parse_int=_int_hook, parse_float=_float_hook)


def audit(cert: dict) -> AuditResult:
    try:
        return _audit(cert)
    except (KeyError, TypeError, ValueError, DescentError) as exc:
        return AuditResult(False, f"malformed: {exc}")


def _audit(cert: dict) -> AuditResult:
    G = BinaryForm.from_json(cert["form"])
    F = BinaryForm.from_json(cert["origin"])
    h = int(cert["h"])
    n = F.degree
    steps = [DescentStep.from_json(s) for s in cert["path"]]

    # discriminant law first: disc(G) = disc(F) * prod p^((n-1)(n-2)) over the path
    DF, DG = discriminant(F), discriminant(G)
    expected = DF
    for st in steps:
        expected *= st.prime ** ((n - 1) * (n - 2))
    if DG != expected or str(DG) != cert["maximality"]["disc"]:
        return AuditResult(False, "disc-law")

    # path: each step must be a genuine descent step of its parent
    parent = F
    for st in steps:
        ok, labels = splits_completely(parent, st.prime) if content(parent) % st.prime else (False, [])
        if not ok or st.label not in labels:
            return AuditResult(False, "path-label")
        parent = rederive(parent, [st])
    if parent != G:
        return AuditResult(False, "path-rederivation")
    if content(G) != 1:
        return AuditResult(False, "content")
    if not is_maximal(G):
        return AuditResult(False, "maximality")

    local = cert["local"]
    if local["status"] != "yes":
        return AuditResult(False, "local-status")
    places = set()
    for ev_json in local["evidence"]:
        ev = LocalEvidence.from_json(ev_json)
        places.add(ev.place)
        if ev.verdict != "soluble":
            return AuditResult(False, "local-verdict")
        if ev.place == "real":
            if not represents_over_reals(G, h):
                return AuditResult(False, "real-place")
            continue
        if ev.witness is None or not verify_witness(G, h, ev.place, ev.witness):
            return AuditResult(False, "witness-check-failed")
        if ev.criterion is not None:
            crit = ev.criterion
            match = L1L2Match(
                int(crit["modulus"]), tuple(int(c) for c in crit["L1"]), tuple(int(c) for c in crit["L2"])
            )
            if not check_L1L2(G, match, ev.place):
                return AuditResult(False, "criterion-check-failed")
    if "real" not in places or not set(local_primes(G, h, [st.prime for st in steps])) <= places:
        return AuditResult(False, "local-coverage")

    B = int(cert["search"]["box"])
    if cert["search"]["solutions"] or enumerate_solutions(G, h, B).solutions:
        return AuditResult(False, "search")

    agg = cert["aggregate"]
    m = math.prod(st.prime for st in steps)
    if int(agg["m"]) != m or int(agg["h"]) != h or int(agg["n"]) != n or int(agg["k"]) != len(steps):
        return AuditResult(False, "aggregate")
    eps = Fraction(agg["eps"])
    tb = theorem_bound(n, DF, abs(h) * m, eps)
    total = n ** len(steps)
    s = int(agg["siblings_with_solutions"])
    if (
        int(agg["total"]) != total
        or int(agg["origin_disc"]) != DF
        or int(agg["theorem_bound"]) != tb.formula_bound
        or bool(agg["hypothesis_ok"]) != tb.hypothesis_ok
        or s > tb.formula_bound
    ):
        return AuditResult(False, "aggregate")
    want = str(total - tb.formula_bound) if (agg["scale"] == "full" and tb.hypothesis_ok) else None
    if agg["guarantee"] != want:
        return AuditResult(False, "aggregate")
    return AuditResult(True)


def audit_text(text: str) -> list[AuditResult]:
    try:
        data = load_json_strict(text)
    except _LargeNumber as exc:
        return [AuditResult(False, f"unquoted-large-number: {exc}")]
    except json.JSONDecodeError as exc:
        return [AuditResult(False, f"not-json: {exc}")]
    certs = data if isinstance(data, list) else [data]
    return [audit(c) for c in certs]

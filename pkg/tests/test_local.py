import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from gen import random_form
from thuehasse.arith import primes_up_to, valuation
from thuehasse.forms import BinaryForm, content, discriminant
from thuehasse.local import (
    OBSTRUCTIONS,
    LocalEvidence,
    Witness,
    cubic_local_criterion,
    locally_represents_everywhere,
    real_root_count,
    represents_over_reals,
    required_prime_set,
    soluble_p_adic,
    verify_witness,
)

CUBE_SUM = BinaryForm([1, 0, 0, 1])
XY_SUM = BinaryForm([0, 1, 1, 0])


def primitive_cubic(rng, bound=30):
    while True:
        F = random_form(3, rng, bound)
        if content(F) == 1 and discriminant(F) != 0:
            return F


def test_real_place_examples():
    assert represents_over_reals(CUBE_SUM, -5)
    assert not represents_over_reals([1, 0, 0, 0, 1], -1)
    assert represents_over_reals([1, 0, 0, 0, -2], -1)
    assert represents_over_reals([1, 0, 0, 0, 1], 3)
    # (x^2 - 2y^2)^2 is never negative even though F(t, 1) has real roots
    assert not represents_over_reals([1, 0, -4, 0, 4], -1)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=2, max_size=7).filter(lambda f: f[0] != 0))
def test_real_root_count_matches_sympy(f):
    assert real_root_count(list(f)) == oracles.real_root_count(f)


def test_real_place_sign_scan():
    rng = random.Random(2)
    for _ in range(150):
        F = random_form(4, rng, 9)
        if discriminant(F) == 0:
            continue
        vals = {oracles.evaluate(F.coeffs, x, y) for x in range(-12, 13) for y in range(-12, 13) if (x, y) != (0, 0)}
        if any(v < 0 for v in vals):
            assert represents_over_reals(F, -1)
        if any(v > 0 for v in vals):
            assert represents_over_reals(F, 1)
        if not represents_over_reals(F, -1):
            assert all(v >= 0 for v in vals)


def test_cubic_criterion_examples():
    assert cubic_local_criterion(XY_SUM, 2) == "insoluble"
    rng = random.Random(3)
    for _ in range(30):
        assert cubic_local_criterion(primitive_cubic(rng), 11) == "soluble"
    assert cubic_local_criterion([10, -18, 36, -17], 7) == "insoluble"
    with pytest.raises(ValueError):
        cubic_local_criterion(CUBE_SUM, 3)


def test_cube_of_linear_form_with_noncube_unit():
    # 3 (x - 2y)^3 + 7 G0 takes only values 3 * {0, 1, 6} mod 7
    rng = random.Random(4)
    for _ in range(40):
        G0 = [rng.randint(-9, 9) for _ in range(4)]
        F = BinaryForm(3 * c + 7 * g for c, g in zip([1, -6, 12, -8], G0))
        if content(F) != 1 or discriminant(F) == 0:
            continue
        assert cubic_local_criterion(F, 7) == "insoluble"
        assert soluble_p_adic(F, 1, 7).verdict == "insoluble"
        assert oracles.residue_solutions(F.coeffs, 1, 7, 1) == []


def test_seven_split_case_needs_a_scan():
    # x^2 y + 3 y^3 splits mod 7 yet misses both cubic residues 1 and 6
    F = BinaryForm([0, 1, 0, 3])
    assert oracles.value_set_mod(F.coeffs, 7) == {0, 2, 3, 4, 5}
    assert cubic_local_criterion(F, 7) == "insoluble"
    assert soluble_p_adic(F, 1, 7).verdict == "insoluble"


def test_p_adic_examples():
    ev = soluble_p_adic(CUBE_SUM, 1, 7, 6)
    assert ev.verdict == "soluble" and ev.witness.margin == 0
    assert (ev.witness.x, ev.witness.y) in {(1, 0), (0, 1)}
    assert verify_witness(CUBE_SUM, 1, 7, ev.witness)
    ev = soluble_p_adic(XY_SUM, 1, 2, 6)
    assert ev.verdict == "insoluble" and ev.obstruction == "split-2-pattern"
    # cubes mod 7 are {0, 1, 6}, so x^3 + y^3 never hits 4 mod 7
    ev = soluble_p_adic(CUBE_SUM, 4, 7, 6)
    assert ev.verdict == "insoluble"
    assert oracles.residue_solutions(CUBE_SUM.coeffs, 4, 7, 1) == []
    ev = soluble_p_adic(CUBE_SUM, 28, 7, 6)
    assert ev.verdict == "soluble" and verify_witness(CUBE_SUM, 28, 7, ev.witness)


def test_everywhere_examples():
    v = locally_represents_everywhere(CUBE_SUM, 1)
    assert v.status == "yes"
    v = locally_represents_everywhere([2, 1, 1, 2], 1)
    assert v.status == "no" and v.place == 2
    assert v.evidence[-1].obstruction == "split-2-pattern"
    v = locally_represents_everywhere([1, 0, 0, 0, 1], -1)
    assert v.status == "no" and v.place == "real"
    assert v.evidence[0].obstruction == "sign-obstruction"


def test_required_prime_sets():
    assert required_prime_set(CUBE_SUM, 1) == [2, 3, 5, 7]
    assert required_prime_set(CUBE_SUM, 5 * 59) == [2, 3, 5, 7, 59]
    quintic = required_prime_set([1, 0, 0, 0, 0, 1], 1)
    assert quintic == list(primes_up_to(169))  # genus 6
    with pytest.raises(ValueError):
        required_prime_set([1, 2, 1], 1)


def test_obstruction_tags_closed():
    rng = random.Random(5)
    for _ in range(200):
        F = primitive_cubic(rng, 12)
        h = rng.choice([1, 2, 3, 5, 7, 12])
        for p in (2, 3, 5, 7):
            ev = soluble_p_adic(F, h, p)
            assert ev.verdict in ("soluble", "insoluble", "undetermined")
            if ev.verdict == "insoluble":
                assert ev.obstruction in OBSTRUCTIONS


def test_insoluble_verdicts_confirmed_by_residue_scan():
    rng = random.Random(6)
    checked = 0
    for _ in range(400):
        F = primitive_cubic(rng, 12)
        h = rng.choice([1, 2, 3, 4, 6, 9])
        p = rng.choice([2, 3, 7])
        ev = soluble_p_adic(F, h, p)
        if ev.verdict != "insoluble" or valuation(h, p) >= 3:
            continue
        level = max(ev.depth, valuation(h, p) + 1)
        if p ** (2 * level) > 3 * 10**5:
            continue
        assert oracles.residue_solutions(F.coeffs, h, p, level) == [], (F, h, p)
        checked += 1
    assert checked > 20


def test_soluble_witnesses_reverify():
    rng = random.Random(7)
    for _ in range(300):
        n = rng.choice([3, 4, 5])
        F = random_form(n, rng, 15)
        if discriminant(F) == 0:
            continue
        h = rng.choice([1, -1, 2, 5, 16, 81])
        p = rng.choice([2, 3, 5, 7, 11, 13])
        ev = soluble_p_adic(F, h, p)
        if ev.verdict == "soluble":
            assert verify_witness(F, h, p, ev.witness)
            w = ev.witness
            target = h // p ** (n * w.scale)
            assert (oracles.evaluate(F.coeffs, w.x, w.y) - target) % w.modulus == 0


def test_witness_tampering_rejected():
    ev = soluble_p_adic(CUBE_SUM, 28, 7)
    w = ev.witness
    assert not verify_witness(CUBE_SUM, 28, 7, Witness(w.x + 1, w.y, w.modulus, w.margin, w.scale))
    assert not verify_witness(CUBE_SUM, 28, 7, Witness(w.x, w.y, w.modulus, w.margin + 1, w.scale))
    assert not verify_witness(CUBE_SUM, 28, 7, Witness(7 * w.x, 7 * w.y, w.modulus, w.margin, w.scale))


def test_monotone_in_depth():
    rng = random.Random(8)
    for _ in range(100):
        F = primitive_cubic(rng, 20)
        p = rng.choice([2, 3, 5, 7])
        ev = soluble_p_adic(F, 1, p, 8)
        if ev.verdict != "soluble":
            continue
        for d in (ev.depth, ev.depth + 3, 20):
            later = soluble_p_adic(F, 1, p, d)
            assert later.verdict == "soluble" and later.witness == ev.witness


def test_large_primes_outside_required_set_are_soluble():
    rng = random.Random(9)
    for _ in range(50):
        F = primitive_cubic(rng, 40)
        req = set(required_prime_set(F, 1))
        extra = [p for p in primes_up_to(400) if p not in req][:5]
        for p in extra:
            assert soluble_p_adic(F, 1, p).verdict == "soluble", (F, p)


def test_primes_above_scan_limit():
    assert soluble_p_adic(CUBE_SUM, 1, 2003).verdict == "soluble"
    p = 2017  # 1 mod 3
    c = next(c for c in range(2, p) if pow(c, (p - 1) // 3, p) != 1)
    F = BinaryForm(c * v + p * w for v, w in zip([1, 3, 3, 1], [1, 0, 2, 5]))
    ev = soluble_p_adic(F, 1, p)
    assert ev.verdict == "insoluble" and ev.obstruction == "nonresidue-cube-pattern"
    assert all((c * t**3 - 1) % p for t in range(p))


def test_evidence_json_round_trip():
    ev = soluble_p_adic(CUBE_SUM, 28, 7)
    assert LocalEvidence.from_json(ev.to_json()) == ev
    assert all(isinstance(v, str) for v in ev.to_json()["witness"].values())

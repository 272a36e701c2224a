import itertools
import random

import numpy as np
import pytest

from taylorsieve.errors import FieldMismatch
from taylorsieve.gf import (arith, build_embedding, element_from_json, extension, field_create,
                            field_from_json, format_element, frobenius, inv, is_irreducible,
                            parse_element, smallest_irreducible)


def brute_irreducible(poly, p):
    """No monic factor of degree <= k/2, by trial division over all candidates."""
    k = len(poly) - 1
    for deg in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            g = list(low) + [1]
            # polynomial long division mod p
            r = list(poly)
            for i in range(len(r) - 1, deg - 1, -1):
                c = r[i]
                if c:
                    for j, gj in enumerate(g):
                        r[i - deg + j] = (r[i - deg + j] - c * gj) % p
            if not any(r[:deg]):
                return False
    return True


def test_prime_field_modulus():
    F = field_create(2, 1)
    assert F.q == 2 and F.modulus == (0, 1)


def test_gf9_modulus():
    assert field_create(3, 2).modulus == (1, 0, 1)


def test_gf16_modulus_is_first_irreducible_in_encoding_order():
    mod = field_create(2, 4).modulus
    assert mod == (1, 1, 0, 0, 1)
    # every monic quartic with a smaller encoding is reducible
    for v in range(16):
        cand = tuple((v >> i) & 1 for i in range(4)) + (1,)
        if sum(c << i for i, c in enumerate(cand)) < sum(c << i for i, c in enumerate(mod)):
            assert not brute_irreducible(cand, 2)
    assert brute_irreducible(mod, 2)


@pytest.mark.parametrize("p,k", [(2, 2), (2, 3), (2, 5), (3, 2), (3, 3), (5, 2), (7, 2)])
def test_ben_or_agrees_with_trial_division(p, k):
    for low in itertools.product(range(p), repeat=k):
        poly = list(low) + [1]
        assert is_irreducible(poly, p) == brute_irreducible(poly, p)
    assert brute_irreducible(smallest_irreducible(p, k), p)


def test_bad_arguments():
    with pytest.raises(ValueError):
        field_create(4, 1)
    with pytest.raises(ValueError):
        field_create(3, 0)


def test_basic_arithmetic():
    F2 = field_create(2)
    assert F2(1) + F2(1) == 0
    F5 = field_create(5)
    assert inv(F5(2)) == 3
    F9 = field_create(3, 2)
    t = F9.gen
    assert t * t == 2
    assert arith(F9(2), t, "div") * t == 2
    with pytest.raises(ZeroDivisionError):
        F5(0).inv()


def test_context_mismatch():
    with pytest.raises(FieldMismatch):
        field_create(3)(1) + field_create(5)(1)


def test_negative_powers():
    F = field_create(7, 2)
    for a in F.elements()[1:]:
        assert a ** -3 * a**3 == 1


def test_frobenius_examples():
    F4 = field_create(2, 2)
    assert frobenius(F4(1), 1) == 1
    assert frobenius(F4.gen, 1) == F4.gen + 1
    F9 = field_create(3, 2)
    for a in F9.elements():
        assert frobenius(frobenius(a, 1), 1) == a
    with pytest.raises(ValueError):
        frobenius(field_create(2, 3).gen, 2)


def test_frobenius_fixes_exactly_the_subfield():
    K = field_create(2, 6)
    for s in (1, 2, 3):
        sub = field_create(2, s)
        emb = build_embedding(sub, K)
        fixed = {a.value for a in K.elements() if frobenius(a, s) == a}
        assert fixed == {emb(b).value for b in sub.elements()}


def test_fermat_exhaustive():
    for p, k in [(2, 1), (2, 4), (3, 2), (3, 4), (5, 2), (7, 2)]:
        F = field_create(p, k)
        for a in F.elements():
            assert a ** F.q == a


def test_table_arithmetic_matches_scalar():
    F = field_create(3, 3)
    a = np.arange(F.q)
    rng = random.Random(0)
    b = np.array([rng.randrange(F.q) for _ in a])
    assert list(F.mul_array(a, b)) == [F.mul(int(x), int(y)) for x, y in zip(a, b)]
    assert list(F.add_array(a, b)) == [F.add(int(x), int(y)) for x, y in zip(a, b)]
    assert list(F.frob_array(a)) == [F.frob(int(x)) for x in a]


def test_embedding_examples():
    F2, F4 = field_create(2), field_create(2, 2)
    assert build_embedding(F2, F4)(F2(1)) == 1
    F9, F81 = field_create(3, 2), field_create(3, 4)
    emb = build_embedding(F9, F81)
    roots = [a for a in F81.elements() if a * a + 1 == 0]
    assert emb.image_of_generator == min(roots, key=lambda a: a.value)
    assert build_embedding(F9, F9).image_of_generator == F9.gen


def test_embedding_is_ring_homomorphism():
    rng = random.Random(1)
    for (p, s, r) in [(2, 2, 3), (3, 2, 2), (5, 1, 3), (2, 3, 2)]:
        src, dst = field_create(p, s), field_create(p, s * r)
        phi = build_embedding(src, dst)
        for _ in range(50):
            a, b = src.element(rng.randrange(src.q)), src.element(rng.randrange(src.q))
            assert phi(a + b) == phi(a) + phi(b)
            assert phi(a * b) == phi(a) * phi(b)
        assert phi(src(1)) == 1


def test_embedding_composition_lands_on_the_same_subfield():
    # two routes into GF(q^4) may differ by a Galois automorphism of the
    # source, but both must be homomorphisms onto the same subfield
    for q_k, p in [(1, 2), (1, 3), (2, 2)]:
        F, F2, F4 = (field_create(p, q_k * m) for m in (1, 2, 4))
        direct = build_embedding(F, F4)
        via = build_embedding(F, F2).compose(build_embedding(F2, F4))
        assert {direct(a).value for a in F.elements()} == {via(a).value for a in F.elements()}
        conj = [direct.image_of_generator]
        for _ in range(F.k - 1):
            conj.append(frobenius(conj[-1], 1))
        assert via.image_of_generator in conj


def test_extension_returns_single_extension():
    K, emb = extension(field_create(3, 2), 3)
    assert (K.p, K.k) == (3, 6)
    assert emb.source == field_create(3, 2)


def test_formatting_and_json():
    F9 = field_create(3, 2)
    a = F9.element(7)  # 1 + 2t
    assert format_element(a) == "(1 + 2*t)"
    assert parse_element("1 + 2*t", F9) == a
    assert element_from_json(a.to_json(), F9) == a
    assert field_from_json(F9.to_json()) == F9
    assert format_element(field_create(5)(3)) == "3"

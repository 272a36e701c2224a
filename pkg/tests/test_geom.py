import itertools
import json
from fractions import Fraction

import pytest

from taylorsieve.errors import BudgetExceeded, ConfigError
from taylorsieve.geom import (Subscheme, closed_form_zeta_inverse, closed_point,
                              closed_point_counts_moebius, closed_point_counts_orbits,
                              closed_point_table_csv, closed_points, count_points,
                              enumerate_points, finite_scheme, line_at_infinity_minus,
                              load_scheme, projective_space, scheme_from_json, scheme_to_json,
                              zeta_inverse_truncated)
from taylorsieve.gf import field_create
from taylorsieve.mpoly import evaluate, parse

F2, F3, F5 = field_create(2), field_create(3), field_create(5)


def conic(F):
    return Subscheme(2, F, equations=(parse("x0*x2 - x1^2", 3, F),), dim=1, name="conic")


def brute_points(X, r):
    """All normalized points of P^n(F_{q^r}) in X, without vectorization."""
    K = field_create(X.base.p, X.base.k * r)
    out = []
    for vals in itertools.product(range(K.q), repeat=X.n + 1):
        if not any(vals):
            continue
        lead = next(v for v in vals if v)
        if lead != 1:
            continue
        coords = [K.element(v) for v in vals]
        if all(evaluate(f, coords) == 0 for f in X.equations) and \
                all(evaluate(g, coords) != 0 for g in X.non_equations):
            out.append(vals)
    return out


def test_enumerate_examples():
    pts = enumerate_points(projective_space(1, F2), 1)
    assert [p.key for p in pts] == [(0, 1), (1, 0), (1, 1)]
    assert len(enumerate_points(conic(F3), 1)) == 4
    assert len(enumerate_points(projective_space(2, F2), 2)) == 21


def test_enumeration_is_lex_ordered_and_matches_brute_force():
    X = Subscheme(2, F3, non_equations=(parse("x0 + x1 + x2", 3, F3),))
    pts = [p.key for p in enumerate_points(X, 1)]
    assert pts == sorted(pts)
    assert sorted(pts) == sorted(brute_points(X, 1))
    assert sorted(p.key for p in enumerate_points(conic(F2), 2)) == sorted(brute_points(conic(F2), 2))


def test_count_examples():
    P1 = projective_space(1, F2)
    assert [count_points(P1, r) for r in (1, 2, 3)] == [3, 5, 9]
    assert count_points(projective_space(2, F3), 1) == 13
    empty = Subscheme(2, F3, non_equations=(parse("0", 3, F3),))
    assert count_points(empty, 1) == 0 == count_points(empty, 2)


def test_closed_points_examples():
    pts = closed_points(projective_space(1, F2), 2)
    assert [x.degree for x in pts] == [1, 1, 1, 2]
    pts = closed_points(projective_space(2, F2), 2)
    assert sum(x.degree == 1 for x in pts) == 7 and sum(x.degree == 2 for x in pts) == 7
    U = line_at_infinity_minus(F3, [(0, 0, 1), (0, 1, 0), (0, 1, 1), (0, 1, 2)])
    assert closed_points(U, 1) == []


def test_closed_point_structure():
    for x in closed_points(conic(F2), 4):
        assert len(set(x.orbit)) == x.degree
        assert x.rep == min(x.orbit)
        # Frobenius permutes the orbit cyclically
        assert [P.frobenius(F2) for P in x.orbit] == list(x.orbit[1:]) + [x.orbit[0]]
        assert closed_point(x.orbit[-1].coords, F2) == x


def test_moebius_examples():
    assert closed_point_counts_moebius(projective_space(1, F2), 3) == [(1, 3), (2, 1), (3, 2)]
    assert closed_point_counts_moebius(projective_space(2, F2), 2) == [(1, 7), (2, 7)]
    # N_3 of P^2 over GF(2) is 73, so c_3 = (73 - 7)/3 = 22
    assert closed_point_counts_moebius(projective_space(2, F2), 3)[2] == (3, 22)


@pytest.mark.parametrize("X,E", [
    (projective_space(1, F2), 6),
    (projective_space(2, F2), 5),
    (conic(F3), 5),
    (line_at_infinity_minus(F3, [(0, 0, 1), (0, 1, 0), (0, 1, 1), (0, 1, 2)]), 6),
    (Subscheme(2, F2, equations=(parse("x0^3 + x1^3 + x2^3", 3, F2),)), 6),
])
def test_orbit_counts_equal_moebius_counts(X, E):
    counts = closed_point_counts_moebius(X, E)
    assert closed_point_counts_orbits(X, E) == counts
    for d in range(1, E + 1):
        assert sum(r * c for r, c in counts if d % r == 0) == count_points(X, d)


def test_zeta_examples():
    L = Subscheme(2, F2, equations=(parse("x0", 3, F2),), dim=1)
    assert closed_form_zeta_inverse(L, 2) == Fraction(3, 8)
    assert abs(float(zeta_inverse_truncated(L, 2, 14).value) - 3 / 8) < 1e-4
    U = line_at_infinity_minus(F3, [(0, 0, 1), (0, 1, 0), (0, 1, 1), (0, 1, 2)])
    assert closed_form_zeta_inverse(U, 2) == Fraction(243, 256)
    assert closed_form_zeta_inverse(projective_space(2, F2), 3) == Fraction(21, 64)
    empty = finite_scheme([], F3, 2)
    assert zeta_inverse_truncated(empty, 2, 3).value == 1


def test_zeta_truncation_is_monotone_and_above_limit():
    P2 = projective_space(2, F2)
    ztr = zeta_inverse_truncated(P2, 3, 6)
    partials = [v for _, _, v in ztr.per_degree]
    assert all(a >= b for a, b in zip(partials, partials[1:]))
    assert partials[-1] >= Fraction(21, 64)
    assert float(partials[-1]) - 21 / 64 <= ztr.tail_bound


def test_zeta_multiplicativity():
    L = Subscheme(2, F3, equations=(parse("x0", 3, F3),), dim=1)
    Z = [closed_point(c, F3) for c in [(0, 0, 1), (0, 1, 0)]]
    U = L.minus(Z)
    for E in range(1, 5):
        lhs = zeta_inverse_truncated(U, 2, E).value * zeta_inverse_truncated(
            finite_scheme(Z, F3, 2), 2, E).value
        assert lhs == zeta_inverse_truncated(L, 2, E).value


def test_point_budget():
    with pytest.raises(BudgetExceeded):
        count_points(projective_space(3, F5), 4, budget=1000)


def test_scheme_json_round_trip(tmp_path):
    U = line_at_infinity_minus(F3, [(0, 0, 1), (0, 1, 0)])
    obj = scheme_to_json(U)
    path = tmp_path / "u.json"
    path.write_text(json.dumps(obj))
    V = load_scheme(path)
    assert count_points(V, 2) == count_points(U, 2)
    bad = tmp_path / "bad.json"
    bad.write_text('{"p": 3,\n "n": }')
    with pytest.raises(ConfigError, match="line 2"):
        load_scheme(bad)
    with pytest.raises(ConfigError):
        scheme_from_json({"p": 4, "n": 2})


def test_csv_table():
    text = closed_point_table_csv(zeta_inverse_truncated(projective_space(1, F2), 2, 3))
    lines = text.strip().splitlines()
    assert lines[0] == "degree,count,partial_product_num,partial_product_den,partial_product"
    assert lines[1].startswith("1,3,27,64,")

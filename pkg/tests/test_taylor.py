import json
from fractions import Fraction

import pytest

from taylorsieve.errors import ConfigError, FieldMismatch, PreconditionError
from taylorsieve.geom import Subscheme, closed_point, closed_points, projective_space
from taylorsieve.gf import field_create
from taylorsieve.mpoly import MPoly, evaluate, jet_at, parse
from taylorsieve.taylor import (JetAllowedSet, QuotientAtPoint, RestrictionToZ, TaylorCondition,
                                conic_condition, conic_family, conic_tangent_quotient,
                                conic_through, condition_from_json, constant_condition,
                                eval_jet_condition, eval_quotient_condition, load_condition,
                                restrict_to_Z, smoothness_condition, smoothness_quotient,
                                taylor1_fiber)

F2, F3, F5 = field_create(2), field_create(3), field_create(5)
Y = [(1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1)]


def conic_X(F):
    return Subscheme(2, F, equations=(parse("x0*x2 - x1^2", 3, F),), dim=1)


def test_fiber_is_value_and_gradient():
    x = closed_point([1, 2, 3], F5)
    f = parse("x0^2 + x1*x2", 3, F5)
    value, grad = taylor1_fiber(f, x)
    assert value == evaluate(f, [F5(1), F5(2), F5(3)])
    assert [g.value for g in grad] == [3, 2]


def test_smoothness_quotient_on_projective_space_is_identity():
    x = closed_point([1, 0, 0], F2)
    qd = smoothness_quotient(projective_space(2, F2), x)
    assert [[c.value for c in row] for row in qd.matrix] == [[1, 0], [0, 1]]
    assert eval_quotient_condition(qd, parse("x1", 3, F2))
    assert not eval_quotient_condition(qd, parse("x1^2", 3, F2))


def test_smoothness_quotient_on_conic():
    qd = smoothness_quotient(conic_X(F3), closed_point([1, 0, 0], F3))
    assert [[c.value for c in row] for row in qd.matrix] == [[1, 0]]
    # kernel is spanned by the Jacobian row (0, 1)
    assert all(c == 0 for c in qd.apply([F3(0), F3(1)]))


def test_singular_point_is_a_precondition_error():
    cusp = Subscheme(2, F3, equations=(parse("x1^2*x0 - x2^3", 3, F3),), dim=1)
    with pytest.raises(PreconditionError, match=r"\(1:0:0\)"):
        smoothness_quotient(cusp, closed_point([1, 0, 0], F3))


def test_quotient_must_be_surjective():
    x = closed_point([1, 0, 0], F3)
    with pytest.raises(PreconditionError):
        QuotientAtPoint(x, 1, ((F3(0), F3(0)),), 0)


def test_conic_through_example():
    x = closed_point([0, 1, 2], F5)
    C = conic_through(Y, x)
    expected = parse("x1^2 + x2^2 - x0*x1 - x0*x2", 3, F5)
    # same conic up to the scalar -1
    assert C.poly == expected.scale(F5(4))
    assert C.smooth and not C.gram_det().is_zero()
    for P in Y + [(0, 1, 2)]:
        assert evaluate(C.poly, [F5(c) for c in P]) == 0


def test_conic_other_point_and_degenerate_cases():
    C = conic_through(Y, closed_point([0, 1, 3], F5))
    assert C.smooth
    with pytest.raises(PreconditionError):
        conic_through(Y, closed_point([1, 0, 2], F5))  # on the line x1 = 0 through two of Y
    with pytest.raises(PreconditionError):
        conic_through(Y, closed_point([0, 1, 1], F2))


def test_conic_tangent_quotient_example():
    x = closed_point([0, 1, 2], F5)
    qd = conic_tangent_quotient(conic_through(Y, x), x)
    assert [c.value for c in qd.matrix[0]] == [1, 2]
    assert eval_quotient_condition(qd, parse("x0", 3, F5))
    # a form vanishing at x whose gradient annihilates the tangent direction fails
    assert not eval_quotient_condition(qd, parse("2*x0 - x2 + 2*x1", 3, F5))


def test_conic_family_removed_points():
    Yq, U = conic_family(F3)
    assert sorted(z.rep.key for z in U.excluded) == [(0, 0, 1), (0, 1, 0), (0, 1, 1), (0, 1, 2)]
    assert closed_points(U, 1) == []


def test_conic_condition_at_degree_two_point_is_frobenius_invariant():
    F25 = field_create(5, 2)
    _, U = conic_family(F5)
    cond = conic_condition(Y, U)
    x = next(x for x in closed_points(U, 2) if x.degree == 2)
    other = closed_point(x.orbit[1].coords, F5)
    assert other == x
    for f in [parse(s, 3, F5) for s in ("x0^2 + x1*x2", "x1^2 - 2*x0*x2", "x0*x1")]:
        qd = cond.at(x)
        direct = eval_quotient_condition(qd, f)
        # evaluate at the conjugate representative with conjugated data
        P = x.orbit[1]
        jet = jet_at(f, P, 2)
        v = [F25.element(F25.frob(c.value, 1)) for c in qd.matrix[0]]
        pairing = sum((a * b for a, b in zip(v, jet.gradient)), F25.zero)
        assert direct == bool(jet.value.value or pairing.value)


def test_restrict_to_Z_examples():
    Z = [closed_point([1, 0, 0], F3), closed_point([1, 1, 1], F3)]
    assert [v.value for v in restrict_to_Z(parse("x1*x0^2", 3, F3), Z)] == [0, 1]
    z = next(x for x in closed_points(projective_space(1, F2), 2) if x.degree == 2)
    (v,) = restrict_to_Z(parse("x1^2", 2, F2), [z])
    t = z.rep.coords[1]
    assert v == t * t
    with pytest.raises(PreconditionError):
        restrict_to_Z(parse("x1", 3, F3), [closed_point([0, 1, 0], F3)], [0])


def test_jet_condition():
    x = closed_point([1, 0, 0], F3)
    J = jet_at(parse("x1^2", 3, F3), x, 3)
    assert eval_jet_condition(x, 3, {J}, parse("x1^2", 3, F3))
    assert not eval_jet_condition(x, 3, {J}, parse("x1^2 + x0*x2", 3, F3))
    assert eval_jet_condition(x, 3, {J}, parse("x1^2 + x0*x2", 3, F3), complement=True)
    with pytest.raises(FieldMismatch):
        eval_jet_condition(x, 2, {J}, parse("x1^2", 3, F3))
    A = JetAllowedSet(x, 3, frozenset({J}), complement=True)
    assert A.local_probability() == 1 - Fraction(1, 3**6)


def test_condition_semantics():
    P2 = projective_space(2, F3)
    z = closed_point([1, 0, 0], F3)
    cond = TaylorCondition((smoothness_condition(P2.minus([z])),),
                           z=RestrictionToZ((z,), frozenset({(F3(1),)})))
    f = parse("x1^2", 3, F3)
    assert cond.holds_at(f, z)  # Z points are handled by the restriction only
    assert not cond.z.holds(f)
    assert z not in cond.check_points(1)
    assert len(cond.check_points(1)) == 12


def test_condition_json(tmp_path):
    X = projective_space(2, F3)
    obj = {"kind": "smoothness", "Z": [[1, 0, 0]], "T": [[1], [2]],
           "jets": [{"point": [0, 1, 0], "order": 2, "allowed": [{"0,0": 1}], "complement": True}]}
    cond = condition_from_json(obj, X)
    assert cond.z.local_probability() == Fraction(2, 3)
    assert cond.jets[0].local_probability() == 1 - Fraction(1, 27)
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"kind": "constant", "matrix": [[1, 0]]}))
    c2 = load_condition(path, X)
    assert c2.ell == 1
    with pytest.raises(ConfigError):
        condition_from_json({"kind": "nonsense"}, X)
    with pytest.raises(ConfigError):
        condition_from_json({"kind": "conic", "Y": [[1, 0, 0]]}, X)


def test_multiple_quotients_local_probability():
    P2 = projective_space(2, F2)
    a = constant_condition(P2, [[1, 0]])
    b = constant_condition(P2, [[0, 1]])
    cond = TaylorCondition((a, b))
    x = closed_point([1, 0, 0], F2)
    # value != 0 (1/2) or both gradient coordinates nonzero (1/4 of the rest)
    assert cond.local_probability(x) == Fraction(1, 2) + Fraction(1, 8)

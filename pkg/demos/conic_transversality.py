"""
Curves transverse to a family of conics
=======================================

Fix four points Y in general position.  Through Y and any x on the punctured
line U there is a unique smooth conic C_x, and asking a plane curve to meet
C_x transversely at x is a rank-1 Taylor condition.  Its density is
zeta_U(2)^{-1}.
"""

from taylorsieve.geom import closed_form_zeta_inverse, closed_point, closed_points
from taylorsieve.gf import field_create
from taylorsieve.mpoly import format_poly
from taylorsieve.sieve import (build_evaluation_map, exact_low_probability,
                               exhaustive_probability, monte_carlo_probability)
from taylorsieve.taylor import (CONIC_Y, TaylorCondition, conic_condition, conic_family,
                                conic_tangent_quotient, conic_through)

F5 = field_create(5)
Y, U = conic_family(F5)
print("removed from L:", [z.rep for z in U.excluded])

x = closed_point([0, 1, 2], F5)
C = conic_through(CONIC_Y, x)
print("C_x =", format_poly(C.poly), " det(gram) =", C.gram_det())
print("tangent direction at x:", conic_tangent_quotient(C, x).matrix[0])

# Degree-2 points of U get their conic over GF(25).
x2 = next(p for p in closed_points(U, 2) if p.degree == 2)
print("a degree-2 point:", x2.rep, "->", format_poly(conic_through(CONIC_Y, x2).poly))

cond = TaylorCondition((conic_condition(Y, U),))
for d in range(0, 4):
    ex = exact_low_probability(build_evaluation_map(cond, d, 2))
    brute = exhaustive_probability(cond, d, 1)
    print(f"d={d}: exact {ex.probability} (surjective {ex.surjective}), exhaustive {brute.probability}")

mc = monte_carlo_probability(cond, 10, 2, 20_000, seed=3)
print(f"d=10 with points of degree <= 2: {mc.estimate:.4f} +- {mc.stderr:.4f}")
print(f"zeta_U(2)^-1 = {closed_form_zeta_inverse(U, 2)} = {float(closed_form_zeta_inverse(U, 2)):.4f}")

"""
A Taylor condition with no solutions
====================================

List every section f_1, f_2, ... of every degree and every closed point
x_1, x_2, ... of P^2.  At x_i forbid exactly the 1-jet of f_i.  Each local
condition is almost always satisfied, and their product is close to
zeta(3)^{-1} = 21/64, yet no section satisfies all of them.
"""

from taylorsieve.sieve import diagonal_counterexample

rep = diagonal_counterexample(2, 2, 4, E=8)
print(f"{rep.sections} sections of degree <= 4 paired with closed points up to degree "
      f"{rep.max_point_degree}")
for d, empty in rep.empty.items():
    print(f"P_{d} empty: {empty}")
print(f"product of local probabilities over degree <= 8: {float(rep.local_product):.6f}")
print(f"zeta_P2(3)^-1 = {rep.limit} = {float(rep.limit):.6f}")

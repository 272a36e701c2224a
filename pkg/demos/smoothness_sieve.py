"""
Smooth plane curves over GF(2)
==============================

For P^2 over GF(2) the smoothness condition at a closed point x fails with
probability 2^{-3 deg x}.  Once the evaluation map onto the fibers at the
seven rational points is surjective, the probability of smoothness at those
points is exactly (7/8)^7.
"""

from fractions import Fraction

from taylorsieve.geom import projective_space
from taylorsieve.gf import field_create
from taylorsieve.sieve import (build_evaluation_map, exact_low_probability,
                               exhaustive_probability, monte_carlo_probability,
                               stability_threshold, surjectivity_table)
from taylorsieve.taylor import TaylorCondition, smoothness_condition

F2 = field_create(2)
cond = TaylorCondition((smoothness_condition(projective_space(2, F2)),))

# Rank of S_d -> (fibers at the 7 rational points), 21-dimensional target.
table = surjectivity_table(cond, 2, range(0, 8))
for d, rank, dim, surj in table:
    print(f"d={d}: rank {rank:2d} / {dim}{'  surjective' if surj else ''}")
d0 = stability_threshold(table)
print("stability threshold:", d0)

# Exact linear algebra and brute force agree at every d, not only past d0.
for d in range(0, d0 + 1):
    exact = exact_low_probability(build_evaluation_map(cond, d, 2)).probability
    brute = exhaustive_probability(cond, d, 1).probability
    print(f"d={d}: exact {exact}  exhaustive {brute}")
print("(7/8)^7 =", Fraction(7, 8) ** 7)

# Adding the 7 + 22 points of degree 2 and 3 and checking every f in S_d.
# The target is the E=3 truncation of zeta(3)^{-1}, not 21/64 itself.
for d in range(2, 6):
    rep = exhaustive_probability(cond, d, 3, e=2)
    print(f"d={d}: {float(rep.probability):.5f}  first failures {rep.band_failures}")

# Monte Carlo is reproducible from its seed.
mc = monte_carlo_probability(cond, 8, 2, 50_000, seed=1)
print(f"d=8, E=2: {mc.estimate:.4f} +- {mc.stderr:.4f}  ({mc.rng_algorithm}, seed {mc.rng_seed})")

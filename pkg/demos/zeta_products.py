"""
Truncated zeta products of a line and a punctured line
======================================================

The density of sections satisfying a rank-l Taylor condition on X is the
inverse zeta value zeta_X(l+1)^{-1}.  This script watches the Euler product
converge for the line L = {x0 = 0} and for U, the line with four points removed.
"""

from taylorsieve.geom import Subscheme, closed_form_zeta_inverse, zeta_inverse_truncated
from taylorsieve.gf import field_create
from taylorsieve.mpoly import parse
from taylorsieve.taylor import conic_family

# The line at infinity over GF(2).  Its closed points are counted by Moebius
# inversion of 2^r + 1, and the product over them tends to 3/8.
F2 = field_create(2)
L = Subscheme(2, F2, equations=(parse("x0", 3, F2),), dim=1, name="L")
ztr = zeta_inverse_truncated(L, 2, 14)
for r, c, partial in ztr.per_degree:
    print(f"deg {r:2d}: {c:5d} closed points, partial product {float(partial):.8f}")
print("limit:", closed_form_zeta_inverse(L, 2))

# Over GF(3) every rational point of L lies on a line through two of the
# four base points, so U has no rational points at all.
F3 = field_create(3)
_, U = conic_family(F3)
ztr = zeta_inverse_truncated(U, 2, 12)
print("U over GF(3), first counts:", [c for _, c, _ in ztr.per_degree[:4]])
print(f"E=12: {float(ztr.value):.10f}  closed form: {closed_form_zeta_inverse(U, 2)}")
print(f"tail bound {ztr.tail_bound:.2e}")

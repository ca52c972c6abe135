"""
L-functions by point counting
=============================

Count points fiber by fiber, assemble L(E, t), and compare the completed
(half counted) polynomial with the fully counted one.
"""

import numpy as np

from ffmanin.curve import WeierstrassCurve, global_reduction
from ffmanin.ff import build_field
from ffmanin.lfun import EulerData, lfunction, log_derivative_check

F = build_field(7, 1)
E = WeierstrassCurve.from_string(F, "0;0;0;T^2;T^3+1")
print("conductor degree:", global_reduction(E).deg_conductor)

data = EulerData(E)
full = lfunction(E, "full", data=data)
half = lfunction(E, "completed", data=data)
print("full      :", full.coefficients)
print("completed :", half.coefficients, half.provenance)

# Reciprocal roots all have absolute value q.
roots = 1 / np.roots(np.array(full.coefficients[::-1], dtype=float))
print("|roots|   :", np.round(np.abs(roots), 8))
print("slopes    :", [str(s) for s in full.slopes()], " l_q =", full.l_q())

# An independent sum over every fiber of P^1(F_{q^k}) reproduces the power sums.
print("fiber-sum residuals k=1..3:", [log_derivative_check(E, k, data) for k in (1, 2, 3)])

# Over F_13 the completed mode needs places up to degree 5 only.
E12 = WeierstrassCurve.from_string(build_field(13, 1), "1;0;0;0;-T^12")
L12 = lfunction(E12, "completed")
print("E_12 over F_13:", L12.coefficients)
print("counted through t^%d, l_q = %s" % (L12.counted_through(), L12.l_q()))

"""
Newton polygons and bound formulas
==================================

The minimum of v_q(P(zeta/q)) over roots of unity zeta, the discriminant and
conductor bounds, and the modular-degree formulas.
"""

from ffmanin.ff import build_field
from ffmanin.jacobi import ulmer_curve
from ffmanin.manin import degree_bounds, pesenti_szpiro_check, upper_thm13
from ffmanin.padic import ValuedPoly, newton_polygon, sample_min_valuation

# P = (1 - 7t)^2 (1 + 7t): P(1/7) = P(-1/7) = 0, so the schedule moves on to m = 3.
P = ValuedPoly([1, -7, -49, 343], 7)
res = sample_min_valuation(P)
print("slopes", [str(s) for s in newton_polygon(P).slopes()], "formula", res.formula,
      "observed", res.observed_min, "at m =", res.attained_at, "exact zeros at", res.exact_zeros)

P = ValuedPoly([3, 10, 0, 125], 5)
res = sample_min_valuation(P)
print("slopes", [str(s) for s in newton_polygon(P).slopes()], "formula", res.formula,
      "observed", res.observed_min)

# The conductor-based bound is much weaker than the discriminant-based one.
for n in (6, 12):
    E = ulmer_curve(build_field(13, 1), n)
    ps = pesenti_szpiro_check(E)
    print(f"n={n}: deg Delta {ps.deg_delta} <= {ps.bound}; conductor bound {ps.conductor_bound_raw} "
          f"vs discriminant bound {upper_thm13(E)}")

# Modular-degree bounds are formula evaluations only.
r = degree_bounds(2, 0, 1, 5)
print(r.to_json())

"""
Twisting by Dirichlet characters
================================

A quadratic character twists L(E, t) exactly as the quadratic twist of the
curve does. Higher-order twists feed the lower bound for the Manin constant.
"""

from ffmanin.curve import WeierstrassCurve, global_reduction, quadratic_twist
from ffmanin.ff import build_field
from ffmanin.funcfield import dirichlet_lfunction, gauss_valuation_prediction, parse_character
from ffmanin.lfun import lfunction, twisted_lfunction
from ffmanin.manin import character_family, epsilon_valuation, manin_bounds
from ffmanin.poly import parse_poly

F = build_field(5, 1)
E = WeierstrassCurve.from_string(F, "1;0;0;0;-T^4")

chi = parse_character(F, "mod=T^2+2;order=2")
Lt = twisted_lfunction(E, chi)
Lq = lfunction(quadratic_twist(E, parse_poly(F, "T^2+2")), "full")
print("twisted L      :", [c.as_int() for c in Lt.coefficients])
print("twisted curve L:", Lq.coefficients)

# The leading coefficient of the Dirichlet L-function has the valuation
# predicted by Stickelberger's theorem on each residue field.
for chi in character_family(F, 3, [2, 4])[::30]:
    L = dirichlet_lfunction(chi)
    print(f"{chi.describe():40s} degree {L.degree}  v(eps) = {epsilon_valuation(chi)}  "
          f"predicted {gauss_valuation_prediction(chi)}")

# y^2 + xy = x^3 - T^9 over F_5: the trivial character gives nothing, but a
# quadratic twist reaches the upper bound.
E9 = WeierstrassCurve.from_string(F, "1;0;0;0;-T^9")
bad = [r.place for r in global_reduction(E9).bad()]
chars = character_family(F, 2, [2], avoid=bad, limit=4)
B = manin_bounds(E9, chars)
for w in B.witnesses:
    print(f"  {w.character:36s} contribution {w.contribution}")
print("m(E) in [%s, %s], exact = %s" % (B.lower, B.upper, B.exact))

"""
The Ulmer curves y^2 + xy = x^3 - T^n
======================================

Reduction data, Jacobi-sum slopes and the resulting interval for the Manin
constant, for a few primes and exponents.
"""

from ffmanin.jacobi import ulmer_report

# When n divides q - 1 and 6 | n the two bounds meet and m(E_n) = n/6 - 1.
for p, n in [(7, 6), (13, 6), (13, 12), (37, 36)]:
    r = ulmer_report(p, 1, n)
    print(f"p={p:2d} n={n:2d}  deg Delta={r.deg_delta:3d}  deg n={r.deg_conductor:3d}  "
          f"l_q={r.h2.l_q()}  m in [{r.lower_bound}, {r.upper_bound}]  exact={r.manin_exact}")

# Away from those exponents the interval need not close, and the place at
# infinity is additive, so the conductor grows by 2.
for p, n in [(11, 9), (5, 12), (7, 4)]:
    r = ulmer_report(p, 1, n)
    print(f"p={p:2d} n={n:2d}  deg n={r.deg_conductor}  m in [{r.lower_bound}, {r.upper_bound}]")

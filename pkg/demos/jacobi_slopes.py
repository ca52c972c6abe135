"""
Jacobi sums and slopes
======================

The H^2 slopes of the Ulmer curves come from Jacobi sums on a Fermat
quotient. Stickelberger's digit sums give the valuations; summing the
characters directly confirms them.
"""

from ffmanin.jacobi import h2_polynomial, inverse_pair_check

H = h2_polynomial(13, 1, 12, exact=True)
for row in H.rows():
    print(row)
print("slopes:", [str(s) for s in H.slopes()], " l_q =", H.l_q(), " symmetric:", H.is_symmetric())

# Orbits of length 2 appear when q has order 2 modulo n.
H = h2_polynomial(5, 1, 12)
print("p=5 n=12 orbit lengths:", [v.orbit.u for v in H.values], " l_q =", H.l_q())

# J(chi, chi^-1) = -chi(-1)
print("inverse pairs:", all(inverse_pair_check(13, k, 12) for k in range(1, 12)))

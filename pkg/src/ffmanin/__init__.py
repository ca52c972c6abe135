"""Manin constants of elliptic curves over F_q(T): L-functions, slopes and bounds."""

__version__ = "0.1.0"

from .ff import FieldTable, PadicRing, PadicScalar, build_field, teichmuller  # noqa: E402
from .poly import Poly, RatFunc, factor, parse_poly, parse_ratfunc  # noqa: E402
from .curve import (WeierstrassCurve, descend_fully, frobenius_descent, frobenius_twist,  # noqa: E402
                    global_reduction, local_reduction, quadratic_twist)
from .funcfield import (DirichletCharacter, Divisor, Place, dirichlet_lfunction,  # noqa: E402
                        enumerate_places, parse_character)
from .padic import ValuedPoly, l_q, newton_polygon, sample_min_valuation  # noqa: E402
from .lfun import (EulerCache, EulerData, LPolynomial, fourier_coefficient, g_factor,  # noqa: E402
                   lfunction, twisted_lfunction)
from .jacobi import h2_polynomial, jacobi_exact, jacobi_valuation, orbit_list, ulmer_report  # noqa: E402
from .manin import (degree_bounds, lower_prop45, manin_bounds, ordinary_check,  # noqa: E402
                    pesenti_szpiro_check, upper_thm13)

"""Symbolic variational calculus on jets of paths R^{r|s} -> M.

Exact graded-commutative polynomials over Q, total derivatives and the
Euler-Lagrange operator, the variational differential, the horizontal and
vertical differentials on forms, evolutionary vector fields, covariant
Lagrangians, and a floating-point layer for curvature densities.
"""

from .graded import Gen, GradedPoly, ParityError
from .jets import Signature, SignatureError, JetCoord, enumerate_coords, count_coords
from .variational import Lagrangian, dbar, euler, total_derivative
from .bicomplex import (IntegralForm, JetForm, chi, horizontal_D, integral_D, integral_delta,
                        kappa, rho, rho_integral, vertical_delta)
from .evolutionary import EvolutionaryField, apply, interior, jacobi, lie_on_forms, prolong
from .covariant import (ConstantForm, check_covariance, check_covariance_basis, compose,
                        exterior_d, lagrangian_of_form, lie_vs_euler)
from .parser import ParseError, parse, parse_integral, render

__version__ = "0.1.0"

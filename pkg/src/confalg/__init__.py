"""Exact arithmetic for conformal algebras over ``H = Q[D]``.

The modules build on each other: :mod:`exactmath` (polynomials and number
fields), :mod:`hlinalg` (linear algebra over ``Q[D]``), :mod:`confcore`
(tables, products, axiom checks), :mod:`representations` (modules and
kernels), :mod:`builtins` (standard algebras and ``Cend_n``) and
:mod:`constructions` (faithful representation builders).
"""

from .errors import (BasisError, ConfAlgError, ContextError, DimensionError, FormatError, MembershipError,
                     PreconditionError, WellDefinednessError)
from .exactmath import ExtFieldElem, FieldContext, MultiPoly, parse_poly, poly
from .confcore import (CheckReport, ConfAlgebra, ConfElement, LambdaElem, braced_lambda, braced_product,
                       check_associativity, check_axioms, check_lie, derived_series, element, find_unit,
                       growth_profile, lambda_product, locality, n_product)
from .representations import (ConfRep, HModulePresentation, act, check_rep, is_faithful, make_rep, regular_rep,
                              rep_kernel, restrict_scalars)
from .constructions import (CentralElement, Pairing, adjoin_unit_rep, canonical_pairing, central_action,
                            central_pbw_rep, check_central_pbw, check_double_conditions, double_rep,
                            solvable_bounds, solvable_faithful_rep)

__version__ = "0.1.0"

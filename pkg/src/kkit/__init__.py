"""kkit: certified solving for restricted exponential polynomial systems.

Exact rational texp-polynomials, dyadic interval enclosures of texp and
its finite extension Exp, Krawczyk certificates for regular zeros
(Khovanskii points), quantifier-free formula normalization, verified
system rewrites, and a deterministic branch-and-prune solver.
"""

from .dyadic import Dyadic, Interval, interval_arith
from .enclose import Box, Shape, exp_fin_enclosure, texp_enclosure
from .algebra import (DependenceRelation, ExpMonomial, ExpPolynomial,
                      KhovanskiiSystem, evaluate, formal_partial,
                      integer_dependence, jacobian, polynomial_text)
from .certify import (Budget, Certificate, CertifyFailure, JacobianEnclosure,
                      certificate_from_json, certificate_to_json,
                      certify_regular_zero, check_certificate,
                      interval_eval_system, interval_jacobian, krawczyk,
                      system_text)
from .formula import (Disjunct, ExistentialSystem, atoms_to_equations, flatten,
                      formula_text, normalize_complexity, parse,
                      parse_system_text)
from .reduce import (GenExpMonomial, GenExpPolynomial, ReducedSystem,
                     eliminate_dependence, regularize_augment, witness_slice)
from .search import (FormulaReport, SatReport, SearchConfig, SolveReport,
                     solve_disjunct, solve_formula, solve_square)

__version__ = "0.1.0"

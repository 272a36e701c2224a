"""Taylor conditions on hypersurface sections over finite fields.

Finite fields (:mod:`gf`), polynomials and jets (:mod:`mpoly`), closed
points and zeta products (:mod:`geom`), fiberwise Taylor conditions
(:mod:`taylor`) and the probability engines (:mod:`sieve`).
"""

from .errors import (BudgetExceeded, ConfigError, FieldMismatch, ParseError,
                     PreconditionError, TaylorSieveError)
from .gf import FieldCtx, FqElem, build_embedding, field_create, format_element, parse_element
from .mpoly import Jet, MPoly, format_poly, jet_at, parse
from .geom import (ClosedPoint, ProjPoint, Subscheme, closed_point, closed_points,
                   closed_point_counts_moebius, closed_point_counts_orbits, count_points,
                   enumerate_points, load_scheme, projective_space, zeta_inverse_truncated)
from .taylor import (JetAllowedSet, QuotientAtPoint, QuotientNonvanishing, RestrictionToZ,
                     TaylorCondition, conic_condition, conic_family, conic_tangent_quotient,
                     conic_through, eval_jet_condition, eval_quotient_condition,
                     restrict_to_Z, smoothness_condition, smoothness_quotient, taylor1_fiber)
from .sieve import (EvaluationMap, SieveReport, band_decomposition, build_evaluation_map,
                    diagonal_counterexample, exact_low_probability, exhaustive_probability,
                    monte_carlo_probability, predicted_density, predicted_probability,
                    surjectivity_table)

__version__ = "0.1.0"

"""Exact-arithmetic toolkit for matrix-presented differential modules
over p-adic power-series rings: solution spaces, log-growth and Frobenius
slope filtrations, Newton polygons, and the comparison checks between the
special and generic fibers."""

from .analysis import (CheckReport, FiltrationReport, GrowthEstimate,
                       NewtonPolygon, PbqVerdict, b_nabla,
                       frobenius_slopes_generic, frobenius_slopes_special,
                       gap_check, generic_log_growth_module_filtration,
                       growth_filtration_generic, growth_filtration_special,
                       newton_polygon, np_compare, pbq_test,
                       semicontinuity_check, triangular_slopes_oracle,
                       verify_ct)
from .dsl import (format_value, parse_expression, parse_module_document,
                  parse_scalar)
from .errors import (DenominatorBlowup, DivisionByZero, EmptySeries,
                     FieldMismatch, FormMismatch, FrobeniusMatrixNotConstant,
                     IllegalExponent, InsufficientSupport,
                     NegativeExponentOverflow, NonConvergent,
                     NonPolynomialEntry, NotAFrobeniusLift,
                     NotNilpotentResidue, PadicGrowthError, ParseError,
                     RelationNotSatisfied, ResidueObstruction, SingularA,
                     SingularMatrix, SubspaceNotStable, UnstableReduction,
                     ValidationFailed, WidthMismatch, ZeroTwist)
from .growth import (exact_growth_via_eigenrelation, measure_log_growth,
                     measure_series_growth, snap_rational, upper_convex_hull)
from .modules import (GenericPresentation, ModulePresentation,
                      ValidationReport, direct_sum, dual, pushforward,
                      tensor, to_generic, twist)
from .scalars import FieldConfig, Scalar, factorial_valuation
from .series import (GenericCoefficient, TruncatedLogSeries, TruncatedSeries)
from .solvers import (GenericExpansion, SolutionPackage, solve_generic,
                      solve_special, verify_package)

__version__ = "0.1.0"

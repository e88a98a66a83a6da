"""Polynomial meshes on arcwise sections of disk, sphere, ball and torus."""

from .certify import (CertificationReport, certify, certify_mesh_constant,
                      lp_point_constant, random_ratio_test,
                      univariate_inequality_suite)
from .errors import (DeterminingSetError, DomainError, ExtractionError,
                     InvalidAngleError, InvalidFactorError, InvalidIntervalError,
                     NormeshError, NumericalError, ParameterError, ScalingError,
                     UnsupportedKindError)
from .mesh import (Mesh, alpha, beta, build_mesh, cardinality_bound, mesh_constants,
                   node_degree)
from .nodes1d import (AngularInterval, Family, Interval, chebyshev_lobatto,
                      chebyshev_zeros, psi_map, subperiodic_angles)
from .polyspace import (DimensionInfo, LSFit, TotalDegreeBasis, approx_fekete,
                        ls_operator_norm, ls_projection, numeric_dimension, vandermonde)
from .sections import (SectionSpec, evaluate_map, inequality_slack, make_section,
                       membership_residual, signature)

__version__ = "0.1.0"

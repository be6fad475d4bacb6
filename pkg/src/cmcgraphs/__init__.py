"""Invariant constant-mean-curvature surfaces of M^2(c) x R and their sharp estimates."""
from .errors import (
    AccuracyError,
    CMCError,
    DomainError,
    InvalidInputError,
    NoSolutionError,
    SingularParametrizationError,
    StepSizeUnderflowError,
)
from .estimates import (
    EstimateParams,
    alpha_max,
    convexity_height_caps,
    distance_lower_bound,
    g_value,
    kappa_lower_general,
    kappa_lower_height,
    zeta,
)
from .modelspace import AmbientPoint, SpaceForm, curve_geodesic_curvature, geodesic_distance
from .numerics import OdeSolution, OdeSystem, integrate_ivp, quad_singular
from .profiles import (
    Family,
    ProfileCurve,
    ProfileFamily,
    boundary_kappa,
    make_profile,
    max_height,
    parabolic_obstruction,
    profile,
    sample_surface,
    torus_height_argmax,
)

__version__ = "0.1.0"

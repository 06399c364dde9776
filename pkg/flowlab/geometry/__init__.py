from .background import AnalyticBackground, BackgroundSnapshot, BackgroundValues, background_eval, direction_sign, \
    BACKGROUND_KINDS, FLOW_DIRECTIONS
from .base import MetricField, riemann_from_scalar
from .curve import CurveState, CurveFrame, curve_frame, geodesic_curvature, curve_integral, midpoint_refine, \
    resample_uniform
from .field import ScalarField, GridScalarField, AnalyticScalarField, constant_field
from .torus import ConformalTorus, conformal_scalar_curvature, conformal_scalar_curvature_exact, \
    conformal_christoffel, laplace_beltrami, periodic_interpolate

from . import families
from .algebra import relative_residual, harnack_quadratic, hessian_laplacian_commutator, ricci_flow_rhs
from .calculus import christoffel, riemann, covariant_derivatives, metric_values, RiemannValues
from .evolution import check_flow_evolutions, check_H_evolution, FlowEvolutionResiduals, HEvolutionResult, \
    default_probe_points, H_MODES
from .grid import GridGeometry, select_nodes, central_difference
from .identities import check_commutation, check_bianchi, check_hessian_laplacian_interchange, \
    check_curvature_symmetries, check_two_dimensional_curvature, BianchiResiduals
from .metric import AnalyticMetricDim, AnalyticField, TensorValue, random_trig_metric, random_trig_scalar, \
    random_trig_covector, random_trig_two_form, conformal_trig_metric, conformal_factor
from .suite import IdentityRecord, run_identity_suite, h_evolution_records, threshold_of, CHECK_NAMES, \
    LEDGER_CHECKS, H_CHECKS

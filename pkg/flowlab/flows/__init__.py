from .config import AmbientFlowConfig, K_MODES, potential_sign
from .curve import curve_flow_run
from .heat import conjugate_heat_solve, attach_exact_u, terminal_bump
from .ricci import ricci_flow_run, sphere_family, exact_family
from .trajectory import Snapshot, FlowTrajectory, CurveTrajectory

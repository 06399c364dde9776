"""
Overview:
    Numeric defaults shared by the flows, the monitor and the command line.
"""

#: Stability constant ``c`` of the explicit bound ``dt <= c * h^2 * exp(2 * min(phi))``.
STABILITY_C = 0.2

#: Runs stop at ``tau >= TAU_MIN``, quantities are singular at ``t = T``.
TAU_MIN = 1e-3

#: Ricci flow runs fail with ``BlowUp`` once ``max|phi|`` exceeds this value.
BLOWUP_PHI = 10.0

#: Ricci flow runs fail with ``Instability`` once a single step changes ``phi`` by more than this.
INSTABILITY_JUMP = 1.0

#: ``eps_edge = EPS_EDGE_FACTOR * mean edge length`` at curve initialization.
EPS_EDGE_FACTOR = 1e-3

#: Curve step bound ``dt_curve <= CURVE_DT_FACTOR * (min edge length)^2``.
CURVE_DT_FACTOR = 0.2

#: Curves collapse once their total length drops below ``COLLAPSE_FACTOR * eps_edge``.
COLLAPSE_FACTOR = 10.0

#: Amplitude ``eps`` of the random trigonometric metric ensemble ``g = delta + eps * S``.
RANDOM_METRIC_EPS = 0.1

#: Smallest admissible eigenvalue of a probed metric.
EIGENVALUE_FLOOR = 1e-8

#: Below this scale, relative residuals fall back to absolute differences.
RESIDUAL_FLOOR = 1e-10

#: Default amplitude of the terminal bump ``u_T = 1 + a cos x``.
TERMINAL_BUMP_AMPLITUDE = 0.5

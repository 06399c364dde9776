from .cli import cli, EXIT_OK, EXIT_FAILURE, EXIT_VALIDATION, EXIT_NUMERICAL
from .report import emit_report, records_frame, summarize, report_kind, REPORT_COLUMNS
from .scenario import ScenarioConfig, ScenarioResult, run_scenario, build_ambient, build_curve, build_bundle, \
    soliton_samples, initial_conformal_factor, SCENARIOS

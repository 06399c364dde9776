import sys
from typing import Optional

import click
from ditk import logging

from .scenario import ScenarioConfig, run_scenario
from ..config.meta import __TITLE__, __VERSION__
from ..utils.error import ValidationError, NumericalFailure, FlowlabError

GLOBAL_CONTEXT_SETTINGS = dict(
    help_option_names=['-h', '--help']
)

#: Exit codes of the command line.
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _exit_code_of(err: FlowlabError) -> int:
    if isinstance(err, ValidationError):
        return EXIT_VALIDATION
    elif isinstance(err, NumericalFailure):
        return EXIT_NUMERICAL
    else:
        return EXIT_FAILURE


def _run(scenario: str, config: Optional[str], out: Optional[str], seed: Optional[int], verbose: bool):
    logging.try_init_root(logging.DEBUG if verbose else logging.INFO)
    try:
        cfg = ScenarioConfig.from_json(config) if config else ScenarioConfig(scenario=scenario)
        if cfg.scenario != scenario:
            cfg = cfg.with_(scenario=scenario)
        if seed is not None:
            cfg = cfg.with_(seed=seed)
        result = run_scenario(cfg, out, silent=not verbose)
    except FlowlabError as err:
        logging.error(f'{type(err).__name__}: {err}')
        click.echo(f'{type(err).__name__}: {err}', err=True)
        sys.exit(_exit_code_of(err))
    else:
        click.echo(result.csv_path)
        click.echo(result.json_path)


def _scenario_command(name: str, help_text: str):
    @click.option('-c', '--config', 'config', type=click.Path(exists=True, dir_okay=False), default=None,
                  help='Scenario configuration, a flat JSON document.')
    @click.option('-o', '--out', 'out', type=click.Path(file_okay=False), default=None,
                  help='Report directory, the configured output by default.')
    @click.option('-s', '--seed', 'seed', type=click.IntRange(0, 2 ** 64 - 1), default=None,
                  help='Seed overriding the configured one.')
    @click.option('-v', '--verbose', 'verbose', is_flag=True, default=False,
                  help='Debug logging and progress bars.')
    def _command(config, out, seed, verbose):
        _run(name, config, out, seed, verbose)

    _command.__doc__ = help_text
    return cli.command(name, context_settings={**GLOBAL_CONTEXT_SETTINGS})(_command)


@click.group(context_settings={**GLOBAL_CONTEXT_SETTINGS})
@click.version_option(__VERSION__, '-V', '--version', prog_name=__TITLE__)
def cli():
    """
    Numerical laboratory for mean curvature flow inside (backward) Ricci flow ambients.
    """
    pass  # pragma: no cover


verify_identities = _scenario_command(
    'verify-identities', 'Check the tensor identities and the Harnack tensor evolutions.')
run_flow = _scenario_command(
    'run-flow', 'Run an ambient flow and check its evolution equations and mass.')
monotonicity = _scenario_command(
    'monotonicity', 'Audit the monotonicity balance along a curve flow.')
harnack = _scenario_command(
    'harnack', 'Sample the Harnack quadratics along a curve flow.')
solitons = _scenario_command(
    'solitons', 'Check the sign of the soliton trace terms on random samples.')

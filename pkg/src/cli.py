"""
mtm-lab command line: one verb per lab operation, each taking a JSON
experiment configuration. Exit status 0 means pass, 1 a tolerance or
numerical failure, 2 a configuration error.
"""

import json
import logging
import sys

import click

from config import Config
from src.services.errors import ConfigurationError, LabError
from src.services.harness import run_command
from src.services.io import load_config

logger = logging.getLogger(__name__)

VERBS = {
    'simulate': 'Evolve the initial data and write field snapshots.',
    'scatter': 'Compute reflection coefficients and the discrete spectrum.',
    'predict': 'Tabulate the leading-order radiation prediction.',
    'soliton': 'Evaluate the multi-soliton formula on the x window.',
    'reconstruct': 'Rebuild the fields from scattering data through the RHP solver.',
    'resolve': 'Predict the visible solitons and modified norming constants.',
    'report': 'Run the configured verification scenario and write summary.json.',
}


@click.group()
@click.option('--log-level', default=Config.LOG_LEVEL, show_default=True,
              type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False))
def cli(log_level):
    """Numerical lab for the massive Thirring model."""
    logging.basicConfig(level=log_level.upper(), format='%(levelname)s %(name)s: %(message)s')


def _register(summary, run_dir):
    from src.main import create_app
    from src.services.registry import record_run

    app = create_app()
    with app.app_context():
        record_run(summary, run_dir)


def _make_command(verb, help_text):
    @click.option('--config', 'config_path', required=True, type=click.Path(dir_okay=False),
                  help='Experiment configuration (JSON).')
    @click.option('--out', 'out_dir', default=None, type=click.Path(file_okay=False),
                  help='Output root; overrides output_dir from the configuration.')
    @click.option('--register', is_flag=True, help='Record the run in the lab database.')
    def command(config_path, out_dir, register):
        try:
            config = load_config(config_path)
            result, run_dir = run_command(verb, config, out_dir)
        except ConfigurationError as e:
            click.echo(f"configuration error: {e}", err=True)
            sys.exit(e.exit_code)
        except LabError as e:
            click.echo(f"{type(e).__name__}: {e}", err=True)
            sys.exit(e.exit_code)

        click.echo(run_dir)
        if verb == 'report':
            for c in result['checks']:
                mark = 'pass' if c['pass'] else 'FAIL'
                click.echo(f"  {c['name']}: {c['value']} {c['comparison']} {c['tolerance']} [{mark}]")
            if register:
                _register(result, run_dir)
        else:
            click.echo(json.dumps(result['metrics'], sort_keys=True))
        sys.exit(0 if result['pass'] else 1)

    command.__name__ = verb
    return cli.command(name=verb, help=help_text)(command)


for _verb, _help in VERBS.items():
    _make_command(_verb, _help)


if __name__ == '__main__':
    cli()

"""Run one experiment from the command line.

..  admonition:: Usage:

    ``$ torusflow solve --manifest configs/taylor_green_solve.json --out outputs/tg --reproducible``

    ``$ python torusflow/experiments/pipeline.py props --manifest configs/props.json``

Exit codes are 0 on success, 1 for numerical failures (divergence, failed checks) and 2 for usage or configuration
errors. Failures write ``error.json`` to the output directory.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from jsonschema import ValidationError

from torusflow.commons import variables as vs
from torusflow.commons.exceptions import ConfigError, TorusflowError
from torusflow.commons.miscellaneous import ROOT_LOGGER, get_torusflow_logger
from torusflow.experiments.config import RunManifest
from torusflow.experiments.experiments import run_experiment, write_error

logger = get_torusflow_logger(__name__)

# Argument parsing
parser = argparse.ArgumentParser(prog='torusflow', description='Spectral Navier-Stokes solves and certificates on the '
                                                               'n-torus')

parser.add_argument('experiment', choices=vs.EXPERIMENT_IDS, help='The experiment to run')

# Inputs and outputs
parser.add_argument('--manifest', type=Path, default=None,
                    help='The json run manifest, leave empty to run with the default manifest')
parser.add_argument('--out', type=Path, default=None,
                    help='The output directory, overrides the one of the manifest')

# Execution
parser.add_argument('--seed', type=int, default=None, help='Overrides the seed of the manifest')
parser.add_argument('--reproducible', action='store_true',
                    help='Forces a single thread and removes timings, so that outputs are byte-identical')
parser.add_argument('--threads', type=int, default=None, help='The number of worker threads')
parser.add_argument('--logging_level', type=str, default='INFO', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])


def load_manifest(args: argparse.Namespace) -> RunManifest:
    """The manifest of ``args.manifest`` (or the default one), with the command line overrides applied."""
    if args.manifest is None:
        manifest = RunManifest(experiment=args.experiment)
    else:
        try:
            manifest = RunManifest.from_json(args.manifest)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f'cannot read {args.manifest}: {e}', field='manifest') from e
    return manifest.with_overrides(experiment=args.experiment, output_dir=args.out, seed=args.seed,
                                   reproducible=args.reproducible, threads=args.threads)


def main(argv: Optional[List[str]] = None) -> int:
    args = parser.parse_args(argv)
    ROOT_LOGGER.setLevel(getattr(logging, args.logging_level))

    try:
        manifest = load_manifest(args)
    except (TorusflowError, ValidationError) as e:
        return write_error(args.out, e)

    return run_experiment(manifest)


if __name__ == '__main__':
    sys.exit(main())

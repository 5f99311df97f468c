"""This module handles run manifests, the json files describing one experiment run"""

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional

from torusflow.commons import variables as vs
from torusflow.commons.exceptions import ConfigError
from torusflow.commons.file_management import validate_against_schema, write_json
from torusflow.commons.miscellaneous import get_torusflow_logger
from torusflow.spectral.config import SolverConfig

logger = get_torusflow_logger(__name__)


@dataclass
class RunManifest:
    """This class holds everything needed to run an experiment"""

    # ================ WHAT TO RUN =====================================================================================
    experiment: str = 'solve'  # One of ``EXPERIMENT_IDS``
    config: SolverConfig = field(default_factory=SolverConfig)  # The solver configuration
    initial_data: Dict[str, Any] = field(default_factory=lambda: {'generator': 'taylor-green'})  # A generator spec or {'path': ...}
    options: Dict[str, Any] = field(default_factory=dict)  # Experiment-specific options, see ``experiments.py``

    # ================ WHERE AND HOW ===================================================================================
    output_dir: Optional[Path] = None  # Defaults to ``outputs/<experiment>`` in the working directory
    seed: int = 0  # Seed of every random generator of the run
    version: int = vs.MANIFEST_VERSION  # Manifest format version

    def __post_init__(self):
        if self.experiment not in vs.EXPERIMENT_IDS:
            raise ConfigError(f'unknown experiment {self.experiment!r}, expected one of {vs.EXPERIMENT_IDS}',
                              field='experiment')
        if self.seed < 0:
            raise ConfigError(f'seeds are unsigned, got {self.seed}', field='seed')
        if self.output_dir is None:
            self.output_dir = Path('outputs') / self.experiment
        self.output_dir = Path(self.output_dir)

    def with_overrides(self, experiment: Optional[str] = None, output_dir: Optional[Path] = None,
                       seed: Optional[int] = None, reproducible: bool = False,
                       threads: Optional[int] = None) -> 'RunManifest':
        """A copy of the manifest with command line values taking precedence."""
        config_changes = {}
        if reproducible:
            config_changes['reproducible'] = True
        if threads is not None:
            config_changes['threads'] = threads
        config = self.config.replace(**config_changes) if config_changes else self.config
        experiment = experiment or self.experiment
        if output_dir is None and experiment != self.experiment:
            output_dir = Path('outputs') / experiment
        return replace(self,
                       experiment=experiment,
                       config=config,
                       output_dir=Path(output_dir) if output_dir is not None else self.output_dir,
                       seed=self.seed if seed is None else seed)

    @classmethod
    def from_dict(cls, manifest: Dict[str, Any]) -> 'RunManifest':
        """Creates a manifest from a dictionary, validated against ``manifest.schema.json``.

        Raises:
            jsonschema.ValidationError: if the dictionary does not follow the schema.
            ConfigError: if the solver configuration is invalid.
        """
        validate_against_schema(manifest, vs.MANIFEST_SCHEMA_PATH)
        manifest = dict(manifest)
        manifest['config'] = SolverConfig.from_dict(manifest.get('config', {}))
        if manifest.get('output_dir') is not None:
            manifest['output_dir'] = Path(manifest['output_dir'])
        return cls(**manifest)

    @classmethod
    def from_json(cls, path: Path) -> 'RunManifest':
        """Loads a manifest from a json file"""
        return cls.from_dict(json.loads(Path(path).read_text(encoding='utf-8')))

    def to_dict(self) -> Dict[str, Any]:
        return {'version': self.version,
                'experiment': self.experiment,
                'config': self.config.to_dict(),
                'initial_data': self.initial_data,
                'options': self.options,
                'output_dir': str(self.output_dir),
                'seed': self.seed}

    def to_json(self, path: Path):
        """Saves the manifest to a json file"""
        write_json(path, self.to_dict())

"""This module handles the solver configuration"""

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict

from torusflow.commons import variables as vs
from torusflow.commons.exceptions import ConfigError
from torusflow.commons.file_management import write_json
from torusflow.commons.miscellaneous import get_torusflow_logger

logger = get_torusflow_logger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """This class holds the configuration of a spectral solve on the n-torus"""

    # ================ PROBLEM ==========================================================================================
    dim: int = 2  # Space dimension n >= 2
    trunc: int = 8  # Truncation N >= 1, the solver keeps modes with |k|_inf <= N
    viscosity: float = 1.  # Kinematic viscosity nu > 0
    smoothness: float = 2.  # Smoothness index s of the weighted norms, any real number

    # ================ TIME GRID =======================================================================================
    horizon: float = 1.  # Final time T > 0
    time_steps: int = 64  # Number M >= 2 of grid intervals, the grid has M + 1 nodes

    # ================ TOLERANCES ======================================================================================
    picard_tolerance: float = vs.PICARD_TOLERANCE  # Picard stops once the sup-grid l1 residual is below this value
    quadrature_tolerance: float = vs.QUADRATURE_TOLERANCE  # Accepted grid-doubling error of the Duhamel quadrature
    divergence_tolerance: float = vs.DIVERGENCE_TOLERANCE  # Relative l1 size of the divergence of a solenoidal state
    max_iterations: int = vs.MAX_PICARD_ITERATIONS  # Picard gives up (not converged) after this many sweeps

    # ================ EXECUTION =======================================================================================
    threads: int = 1  # Worker threads for per-node evaluations, results do not depend on it
    reproducible: bool = False  # Forces a single thread and removes timings from outputs

    def __post_init__(self):
        checks = [('dim', self.dim >= 2),
                  ('trunc', self.trunc >= 1),
                  ('viscosity', math.isfinite(self.viscosity) and self.viscosity > 0),
                  ('smoothness', math.isfinite(self.smoothness)),
                  ('horizon', math.isfinite(self.horizon) and self.horizon > 0),
                  ('time_steps', self.time_steps >= 2),
                  ('picard_tolerance', self.picard_tolerance > 0),
                  ('quadrature_tolerance', self.quadrature_tolerance > 0),
                  ('divergence_tolerance', self.divergence_tolerance > 0),
                  ('max_iterations', self.max_iterations >= 1),
                  ('threads', self.threads >= 1)]
        for name, ok in checks:
            if not ok:
                raise ConfigError(f'invalid value {getattr(self, name)!r}', field=name)
        if self.reproducible and self.threads != 1:
            object.__setattr__(self, 'threads', 1)

    @property
    def time_step(self) -> float:
        return self.horizon / self.time_steps

    def replace(self, **changes) -> 'SolverConfig':
        """A copy of the config with ``changes`` applied (and validated)."""
        return SolverConfig.from_dict({**self.to_dict(), **changes})

    @classmethod
    def from_dict(cls, config: Dict[str, Any]) -> 'SolverConfig':
        """Creates a config from a dictionary, rejecting unknown keys"""
        known = {f.name for f in fields(cls)}
        unknown = set(config) - known
        if unknown:
            raise ConfigError(f'unknown key(s) {sorted(unknown)}', field=sorted(unknown)[0])
        try:
            return cls(**config)
        except TypeError as e:
            raise ConfigError(str(e)) from e

    @classmethod
    def from_json(cls, path: Path) -> 'SolverConfig':
        """Loads a config from a json file"""
        return cls.from_dict(json.loads(Path(path).read_text(encoding='utf-8')))

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_json(self, path: Path):
        """Saves the config to a json file"""
        write_json(path, self.to_dict())

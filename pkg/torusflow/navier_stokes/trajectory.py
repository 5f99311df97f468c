"""Time-indexed sequences of velocity fields and the reports of the Picard iterations producing them."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from lazy_objects.lazy_objects import lazy_property

from torusflow.commons import variables as vs
from torusflow.commons.arithmetic import safe_divide
from torusflow.commons.exceptions import ShapeMismatchError
from torusflow.commons.file_management import read_json, write_json
from torusflow.commons.miscellaneous import get_torusflow_logger
from torusflow.spectral.config import SolverConfig
from torusflow.spectral.fields import SpectralField, get_grid, spatial_axes
from torusflow.spectral.serialization import read_field, write_field

logger = get_torusflow_logger(__name__)


def check_time_grid(times: np.ndarray) -> np.ndarray:
    """Validates a time grid ``0 = t_0 < t_1 < ... < t_M`` and returns it as a float array."""
    times = np.array(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValueError('A time grid needs at least two nodes')
    if times[0] != 0.:
        raise ValueError(f'Time grids start at t = 0, got t_0 = {times[0]}')
    if not np.all(np.diff(times) > 0):
        raise ValueError('Time grids must be strictly increasing')
    return times


@dataclass
class PicardReport:
    """Convergence history of a Picard iteration.

    ``residuals[i]`` is the sup-over-grid l1 distance between the iterates ``i`` and ``i + 1``.
    """

    tolerance: float  # The residual below which the iteration is deemed converged
    residuals: List[float] = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.residuals)

    @property
    def contraction_ratios(self) -> List[float]:
        return [safe_divide(later, earlier) for earlier, later in zip(self.residuals, self.residuals[1:])]

    @property
    def final_residual(self) -> float:
        return self.residuals[-1] if self.residuals else np.inf

    def to_dict(self) -> Dict[str, Any]:
        return {'iterations': self.iterations,
                'residuals': self.residuals,
                'contraction_ratios': self.contraction_ratios,
                'converged': self.converged,
                'tolerance': self.tolerance}


class Trajectory:
    """A velocity field per node of a time grid.

    The coefficients of all nodes are stored in a single read-only array of shape ``(M + 1, n, 2N+1, ..., 2N+1)``.
    """

    def __init__(self, config: SolverConfig, times: np.ndarray, coeffs: np.ndarray, real: bool = True):
        self.times = check_time_grid(times)
        self.times.flags.writeable = False
        coeffs = np.array(coeffs, dtype=np.complex128)
        expected = (self.times.size, config.dim) + get_grid(config.dim, config.trunc).shape
        if coeffs.shape != expected:
            raise ShapeMismatchError(f'Trajectory coefficients have shape {coeffs.shape}, expected {expected}')
        coeffs.flags.writeable = False
        self.coeffs = coeffs
        self.real = real
        self.config = config.replace(horizon=float(self.times[-1]), time_steps=self.times.size - 1)

    @classmethod
    def from_states(cls, config: SolverConfig, times: np.ndarray, states: List[SpectralField]) -> 'Trajectory':
        return cls(config, times, np.stack([s.coeffs for s in states]), real=all(s.real for s in states))

    def __len__(self):
        return self.times.size

    @property
    def dim(self) -> int:
        return self.config.dim

    @property
    def trunc(self) -> int:
        return self.config.trunc

    def state(self, i: int) -> SpectralField:
        return SpectralField(self.coeffs[i], real=self.real, check=False)

    @lazy_property
    def states(self) -> List[SpectralField]:
        return [self.state(i) for i in range(len(self))]

    @property
    def initial(self) -> SpectralField:
        return self.state(0)

    @property
    def final(self) -> SpectralField:
        return self.state(-1)

    # ================ INVARIANTS ======================================================================================
    @lazy_property
    def l1_norms(self) -> np.ndarray:
        return np.abs(self.coeffs).sum(axis=(1,) + spatial_axes(self.dim))

    @lazy_property
    def divergence_l1(self) -> np.ndarray:
        """``||div v(t_i)||_l1`` per node."""
        k = get_grid(self.dim, self.trunc).components
        return np.abs((1j * k * self.coeffs).sum(axis=1)).sum(axis=spatial_axes(self.dim))

    @lazy_property
    def mean_drift(self) -> float:
        """``max_i |v_0(t_i) - v_0(0)|`` over nodes and components."""
        origin = get_grid(self.dim, self.trunc).origin
        means = self.coeffs[(slice(None), slice(None)) + origin]
        return float(np.abs(means - means[0]).max())

    def is_solenoidal(self, tolerance: Optional[float] = None) -> bool:
        tolerance = self.config.divergence_tolerance if tolerance is None else tolerance
        return bool(np.all(self.divergence_l1 <= tolerance * self.l1_norms + np.finfo(float).tiny))

    def has_constant_mean(self, tolerance: float = vs.MEAN_DRIFT_TOLERANCE) -> bool:
        return self.mean_drift <= tolerance

    def distance(self, other: 'Trajectory') -> np.ndarray:
        """Per-node l1 distance to a trajectory on the same grid."""
        if other.coeffs.shape != self.coeffs.shape or not np.allclose(other.times, self.times, rtol=0, atol=1e-14):
            raise ShapeMismatchError('Trajectories live on different grids')
        return np.abs(self.coeffs - other.coeffs).sum(axis=(1,) + spatial_axes(self.dim))

    # ================ SERIALIZATION ===================================================================================
    def to_directory(self, path: Path, binary: bool = False):
        """Writes ``config.json``, ``times.json`` and one field file per node in ``fields/``."""
        path = Path(path)
        self.config.to_json(path / vs.TRAJ_CONFIG_FILENAME)
        write_json(path / vs.TRAJ_TIMES_FILENAME, [float(t) for t in self.times])
        suffix = '.bin' if binary else '.json'
        for i, state in enumerate(self.states):
            write_field(state, path / vs.TRAJ_FIELDS_DIRNAME / (vs.TRAJ_NODE_STEM.format(i) + suffix))

    @classmethod
    def from_directory(cls, path: Path) -> 'Trajectory':
        path = Path(path)
        config = SolverConfig.from_json(path / vs.TRAJ_CONFIG_FILENAME)
        times = np.array(read_json(path / vs.TRAJ_TIMES_FILENAME), dtype=float)
        states = []
        for i in range(times.size):
            stem = vs.TRAJ_NODE_STEM.format(i)
            candidates = sorted((path / vs.TRAJ_FIELDS_DIRNAME).glob(stem + '.*'))
            if not candidates:
                raise FileNotFoundError(f'Missing field file for node {i} in {path}')
            states.append(read_field(candidates[0]))
        return cls.from_states(config, times, states)

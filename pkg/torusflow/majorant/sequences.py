"""Nonnegative majorant sequences and the domination relation ``u << V``, i.e. ``|u_k| <= V_k`` for every mode.

Majorants live on the same cube ``|k|_inf <= N`` as the fields they dominate, so every statement made here concerns the
Galerkin-truncated system.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
from lazy_objects.lazy_objects import lazy_property

from torusflow.commons import variables as vs
from torusflow.commons.docstrings import docstring_formatter, docstrings
from torusflow.commons.exceptions import ShapeMismatchError
from torusflow.commons.miscellaneous import get_torusflow_logger
from torusflow.navier_stokes.trajectory import Trajectory, check_time_grid
from torusflow.spectral.convolution import ConvolutionMethod, convolve_arrays
from torusflow.spectral.fields import SpectralField, get_grid, spatial_axes
from torusflow.spectral.operators import lambda_multiplier

logger = get_torusflow_logger(__name__)


class MajorantSequence:
    """Nonnegative real coefficients ``V_k`` on the cube ``|k|_inf <= N`` of Z^n."""

    def __init__(self, coeffs: np.ndarray):
        coeffs = np.array(coeffs, dtype=float)
        if coeffs.ndim < 2 or any(s != coeffs.shape[0] for s in coeffs.shape) or coeffs.shape[0] % 2 == 0:
            raise ShapeMismatchError(f'A majorant needs a cube of odd side, got shape {coeffs.shape}')
        if not np.all(np.isfinite(coeffs)) or np.any(coeffs < 0):
            raise ValueError('Majorant coefficients must be finite and nonnegative')
        coeffs.flags.writeable = False
        self.coeffs = coeffs

    @classmethod
    def zeros(cls, dim: int, trunc: int) -> 'MajorantSequence':
        return cls(np.zeros(get_grid(dim, trunc).shape))

    @classmethod
    def from_modes(cls, dim: int, trunc: int, modes: Dict[vs.WavevectorType, float]) -> 'MajorantSequence':
        grid = get_grid(dim, trunc)
        coeffs = np.zeros(grid.shape)
        for k, value in modes.items():
            coeffs[grid.index(k)] = value
        return cls(coeffs)

    @property
    def dim(self) -> int:
        return self.coeffs.ndim

    @property
    def trunc(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def grid(self):
        return get_grid(self.dim, self.trunc)

    def coeff(self, k: vs.WavevectorType) -> float:
        return float(self.coeffs[self.grid.index(k)])

    def norm_hs(self, s: float) -> float:
        return float((self.coeffs * self.grid.weights ** s).sum())

    def scaled(self, factor: float) -> 'MajorantSequence':
        return MajorantSequence(self.coeffs * factor)

    def normalized(self, norm: float, s: float) -> 'MajorantSequence':
        """The multiple of this sequence whose ``||.||_s`` equals ``norm``."""
        current = self.norm_hs(s)
        if current == 0:
            raise ValueError('Cannot normalize the zero majorant')
        return self.scaled(norm / current)

    def __add__(self, other: 'MajorantSequence') -> 'MajorantSequence':
        return MajorantSequence(self.coeffs + other.coeffs)

    def __repr__(self):
        return f'MajorantSequence(dim={self.dim}, trunc={self.trunc})'


class MajorantTrajectory:
    """A ``MajorantSequence`` per node of a time grid, stored as one array of shape ``(M + 1, 2N+1, ..., 2N+1)``."""

    def __init__(self, times: np.ndarray, values: np.ndarray):
        self.times = check_time_grid(times)
        values = np.array(values, dtype=float)
        if values.shape[0] != self.times.size:
            raise ShapeMismatchError(f'{values.shape[0]} majorants for {self.times.size} grid nodes')
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError('Majorant coefficients must be finite and nonnegative')
        values.flags.writeable = False
        self.values = values

    def __len__(self):
        return self.times.size

    @property
    def dim(self) -> int:
        return self.values.ndim - 1

    @property
    def trunc(self) -> int:
        return (self.values.shape[-1] - 1) // 2

    def sequence(self, i: int) -> MajorantSequence:
        return MajorantSequence(self.values[i])

    @lazy_property
    def sup_coefficients(self) -> np.ndarray:
        """``max_k V_k(t_i)`` per node."""
        return self.values.reshape(len(self), -1).max(axis=1)

    def is_nondecreasing(self, rtol: float = 1e-12) -> bool:
        """Whether every coefficient is nondecreasing in time (up to ``rtol`` of the largest coefficient)."""
        slack = rtol * max(float(self.values.max(initial=0.)), np.finfo(float).tiny)
        return bool(np.all(np.diff(self.values, axis=0) >= -slack))

    def norms_hs(self, s: float) -> np.ndarray:
        weights = get_grid(self.dim, self.trunc).weights
        return (self.values * weights ** s).sum(axis=spatial_axes(self.dim))


def majorant_convolve(U: np.ndarray, V: np.ndarray, dim: int, method: ConvolutionMethod = 'auto') -> np.ndarray:
    """Galerkin product of nonnegative coefficient arrays, with transform roundoff clipped back to nonnegative reals.

    Leading axes broadcast, as in ``convolve_arrays``.
    """
    return np.clip(convolve_arrays(U, V, dim, method).real, 0., None)


def majorize_initial(v_hat: SpectralField) -> MajorantSequence:
    """The smallest common majorant of the components: ``V_k = max_m |v^m_k|``."""
    return MajorantSequence(np.abs(v_hat.coeffs).max(axis=0))


# ======================================================================================================================
#                                                 DOMINATION
# ======================================================================================================================

@dataclass
class DominationReport:
    """Outcome of a domination check, with the worst and the first violating modes."""

    dominated: bool
    violations: int  # Number of (node, component, mode) triplets exceeding their bound
    worst_excess: float  # max(|u_k| - bound_k), nonpositive when dominated
    worst_mode: Optional[vs.WavevectorType]
    worst_component: Optional[int]
    worst_node: Optional[int]
    first_violation: Optional[vs.WavevectorType]

    def __bool__(self):
        return self.dominated

    def to_dict(self) -> Dict[str, Any]:
        return {'dominated': self.dominated, 'violations': self.violations, 'worst_excess': self.worst_excess,
                'worst_mode': self.worst_mode, 'worst_component': self.worst_component, 'worst_node': self.worst_node,
                'first_violation': self.first_violation}


def _mode_of(flat_index: int, shape: tuple, trunc: int) -> Tuple[tuple, int, int]:
    index = np.unravel_index(flat_index, shape)
    node, component, spatial = index[0], index[1], index[2:]
    return tuple(int(i) - trunc for i in spatial), int(component), int(node)


def domination_margins(u: np.ndarray, bound: np.ndarray, rtol: float = vs.DOMINATION_RTOL,
                       atol: Optional[float] = None) -> np.ndarray:
    """``|u| - (1 + rtol) bound - atol`` elementwise; nonpositive entries are dominated.

    ``atol`` defaults to ``DOMINATION_ATOL`` times the largest bound, which absorbs transform roundoff.
    """
    if atol is None:
        atol = vs.DOMINATION_ATOL * float(np.max(bound, initial=0.))
    return np.abs(u) - (1. + rtol) * bound - atol


@docstring_formatter(**docstrings)
def dominates(u: Union[SpectralField, Trajectory, np.ndarray],
              V: Union[MajorantSequence, MajorantTrajectory],
              shift: Optional[Tuple[Optional[float], float]] = None,
              rtol: float = vs.DOMINATION_RTOL,
              atol: Optional[float] = None) -> DominationReport:
    """Checks ``u << V`` (optionally ``u << Lambda^t V``) for every mode and component.

    Args:
        u: A field against a ``MajorantSequence``; a ``Trajectory`` or an array of node coefficients of shape
            ``(M + 1, m, *spatial)`` against a ``MajorantTrajectory`` on the same grid.
        V: {majorant}
        shift: ``(t, nu)`` to compare against ``Lambda^t V``, whose mode ``k`` is damped by ``exp(-|k|_e t nu / 2)``.
            Against a trajectory, ``t`` is ignored and the time of each node is used.
        rtol: Relative slack on the bound.
        atol: Absolute slack, see ``domination_margins``.
    """
    if isinstance(V, MajorantSequence):
        if not isinstance(u, SpectralField):
            raise TypeError('A MajorantSequence dominates a SpectralField')
        values, times = V.coeffs[None], None
        coeffs = u.coeffs[None]
        if shift is not None:
            times = np.array([shift[0] or 0.])
    else:
        coeffs = u.coeffs if isinstance(u, Trajectory) else np.asarray(u)
        values, times = V.values, V.times
        if isinstance(u, Trajectory) and not np.allclose(u.times, V.times, rtol=0, atol=1e-14):
            raise ShapeMismatchError('The trajectory and its majorant live on different grids')

    dim = values.ndim - 1
    trunc = (values.shape[-1] - 1) // 2
    if coeffs.shape[0] != values.shape[0] or coeffs.shape[2:] != values.shape[1:]:
        raise ShapeMismatchError(f'Cannot compare coefficients of shape {coeffs.shape} with majorants of shape '
                                 f'{values.shape}')

    bound = values
    if shift is not None:
        nu = shift[1]
        grid = get_grid(dim, trunc)
        bound = np.stack([lambda_multiplier(grid, t, nu) for t in times]) * values

    margins = domination_margins(coeffs, bound[:, None], rtol, atol)
    violating = margins > 0
    worst = int(np.argmax(margins))
    worst_mode, worst_component, worst_node = _mode_of(worst, margins.shape, trunc)
    dominated = not violating.any()
    first_violation = None
    if not dominated:
        # Lexicographic order of the modes, over all nodes and components
        by_mode = violating.any(axis=(0, 1))
        first_violation = tuple(int(i) - trunc for i in np.unravel_index(int(np.argmax(by_mode.ravel())), by_mode.shape))
        logger.debug(f'Domination fails at {int(violating.sum())} entries, worst mode {worst_mode}')

    return DominationReport(dominated=dominated,
                            violations=int(violating.sum()),
                            worst_excess=float(margins.max()),
                            worst_mode=None if dominated else worst_mode,
                            worst_component=None if dominated else worst_component,
                            worst_node=None if dominated else worst_node,
                            first_violation=first_violation)

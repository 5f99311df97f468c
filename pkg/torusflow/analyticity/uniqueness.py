"""Analytic-norm distance between two solutions, in the form used by the uniqueness argument.

For ``t >= t_hat`` the gap ``||v1(t) - v2(t)||*_r`` at a radius ``r < r_tilde`` is compared with
``K = sup_{t >= t_hat} ||v1(t) - v2(t)||*_{r_tilde}``. Identical data give a gap at solver precision, nearby data a gap
proportional to the distance between the data, checked against a frozen multiple of that distance.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from torusflow.commons.arithmetic import safe_divide
from torusflow.commons import variables as vs
from torusflow.commons.docstrings import docstring_formatter, docstrings
from torusflow.commons.exceptions import ConfigError, ShapeMismatchError
from torusflow.commons.miscellaneous import get_torusflow_logger
from torusflow.analyticity.strip import strip_constant
from torusflow.navier_stokes.mild import picard_solve
from torusflow.navier_stokes.trajectory import Trajectory
from torusflow.spectral.config import SolverConfig
from torusflow.spectral.convolution import ConvolutionMethod
from torusflow.spectral.fields import SpectralField, get_grid, spatial_axes
from torusflow.spectral.operators import norm_analytic

logger = get_torusflow_logger(__name__)

JUMP_FACTOR = 10.  # Largest accepted ratio between the gaps at adjacent nodes


def analytic_gap_series(traj1: Trajectory, traj2: Trajectory, r: float) -> np.ndarray:
    """``||v1(t_i) - v2(t_i)||*_r`` at every node of two trajectories on the same grid."""
    if traj1.coeffs.shape != traj2.coeffs.shape or not np.allclose(traj1.times, traj2.times, rtol=0, atol=1e-14):
        raise ShapeMismatchError('Trajectories live on different grids')
    if r < 0:
        raise ValueError(f'The analytic radius must be nonnegative, got {r}')
    weights = np.exp(get_grid(traj1.dim, traj1.trunc).l1 * r)
    return (np.abs(traj1.coeffs - traj2.coeffs) * weights).sum(axis=(1,) + spatial_axes(traj1.dim))


def is_admissible(r_tilde: float, t_hat: float, nu: float, dim: int) -> bool:
    """``alpha r_tilde < t_hat`` with ``alpha = 3 / (nu c)``, ``c = 1 / sqrt(n)``."""
    return strip_constant(nu, dim) * r_tilde < t_hat


@dataclass
class UniquenessReport:
    """Gap series of two solutions after ``t_hat``, and the regression check on the gap."""

    r_tilde: float
    r: float
    t_hat: float
    delta: float  # Nominal distance between the data in ||.||*_{r_tilde}
    initial_gap: float  # ||v1_hat - v2_hat||*_{r_tilde}
    sup_gap: float  # K = sup_{t >= t_hat} ||v1 - v2||*_{r_tilde}
    grid_sup_gap: float  # sup over the whole grid of ||v1 - v2||*_{r_tilde}
    times: List[float]  # Nodes with t >= t_hat
    gaps: List[float]  # ||v1 - v2||*_r at these nodes
    ratios: List[float]  # gaps / K
    envelope_rate: float  # Smallest lambda with ratio <= exp(lambda (t - t_hat)) after t_hat
    lipschitz_constant: float  # sup_gap / initial_gap, nan for identical data
    check_time: float  # First node after t_hat + UNIQUENESS_CHECK_OFFSET, or the last node
    check_gap: float  # ||v1 - v2||*_{r_tilde} at check_time
    gap_bound: float  # UNIQUENESS_GAP_CONSTANT delta, or 2 picard_tolerance when delta = 0
    bounded: bool  # check_gap <= gap_bound, and grid_sup_gap <= gap_bound when delta = 0
    continuous: bool  # No jump by more than JUMP_FACTOR between adjacent nodes

    def to_dict(self) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}


def _is_continuous(gaps: np.ndarray) -> bool:
    floor = max(float(gaps.max(initial=0.)), np.finfo(float).tiny) * 1e-12
    gaps = np.maximum(gaps, floor)
    ratios = gaps[1:] / gaps[:-1]
    return bool(np.all((ratios <= JUMP_FACTOR) & (ratios >= 1. / JUMP_FACTOR)))


def gap_bound(delta: float, picard_tolerance: float) -> float:
    """The largest accepted gap after ``t_hat``: ``UNIQUENESS_GAP_CONSTANT delta``, or ``2 picard_tolerance`` for
    identical data."""
    return vs.UNIQUENESS_GAP_CONSTANT * delta if delta > 0 else 2. * picard_tolerance


@docstring_formatter(**docstrings)
def uniqueness_gap(v1_hat: SpectralField,
                   v2_hat: SpectralField,
                   r_tilde: float,
                   t_hat: float,
                   config: SolverConfig,
                   r: Optional[float] = None,
                   delta: float = vs.UNIQUENESS_DELTA,
                   method: ConvolutionMethod = 'fast') -> UniquenessReport:
    """Solves from both data and measures their analytic-norm gap after ``t_hat``.

    The gap at the first node after ``t_hat + UNIQUENESS_CHECK_OFFSET`` must stay below
    ``UNIQUENESS_GAP_CONSTANT delta``. With ``delta = 0`` the data are meant to be identical and the gap must stay
    below ``2 picard_tolerance`` on the whole grid.

    Args:
        v1_hat: The first initial velocity.
        v2_hat: The second initial velocity.
        r_tilde: The outer radius, with ``alpha r_tilde < t_hat``.
        t_hat: The time after which gaps are measured.
        config: {config}
        r: The inner radius, defaults to ``r_tilde / 2``.
        delta: The distance ``||v1_hat - v2_hat||*_r_tilde`` the data are meant to have.
        method: The convolution method.

    Raises:
        ConfigError: if ``alpha r_tilde >= t_hat``, ``delta < 0`` or no grid node lies after ``t_hat``.
        DivergedError: if one of the solves diverges.
    """
    if not is_admissible(r_tilde, t_hat, config.viscosity, config.dim):
        raise ConfigError(f'alpha r_tilde = {strip_constant(config.viscosity, config.dim) * r_tilde:.4g} must be below '
                          f't_hat = {t_hat}', field='r_tilde')
    r = r_tilde / 2. if r is None else r
    if not 0 <= r < r_tilde:
        raise ConfigError(f'the inner radius must lie in [0, r_tilde), got {r}', field='r')
    if delta < 0:
        raise ConfigError(f'the data distance must be nonnegative, got {delta}', field='delta')

    traj1, _ = picard_solve(v1_hat, config, method=method)
    traj2, _ = picard_solve(v2_hat, config, method=method)
    after = traj1.times >= t_hat
    if not after.any():
        raise ConfigError(f't_hat = {t_hat} lies beyond the horizon {config.horizon}', field='t_hat')

    outer_all = analytic_gap_series(traj1, traj2, r_tilde)
    outer = outer_all[after]
    inner = analytic_gap_series(traj1, traj2, r)[after]
    times = traj1.times[after]
    sup_gap = float(outer.max())
    ratios = inner / sup_gap if sup_gap > 0 else np.zeros_like(inner)

    elapsed = times - t_hat
    positive = (elapsed > 0) & (ratios > 0)
    envelope_rate = float((np.log(ratios[positive]) / elapsed[positive]).max()) if positive.any() else 0.
    initial_gap = norm_analytic(v1_hat - v2_hat, r_tilde)

    late = np.flatnonzero(times >= t_hat + vs.UNIQUENESS_CHECK_OFFSET - 1e-12)
    if late.size:
        check = int(late[0])
    else:
        check = times.size - 1
        logger.warning(f'No node after t_hat + {vs.UNIQUENESS_CHECK_OFFSET}, '
                       f'checking the gap at t = {times[check]:.4g}')
    bound = gap_bound(delta, config.picard_tolerance)
    bounded = bool(outer[check] <= bound)
    if delta == 0:
        bounded = bounded and bool(outer_all.max() <= bound)

    report = UniquenessReport(r_tilde=r_tilde, r=r, t_hat=t_hat, delta=delta, initial_gap=initial_gap,
                              sup_gap=sup_gap, grid_sup_gap=float(outer_all.max()),
                              times=[float(t) for t in times], gaps=[float(g) for g in inner],
                              ratios=[float(x) for x in ratios], envelope_rate=envelope_rate,
                              lipschitz_constant=float(safe_divide(sup_gap, initial_gap)),
                              check_time=float(times[check]), check_gap=float(outer[check]), gap_bound=bound,
                              bounded=bounded, continuous=_is_continuous(inner))
    logger.info(f'Uniqueness gap: {report.check_gap:.3e} at t = {report.check_time:.4g} (bound {bound:.3e}), '
                f'K = {sup_gap:.3e} for an initial gap {initial_gap:.3e}')
    if not bounded:
        logger.warning(f'The gap exceeds its bound {bound:.3e}')
    return report

"""Empirical decay rates: of the Fourier coefficients in ``|k|_e`` (analyticity radius) and of the flow towards its mean
in time."""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from torusflow.commons import variables as vs
from torusflow.commons.arithmetic import log_linear_fit
from torusflow.commons.exceptions import DegenerateTrajectoryError, TooFewModesError
from torusflow.commons.miscellaneous import get_torusflow_logger
from torusflow.navier_stokes.trajectory import Trajectory
from torusflow.spectral.fields import SpectralField
from torusflow.spectral.operators import evaluate_on_grid, without_mean

logger = get_torusflow_logger(__name__)


@dataclass
class DecayFit:
    """A log-linear fit of coefficient shell maxima against ``|k|_e``.

    ``-slope`` is the empirical analyticity radius: coefficients decay like ``exp(slope |k|_e)``.
    """

    slope: float
    intercept: float
    rms: float
    modes_used: int  # Number of shells entering the fit

    def to_dict(self) -> Dict[str, Any]:
        return {'slope': self.slope, 'intercept': self.intercept, 'rms': self.rms, 'modes_used': self.modes_used}


def shell_maxima(f: SpectralField) -> tuple:
    """``max |f_k|`` over ``|k|_e in [q, q + 1)`` for every shell ``q >= 1``, and the ``|k|_e`` attaining it.

    The mean mode is left out. Returns the shell indices, the radii of the maximizing modes and the maxima.
    """
    grid = f.grid
    moduli = np.abs(f.coeffs).max(axis=0)[grid.nonzero]
    radii = grid.l2[grid.nonzero]
    shells = np.floor(radii).astype(int)

    order = np.lexsort((-moduli, shells))  # by shell, largest modulus first
    shells, radii, moduli = shells[order], radii[order], moduli[order]
    first = np.flatnonzero(np.diff(shells, prepend=-1))
    return shells[first], radii[first], moduli[first]


def decay_rate_fit(f: SpectralField, floor: float) -> DecayFit:
    """Fits ``log(shell max |f_k|)`` against ``|k|_e`` over the shells whose maximum exceeds ``floor``.

    Shells are ``|k|_e in [q, q + 1)``; each contributes its largest coefficient (over modes and components), placed at
    the ``|k|_e`` of the mode attaining it.

    Raises:
        TooFewModesError: if fewer than ``MIN_DECAY_SHELLS`` shells exceed ``floor``.
    """
    _, radii, maxima = shell_maxima(f)
    keep = maxima > floor
    if keep.sum() < vs.MIN_DECAY_SHELLS:
        raise TooFewModesError(int(keep.sum()), vs.MIN_DECAY_SHELLS)
    slope, intercept, rms = log_linear_fit(radii[keep], maxima[keep])
    return DecayFit(slope, intercept, rms, int(keep.sum()))


@dataclass
class MeanDecay:
    """Decay of ``max_x |v(t, x) - v_0|`` along a trajectory."""

    rate: float  # Fitted exponential rate over the tail half of the grid
    constant: float  # exp(intercept) of the fit
    bound_constant: float  # max_i deviation_i * exp(nu t_i / 2), the smallest c in c exp(-nu t / 2)
    times: List[float]
    deviations: List[float]

    def to_dict(self) -> Dict[str, Any]:
        return {'rate': self.rate, 'constant': self.constant, 'bound_constant': self.bound_constant,
                'times': self.times, 'deviations': self.deviations}


def mean_deviations(traj: Trajectory, samples: Optional[int] = None) -> np.ndarray:
    """``max_x |v(t_i, x) - v_0|`` over a sample grid and the components, at every node."""
    return np.array([float(np.abs(evaluate_on_grid(without_mean(state), samples=samples)).max())
                     for state in traj.states])


def mean_decay_check(traj: Trajectory, samples: Optional[int] = None) -> MeanDecay:
    """Fits ``log max_x |v(t, x) - v_0|`` against ``t`` over the tail half of the grid.

    Raises:
        DegenerateTrajectoryError: if the flow is (numerically) constant over the tail, so that nothing decays.
    """
    deviations = mean_deviations(traj, samples)
    tail = slice(len(traj) // 2, None)
    times, values = traj.times[tail], deviations[tail]
    positive = values > np.finfo(float).tiny
    if positive.sum() < 2 or deviations[0] <= np.finfo(float).tiny:
        raise DegenerateTrajectoryError('The flow does not deviate from its mean, there is no decay to measure')

    slope, intercept, _ = log_linear_fit(times[positive], values[positive])
    nu = traj.config.viscosity
    bound_constant = float((deviations * np.exp(nu * traj.times / 2.)).max())
    logger.info(f'Mean decay rate {-slope:.4e} (against nu / 2 = {nu / 2.:.4e})')
    return MeanDecay(rate=-slope, constant=float(np.exp(intercept)), bound_constant=bound_constant,
                     times=[float(t) for t in traj.times], deviations=[float(d) for d in deviations])

"""Checks of computed trajectories against the differential form of the equations, and closed-form oracles."""

from dataclasses import dataclass
from typing import Any, Dict, List

import numpy as np

from torusflow.commons import variables as vs
from torusflow.commons.exceptions import GridTooCoarseError
from torusflow.commons.miscellaneous import get_torusflow_logger
from torusflow.navier_stokes.projection import pressure_coeffs, pressure_recover, symmetrize
from torusflow.navier_stokes.trajectory import Trajectory
from torusflow.spectral.config import SolverConfig
from torusflow.spectral.convolution import ConvolutionMethod, convolve_arrays
from torusflow.spectral.fields import SpectralField, get_grid, spatial_axes
from torusflow.spectral.operators import norm_hs, partial

logger = get_torusflow_logger(__name__)


# ======================================================================================================================
#                                                 MOMENTUM RESIDUAL
# ======================================================================================================================

def time_derivative(coeffs: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Second-order three-point derivative at the interior nodes of a (possibly non-uniform) grid."""
    before = times[1:-1] - times[:-2]
    after = times[2:] - times[1:-1]
    shape = (-1,) + (1,) * (coeffs.ndim - 1)
    before, after = before.reshape(shape), after.reshape(shape)
    return (-after / (before * (before + after)) * coeffs[:-2]
            + (after - before) / (before * after) * coeffs[1:-1]
            + before / (after * (before + after)) * coeffs[2:])


def momentum_residual(traj: Trajectory, method: ConvolutionMethod = 'fast') -> np.ndarray:
    """``||v_t + (v, grad) v + grad p - nu lap v||_l1`` at the interior nodes, with ``v_t`` by finite differences and
    ``p`` recovered from ``v``.

    Raises:
        GridTooCoarseError: if the grid has fewer than 3 intervals.
    """
    if len(traj) - 1 < 3:
        raise GridTooCoarseError(f'The momentum residual needs at least 3 grid intervals, got {len(traj) - 1}')

    dim = traj.dim
    grid = get_grid(dim, traj.trunc)
    k = grid.components
    velocity = traj.coeffs[1:-1]
    gradients = 1j * k[None, :, None] * np.expand_dims(velocity, axis=1)  # (nodes, j, component, *spatial)

    advection = sum(convolve_arrays(velocity[:, j:j + 1], gradients[:, j], dim, method) for j in range(dim))
    pressure_gradient = 1j * k * pressure_coeffs(velocity, dim, method)
    viscous = -traj.config.viscosity * grid.l2_squared * velocity

    residual = time_derivative(traj.coeffs, traj.times) + advection + pressure_gradient - viscous
    return np.abs(residual).sum(axis=(1,) + spatial_axes(dim))


# ======================================================================================================================
#                                                 CONTINUITY AT t = 0
# ======================================================================================================================

@dataclass
class ContinuityReport:
    """Distances to the initial data over the first grid nodes."""

    times: List[float]
    velocity_gaps: List[float]  # ||d^kappa v(t_i) - d^kappa v_hat||_{s - |kappa|}
    pressure_gaps: List[float]  # ||d^kappa p(t_i) - d^kappa p_hat||_{s - |kappa|}
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {'times': self.times, 'velocity_gaps': self.velocity_gaps, 'pressure_gaps': self.pressure_gaps,
                'passed': self.passed}


def _shrinks_towards_zero(gaps: List[float], slack: float = 1e-13) -> bool:
    """Whether ``gaps`` (ordered by increasing time) increase with time, i.e. decrease as ``t -> 0``."""
    gaps = np.asarray(gaps)
    scale = slack * max(gaps.max(initial=0.), 1.)
    monotone = bool(np.all(np.diff(gaps) >= -scale))
    return monotone and (gaps[0] < gaps[-1] or gaps[-1] <= scale)


def initial_continuity_check(traj: Trajectory, kappa: vs.MultiIndexType, s: float, nodes: int = 5) -> ContinuityReport:
    """Evaluates ``||d^kappa v(t) - d^kappa v_hat||_{s - |kappa|}`` (and the same for the pressure) at the first
    ``nodes`` nodes after ``t = 0``.

    The check passes if both sequences shrink monotonically as ``t -> 0``.
    """
    order = sum(kappa)
    index = s - order
    nodes = min(nodes, len(traj) - 1)
    v_hat = traj.initial
    p_hat = pressure_recover(v_hat)
    dv_hat, dp_hat = partial(v_hat, kappa), partial(p_hat, kappa)

    times, velocity_gaps, pressure_gaps = [], [], []
    for i in range(1, nodes + 1):
        state = traj.state(i)
        times.append(float(traj.times[i]))
        velocity_gaps.append(norm_hs(partial(state, kappa) - dv_hat, index))
        pressure_gaps.append(norm_hs(partial(pressure_recover(state), kappa) - dp_hat, index))

    passed = _shrinks_towards_zero(velocity_gaps) and _shrinks_towards_zero(pressure_gaps)
    logger.info(f'Initial continuity for kappa={tuple(kappa)}: {"passed" if passed else "failed"}')
    return ContinuityReport(times, velocity_gaps, pressure_gaps, passed)


# ======================================================================================================================
#                                                 ENERGY
# ======================================================================================================================

def energy_series(traj: Trajectory) -> np.ndarray:
    """``sum_k |v_k(t_i)|^2`` at every node."""
    return (np.abs(traj.coeffs) ** 2).sum(axis=(1,) + spatial_axes(traj.dim))


def energy_is_nonincreasing(traj: Trajectory, slack: float = 0.) -> bool:
    """Whether the energy never grows between consecutive nodes by more than ``slack`` (relative to the initial energy)."""
    energies = energy_series(traj)
    return bool(np.all(np.diff(energies) <= slack * max(energies[0], np.finfo(float).tiny)))


# ======================================================================================================================
#                                                 ORACLES
# ======================================================================================================================

def taylor_green(trunc: int, amplitude: float = 1., swapped: bool = False) -> SpectralField:
    """The 2d Taylor-Green vortex ``(sin x1 cos x2, -cos x1 sin x2)``, or ``(cos x1 sin x2, -sin x1 cos x2)`` if
    ``swapped``, whose coefficients have modulus ``amplitude / 4`` on the four modes ``(+-1, +-1)``."""
    modes = {}
    for a in (-1, 1):
        for b in (-1, 1):
            if swapped:
                modes[(a, b)] = (-0.25j * b * amplitude, 0.25j * a * amplitude)
            else:
                modes[(a, b)] = (-0.25j * a * amplitude, 0.25j * b * amplitude)
    return SpectralField.from_modes(2, trunc, modes, components=2, real=True)


def exact_taylor_green(times: np.ndarray, nu: float, trunc: int, amplitude: float = 1.) -> Trajectory:
    """The exact Taylor-Green solution ``v_hat exp(-2 nu t)``."""
    times = np.asarray(times, dtype=float)
    v_hat = taylor_green(trunc, amplitude)
    coeffs = np.exp(-2. * nu * times).reshape(-1, 1, 1, 1) * v_hat.coeffs[None]
    config = SolverConfig(dim=2, trunc=trunc, viscosity=nu, horizon=float(times[-1]), time_steps=times.size - 1)
    return Trajectory(config, times, coeffs, real=True)


def exact_taylor_green_pressure(t: float, nu: float, trunc: int, amplitude: float = 1.) -> SpectralField:
    """The pressure ``(cos 2x1 + cos 2x2) exp(-4 nu t) / 4`` of the vortex built by ``taylor_green``.

    The swapped orientation has the opposite pressure.
    """
    value = amplitude ** 2 * np.exp(-4. * nu * t) / 8.
    modes = {(2, 0): value, (-2, 0): value, (0, 2): value, (0, -2): value}
    return SpectralField.from_modes(2, trunc, modes, components=1, real=True)


def single_mode_heat_flow(times: np.ndarray, nu: float, dim: int, trunc: int, k: vs.WavevectorType,
                          direction: vs.WavevectorType, amplitude: float = 1.) -> Trajectory:
    """The exact trajectory of the real shear mode ``amplitude * direction * cos((k, x))`` with ``(k, direction) = 0``.

    Such a field is a stationary Euler flow, so the nonlinearity vanishes and each coefficient decays as
    ``exp(-nu |k|_e^2 t)``.
    """
    times = np.asarray(times, dtype=float)
    direction = np.asarray(direction, dtype=float)
    coefficient = 0.5 * amplitude * direction
    modes = {tuple(k): coefficient, tuple(-k_j for k_j in k): coefficient}
    v_hat = SpectralField.from_modes(dim, trunc, modes, components=dim, real=True)
    rate = nu * float(np.dot(k, k))
    coeffs = np.exp(-rate * times).reshape((-1,) + (1,) * (dim + 1)) * v_hat.coeffs[None]
    config = SolverConfig(dim=dim, trunc=trunc, viscosity=nu, horizon=float(times[-1]), time_steps=times.size - 1)
    return Trajectory(config, times, symmetrize(coeffs, dim), real=True)

"""Mild formulation of the projected Navier-Stokes system and its Picard solver.

The velocity solves ``v(t) = S^t v_hat + int_0^t S^{t - xi} B(v(xi)) dxi``, where ``S`` is the heat semigroup and ``B`` the
projected nonlinearity. The time integral is a composite trapezoid on the trajectory grid, with the semigroup factor
evaluated exactly at the nodes. Writing ``E_i = exp(-nu |k|_e^2 (t_i - t_{i-1}))``, the integrals at all nodes obey

    Q_0 = 0,    Q_i = E_i Q_{i-1} + (t_i - t_{i-1}) / 2 (E_i f_{i-1} + f_i),

so a sweep over the whole grid costs one pass over the stored history.
"""

from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from torusflow.commons import variables as vs
from torusflow.commons.docstrings import docstring_formatter, docstrings
from torusflow.commons.exceptions import ConfigError, DivergedError, InsufficientHistoryError
from torusflow.commons.miscellaneous import get_torusflow_logger, ordered_map, split_list
from torusflow.navier_stokes.projection import nonlinear_coeffs, symmetrize
from torusflow.navier_stokes.trajectory import PicardReport, Trajectory, check_time_grid
from torusflow.spectral.config import SolverConfig
from torusflow.spectral.convolution import ConvolutionMethod
from torusflow.spectral.fields import SpectralField, check_compatible, check_components, get_grid
from torusflow.spectral.operators import apply_matrix, leray_multiplier

logger = get_torusflow_logger(__name__)

IterateCallback = Callable[[int, np.ndarray], None]


# ======================================================================================================================
#                                                 TIME GRIDS
# ======================================================================================================================

def time_grid(horizon: float, time_steps: int) -> np.ndarray:
    """The uniform grid of ``time_steps`` intervals on ``[0, horizon]``."""
    return np.linspace(0., horizon, time_steps + 1)


def dyadic_grid(horizon: float, levels: int) -> np.ndarray:
    """The grid ``0, T/2^levels, T/2^(levels-1), ..., T/2, T``, refined towards ``t = 0``."""
    return np.concatenate([[0.], horizon * 2. ** -np.arange(levels, -1, -1)])


# ======================================================================================================================
#                                                 DUHAMEL QUADRATURE
# ======================================================================================================================

def duhamel_history(rhs: np.ndarray, times: np.ndarray, rates: np.ndarray) -> np.ndarray:
    """Trapezoidal Duhamel integrals ``Q_i ~ int_0^{t_i} exp(-rates (t_i - xi)) f(xi) dxi`` at every node.

    Args:
        rhs: The integrand at every node, shape ``(M + 1, ...)``, the trailing axes broadcasting against ``rates``.
        times: The time grid.
        rates: The mode-wise decay rates, e.g. ``nu |k|_e^2``.
    """
    integrals = np.zeros_like(rhs)
    for i in range(1, times.size):
        step = times[i] - times[i - 1]
        decay = np.exp(-rates * step)
        integrals[i] = decay * integrals[i - 1] + 0.5 * step * (decay * rhs[i - 1] + rhs[i])
    return integrals


@docstring_formatter(**docstrings)
def duhamel_apply(v_hat: SpectralField,
                  rhs_history: Sequence[SpectralField],
                  nu: float,
                  times: np.ndarray) -> SpectralField:
    """``S^t v_hat + int_0^t S^(t - tau) f(tau) dtau`` at the last node ``t`` of ``times``.

    Args:
        v_hat: {field}
        rhs_history: The integrand ``f`` at every node of ``times``.
        nu: {viscosity}
        times: {times}

    Raises:
        InsufficientHistoryError: if the history does not have one field per grid node.
    """
    times = check_time_grid(times)
    if len(rhs_history) != times.size:
        raise InsufficientHistoryError(f'The history has {len(rhs_history)} fields for a grid of {times.size} nodes')
    check_compatible(v_hat, *rhs_history)

    grid = v_hat.grid
    rates = nu * grid.l2_squared
    integrals = duhamel_history(np.stack([f.coeffs for f in rhs_history]), times, rates)
    value = np.exp(-rates * times[-1]) * v_hat.coeffs + integrals[-1]
    return v_hat.with_coeffs(value, real=v_hat.real and all(f.real for f in rhs_history))


# ======================================================================================================================
#                                                 PICARD ITERATION
# ======================================================================================================================

def sup_l1_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``max_i ||a_i - b_i||_l1`` over the leading (node) axis."""
    return float(np.abs(a - b).reshape(a.shape[0], -1).sum(axis=1).max())


def picard_iterate(initial: np.ndarray,
                   sweep: Callable[[np.ndarray], np.ndarray],
                   tolerance: float,
                   max_iterations: int,
                   label: str = 'Picard',
                   callback: Optional[IterateCallback] = None) -> Tuple[np.ndarray, PicardReport]:
    """Iterates ``x <- sweep(x)`` until the sup-grid l1 residual drops below ``tolerance``.

    Args:
        initial: The iterate number 0, with the node axis first.
        sweep: The fixed-point map.
        tolerance: The convergence threshold on the residual.
        max_iterations: The maximal number of sweeps. Reaching it returns an unconverged report.
        label: Name used in log messages.
        callback: Called as ``callback(m, iterate)`` on every iterate, starting with ``m = 0``.

    Raises:
        DivergedError: if the residual grows for ``DIVERGENCE_PATIENCE`` consecutive sweeps, or if an iterate is not
            finite.
    """
    report = PicardReport(tolerance=tolerance)
    current = initial
    increases = 0
    if callback is not None:
        callback(0, current)

    for iteration in range(1, max_iterations + 1):
        with np.errstate(over='ignore', invalid='ignore'):
            following = sweep(current)
            residual = sup_l1_distance(following, current)

        if not np.isfinite(residual) or not np.all(np.isfinite(following)):
            report.residuals.append(float('inf'))
            logger.warning(f'{label}: non-finite iterate at sweep {iteration}')
            raise DivergedError(f'{label} iteration overflowed at sweep {iteration}', report=report)

        report.residuals.append(residual)
        ratio = report.contraction_ratios[-1] if iteration > 1 else np.nan
        logger.debug(f'{label}: sweep {iteration}, residual {residual:.3e}, ratio {ratio:.3f}')
        if callback is not None:
            callback(iteration, following)
        current = following

        if residual <= tolerance:
            report.converged = True
            break

        if iteration > 1 and residual > report.residuals[-2]:
            increases += 1
        else:
            increases = 0
        if increases >= vs.DIVERGENCE_PATIENCE:
            logger.warning(f'{label}: residual grew for {increases} consecutive sweeps, giving up')
            raise DivergedError(f'{label} iteration diverged after {iteration} sweeps '
                                f'(last residual {residual:.3e})', report=report)

    if report.converged:
        logger.info(f'{label}: converged in {report.iterations} sweeps, residual {report.final_residual:.3e}')
    else:
        logger.warning(f'{label}: not converged after {max_iterations} sweeps, residual {report.final_residual:.3e}')
    return current, report


def node_chunks(nodes: int, threads: int) -> list:
    """Splits node indices into contiguous chunks, one batch of transforms each."""
    chunk_size = max(1, min(vs.NODE_CHUNK_SIZE, int(np.ceil(nodes / max(threads, 1)))))
    return split_list(list(range(nodes)), chunk_size)


def nonlinear_on_grid(coeffs: np.ndarray, dim: int, method: ConvolutionMethod = 'fast', threads: int = 1) -> np.ndarray:
    """``B(v(t_i))`` at every node; chunks of nodes are evaluated independently and reassembled in node order."""
    chunks = node_chunks(coeffs.shape[0], threads)
    results = ordered_map(lambda chunk: nonlinear_coeffs(coeffs[chunk[0]:chunk[-1] + 1], dim, method), chunks, threads)
    return np.concatenate(results)


def mild_map(v_hat: np.ndarray,
             iterate: np.ndarray,
             nu: float,
             times: np.ndarray,
             method: ConvolutionMethod = 'fast',
             threads: int = 1,
             real: bool = True) -> np.ndarray:
    """One sweep ``G(v)`` of the fixed-point map on raw coefficients, followed by an exact Leray projection."""
    dim = v_hat.ndim - 1
    grid = get_grid(dim, (v_hat.shape[-1] - 1) // 2)
    rates = nu * grid.l2_squared
    linear = np.exp(-rates * times.reshape((-1,) + (1,) * (dim + 1))) * v_hat
    following = linear + duhamel_history(nonlinear_on_grid(iterate, dim, method, threads), times, rates)
    following = apply_matrix(leray_multiplier(grid), following)
    return symmetrize(following, dim) if real else following


@docstring_formatter(**docstrings)
def picard_solve(v_hat: SpectralField,
                 config: SolverConfig,
                 times: Optional[np.ndarray] = None,
                 method: ConvolutionMethod = 'fast',
                 callback: Optional[IterateCallback] = None) -> Tuple[Trajectory, PicardReport]:
    """Solves the mild equation ``v = G(v)`` on a time grid by Picard iteration, starting from ``v(t) = S^t v_hat``.

    Args:
        v_hat: The solenoidal initial velocity.
        config: {config}
        times: An explicit time grid. Defaults to the uniform grid of ``config``.
        method: The convolution method of the nonlinearity.
        callback: Called as ``callback(m, iterate)`` on every Picard iterate (raw coefficients of all nodes).

    Returns:
        The converged trajectory and the ``PicardReport``.

    Raises:
        DivergedError: if the residual grows for three consecutive sweeps or overflows.
    """
    check_components(v_hat, v_hat.dim, 'a velocity field')
    if v_hat.dim != config.dim or v_hat.trunc != config.trunc:
        raise ConfigError(f'initial data has (n={v_hat.dim}, N={v_hat.trunc}), config has (n={config.dim}, '
                          f'N={config.trunc})', field='dim' if v_hat.dim != config.dim else 'trunc')
    divergence = np.abs((1j * v_hat.grid.components * v_hat.coeffs).sum(axis=0)).sum()
    if divergence > config.divergence_tolerance * np.abs(v_hat.coeffs).sum():
        raise ConfigError(f'initial velocity is not divergence-free (||div||_l1 = {divergence:.3e})', field='initial_data')

    times = time_grid(config.horizon, config.time_steps) if times is None else check_time_grid(times)
    rates = config.viscosity * v_hat.grid.l2_squared
    initial = np.exp(-rates * times.reshape((-1,) + (1,) * (v_hat.dim + 1))) * v_hat.coeffs

    coeffs, report = picard_iterate(
            initial=initial,
            sweep=lambda iterate: mild_map(v_hat.coeffs, iterate, config.viscosity, times, method, config.threads,
                                           v_hat.real),
            tolerance=config.picard_tolerance,
            max_iterations=config.max_iterations,
            label='Navier-Stokes Picard',
            callback=callback)

    return Trajectory(config, times, coeffs, real=v_hat.real), report


def mild_residual(traj: Trajectory, method: ConvolutionMethod = 'fast') -> float:
    """The fixed-point defect ``max_i ||v(t_i) - G(v)(t_i)||_l1`` of a trajectory."""
    mapped = mild_map(traj.coeffs[0], traj.coeffs, traj.config.viscosity, traj.times, method, traj.config.threads,
                      traj.real)
    return sup_l1_distance(mapped, traj.coeffs)


def richardson_error(coarse: np.ndarray, fine: np.ndarray) -> float:
    """The l1 deviation between the common nodes of a grid (``coarse``) and its doubling (``fine``)."""
    return float(np.abs(fine[::2] - coarse).reshape(coarse.shape[0], -1).sum(axis=1).max())


def quadrature_converged(v_hat: SpectralField, config: SolverConfig) -> Tuple[bool, float]:
    """Grid-doubling check of the Duhamel quadrature: solves on ``M`` and ``2M`` intervals and compares common nodes
    against ``config.quadrature_tolerance``."""
    coarse, _ = picard_solve(v_hat, config)
    fine, _ = picard_solve(v_hat, config.replace(time_steps=2 * config.time_steps))
    error = richardson_error(coarse.coeffs, fine.coeffs)
    return error <= config.quadrature_tolerance, error

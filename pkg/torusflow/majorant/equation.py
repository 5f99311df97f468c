"""The scalar majorant equation ``V(t) = V_hat + a int_0^t P_rho^{t - xi} D(V^2)(xi) dxi`` and the time-integrated
bilinear estimates behind its solvability.

The equation is solved with the Picard driver and the trapezoid Duhamel recurrence of ``navier_stokes.mild``, with
decay rates ``rho |k|_e^2`` instead of ``nu |k|_e^2``. The data ``V_hat`` enters unsmoothed at every time.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from torusflow.commons import variables as vs
from torusflow.commons.arithmetic import safe_divide
from torusflow.commons.docstrings import docstring_formatter, docstrings
from torusflow.commons.miscellaneous import get_torusflow_logger, ordered_map
from torusflow.majorant.sequences import MajorantSequence, MajorantTrajectory, majorant_convolve
from torusflow.navier_stokes.mild import duhamel_history, node_chunks, picard_iterate, time_grid
from torusflow.navier_stokes.trajectory import PicardReport, check_time_grid
from torusflow.spectral.convolution import ConvolutionMethod, convolve_arrays
from torusflow.spectral.fields import get_grid, spatial_axes

logger = get_torusflow_logger(__name__)


def _squared_derivative(values: np.ndarray, dim: int, method: ConvolutionMethod, threads: int) -> np.ndarray:
    """``D(V^2)`` at every node, in chunks of nodes."""
    grid = get_grid(dim, (values.shape[-1] - 1) // 2)
    chunks = node_chunks(values.shape[0], threads)
    squares = ordered_map(lambda chunk: majorant_convolve(values[chunk[0]:chunk[-1] + 1],
                                                          values[chunk[0]:chunk[-1] + 1], dim, method),
                          chunks, threads)
    return grid.l1 * np.concatenate(squares)


@docstring_formatter(**docstrings)
def majorant_solve(V_hat: MajorantSequence,
                   a: float,
                   rho: float,
                   horizon: float = 1.,
                   time_steps: int = 64,
                   times: Optional[np.ndarray] = None,
                   tolerance: float = vs.PICARD_TOLERANCE,
                   max_iterations: int = vs.MAX_PICARD_ITERATIONS,
                   method: ConvolutionMethod = 'fast',
                   threads: int = 1) -> Tuple[MajorantTrajectory, PicardReport]:
    """Solves the majorant equation by Picard iteration, starting from ``V(t) = V_hat``.

    The integrand is nonnegative and monotone in ``V``, so the iterates are nonnegative and nondecreasing both in time
    and in the iteration index.

    Args:
        V_hat: {majorant}
        a: The positive weight of the nonlinearity.
        rho: {rho}
        horizon: The final time of the uniform grid.
        time_steps: The number of intervals of the uniform grid.
        times: An explicit time grid, overriding ``horizon`` and ``time_steps``.
        tolerance: The sup-grid l1 residual at which the iteration stops.
        max_iterations: The maximal number of sweeps.
        method: The convolution method.
        threads: {threads}

    Raises:
        DivergedError: if the residual grows for three consecutive sweeps or overflows, i.e. the horizon is beyond the
            interval on which the majorant exists.
    """
    if a <= 0 or rho <= 0:
        raise ValueError(f'The majorant equation needs a > 0 and rho > 0, got a={a}, rho={rho}')
    times = time_grid(horizon, time_steps) if times is None else check_time_grid(times)
    dim = V_hat.dim
    rates = rho * V_hat.grid.l2_squared
    initial = np.broadcast_to(V_hat.coeffs, (times.size,) + V_hat.coeffs.shape).copy()

    def sweep(iterate: np.ndarray) -> np.ndarray:
        integrals = duhamel_history(_squared_derivative(iterate, dim, method, threads), times, rates)
        return V_hat.coeffs + a * np.clip(integrals, 0., None)

    values, report = picard_iterate(initial, sweep, tolerance, max_iterations, label='Majorant Picard')
    return MajorantTrajectory(times, values), report


# ======================================================================================================================
#                                                 TIME-INTEGRATED NORMS
# ======================================================================================================================

def _trapezoid(values: np.ndarray, times: np.ndarray) -> float:
    return float((0.5 * np.diff(times) * (values[1:] + values[:-1])).sum())


def _node_norms(coeffs: np.ndarray, s: float) -> np.ndarray:
    """``||f(t_i)||_s`` per node for coefficients of shape ``(M + 1, m, *spatial)``."""
    dim = coeffs.ndim - 2
    weights = get_grid(dim, (coeffs.shape[-1] - 1) // 2).weights
    return (np.abs(coeffs) * weights ** s).sum(axis=(1,) + spatial_axes(dim))


@docstring_formatter(**docstrings)
def time_l2_norm(coeffs: np.ndarray, s: float, times: np.ndarray) -> float:
    """``(int_0^T ||f(t)||_s^2 dt)^(1/2)`` by the trapezoid rule on the grid.

    Args:
        coeffs: The coefficients at every node, shape ``(M + 1, m, *spatial)``.
        s: {smoothness}
        times: {times}
    """
    return float(np.sqrt(_trapezoid(_node_norms(coeffs, s) ** 2, check_time_grid(times))))


@docstring_formatter(**docstrings)
def time_sobolev_norm(coeffs: np.ndarray, s: float, times: np.ndarray) -> float:
    """``max(||u||, ||u_t||)`` with the time-integrated norm of ``time_l2_norm``; ``u_t`` is taken by second-order
    finite differences.

    Args:
        coeffs: The coefficients at every node, shape ``(M + 1, m, *spatial)``.
        s: {smoothness}
        times: {times}
    """
    times = check_time_grid(times)
    derivative = np.gradient(coeffs, times, axis=0, edge_order=2 if times.size > 2 else 1)
    return max(time_l2_norm(coeffs, s, times), time_l2_norm(derivative, s, times))


@dataclass
class BilinearEstimate:
    """``||Phi(u, v)||`` against ``||u|| ||v||`` in the time-integrated norm."""

    phi_norm: float
    product_norm: float
    ratio: float  # phi_norm / product_norm, bounded by a constant independent of u and v

    def to_dict(self) -> Dict[str, Any]:
        return {'phi_norm': self.phi_norm, 'product_norm': self.product_norm, 'ratio': self.ratio}


def bilinear_map(u: np.ndarray, v: np.ndarray, rho: float, times: np.ndarray,
                 method: ConvolutionMethod = 'fast') -> np.ndarray:
    """``Phi(u, v)(t_i) = int_0^{t_i} P_rho^{t_i - xi} D(uv)(xi) dxi`` at every node, for scalar histories of shape
    ``(M + 1, 1, *spatial)``."""
    dim = u.ndim - 2
    grid = get_grid(dim, (u.shape[-1] - 1) // 2)
    rhs = grid.l1 * convolve_arrays(u, v, dim, method)
    return duhamel_history(rhs, check_time_grid(times), rho * grid.l2_squared)


@docstring_formatter(**docstrings)
def bilinear_estimate(u: np.ndarray, v: np.ndarray, rho: float, s: float, times: np.ndarray,
                      method: ConvolutionMethod = 'fast') -> BilinearEstimate:
    """Measures ``||Phi(u, v)||`` and ``||u|| ||v||`` in the time-integrated norm of ``time_l2_norm``.

    Args:
        u: The first history, shape ``(M + 1, 1, *spatial)``.
        v: The second history, same shape.
        rho: {rho}
        s: {smoothness}
        times: {times}
        method: The convolution method.
    """
    phi = bilinear_map(u, v, rho, times, method)
    phi_norm = time_l2_norm(phi, s, times)
    product_norm = time_l2_norm(u, s, times) * time_l2_norm(v, s, times)
    return BilinearEstimate(phi_norm, product_norm, safe_divide(phi_norm, product_norm))

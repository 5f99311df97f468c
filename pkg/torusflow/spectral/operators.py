"""Norms and diagonal Fourier multipliers on truncated fields.

Every operator acts mode-wise, so it is a multiplication of the coefficient array by a fixed array over the cube. The
array-level helpers (``*_multiplier``) broadcast against coefficient arrays with any number of leading axes (time nodes,
components), which is how the solvers use them.
"""

from typing import Optional, Sequence

import numpy as np

from torusflow.commons import variables as vs
from torusflow.commons.docstrings import docstring_formatter, docstrings
from torusflow.commons.exceptions import NonZeroMeanError, ShapeMismatchError
from torusflow.commons.miscellaneous import get_torusflow_logger
from torusflow.spectral.fields import SpectralField, WavevectorGrid, check_components, spatial_axes

logger = get_torusflow_logger(__name__)


# ======================================================================================================================
#                                                 MULTIPLIERS
# ======================================================================================================================

def heat_multiplier(grid: WavevectorGrid, tau: float, nu: float) -> np.ndarray:
    """``exp(-nu |k|_e^2 tau)``."""
    return np.exp(-nu * grid.l2_squared * tau)


def lambda_multiplier(grid: WavevectorGrid, t: float, nu: float) -> np.ndarray:
    """``exp(-|k|_e t nu / 2)``."""
    return np.exp(-grid.l2 * t * nu / 2.)


def inv_laplacian_multiplier(grid: WavevectorGrid) -> np.ndarray:
    """``-1 / |k|_e^2`` off the mean mode, 0 on it."""
    return np.where(grid.nonzero, -1. / grid.l2_squared_safe, 0.)


def projection_multiplier(grid: WavevectorGrid) -> np.ndarray:
    """The matrix field ``k_a k_b / |k|_e^2 - delta_ab`` of shape ``(n, n, 2N+1, ..., 2N+1)``.

    On the mean mode the quotient is dropped and the multiplier reduces to ``-delta_ab``.
    """
    k = grid.components
    quotient = np.where(grid.nonzero, k[:, None] * k[None, :] / grid.l2_squared_safe, 0.)
    identity = np.eye(grid.dim).reshape((grid.dim, grid.dim) + (1,) * grid.dim)
    return quotient - identity


def leray_multiplier(grid: WavevectorGrid) -> np.ndarray:
    """``delta_ab - k_a k_b / |k|_e^2``, the identity on the mean mode."""
    return -projection_multiplier(grid)


def apply_matrix(matrix: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Applies a mode-wise ``(n, n)`` matrix multiplier to the component axis of ``coeffs``.

    ``coeffs`` has shape ``(..., n, *spatial)``; the contraction runs over the component axis.
    """
    dim = matrix.ndim - 2
    return (matrix * np.expand_dims(coeffs, axis=-dim - 2)).sum(axis=-dim - 1)


# ======================================================================================================================
#                                                 NORMS
# ======================================================================================================================

@docstring_formatter(**docstrings)
def norm_hs(f: SpectralField, s: float) -> float:
    """The weighted l1 norm ``sum_k |f_k| w(k)^s``, summed over all components.

    Args:
        f: {field}
        s: {smoothness}
    """
    return float((np.abs(f.coeffs) * f.grid.weights ** s).sum())


def l1_norm(f: SpectralField) -> float:
    return float(np.abs(f.coeffs).sum())


@docstring_formatter(**docstrings)
def norm_analytic(f: SpectralField, r: float) -> float:
    """The analytic norm ``sum_k |f_k| exp(|k|_1 r)`` over all components.

    Args:
        f: {field}
        r: {radius}
    """
    if r < 0:
        raise ValueError(f'The analytic radius must be nonnegative, got {r}')
    return float((np.abs(f.coeffs) * np.exp(f.grid.l1 * r)).sum())


def energy(f: SpectralField) -> float:
    """The Galerkin energy ``sum_k |f_k|^2`` over all components."""
    return float((np.abs(f.coeffs) ** 2).sum())


def mean_mode(f: SpectralField) -> np.ndarray:
    """The ``k = 0`` coefficient of every component."""
    return f.coeffs[(slice(None),) + f.grid.origin].copy()


def without_mean(f: SpectralField) -> SpectralField:
    coeffs = f.coeffs.copy()
    coeffs[(slice(None),) + f.grid.origin] = 0.
    return f.with_coeffs(coeffs)


# ======================================================================================================================
#                                                 DIFFERENTIAL OPERATORS
# ======================================================================================================================

def derivative(f: SpectralField, axis: int) -> SpectralField:
    """``d/dx_axis``, multiplying mode ``k`` by ``i k_axis``. Axes are numbered from 0."""
    if not 0 <= axis < f.dim:
        raise ShapeMismatchError(f'Axis {axis} out of range for dimension {f.dim}')
    return f.with_coeffs(1j * f.grid.components[axis] * f.coeffs)


def partial(f: SpectralField, kappa: vs.MultiIndexType) -> SpectralField:
    """The mixed derivative ``d^kappa`` for a multi-index ``kappa`` of length ``n``."""
    if len(kappa) != f.dim or any(order < 0 for order in kappa):
        raise ShapeMismatchError(f'Invalid multi-index {kappa} for dimension {f.dim}')
    multiplier = np.ones(f.grid.shape, dtype=np.complex128)
    for axis, order in enumerate(kappa):
        multiplier = multiplier * (1j * f.grid.components[axis]) ** order
    return f.with_coeffs(multiplier * f.coeffs)


def divergence(v: SpectralField) -> SpectralField:
    check_components(v, v.dim, 'a vector field')
    return v.with_coeffs((1j * v.grid.components * v.coeffs).sum(axis=0, keepdims=True))


def gradient(f: SpectralField) -> SpectralField:
    check_components(f, 1, 'a scalar field')
    return f.with_coeffs(1j * f.grid.components * f.coeffs)


def laplacian(f: SpectralField) -> SpectralField:
    return f.with_coeffs(-f.grid.l2_squared * f.coeffs)


def inv_laplacian(f: SpectralField, mean_tolerance: float = vs.MEAN_TOLERANCE) -> SpectralField:
    """The inverse laplacian on zero-mean fields: ``-f_k / |k|_e^2`` for ``k != 0`` and 0 on the mean mode.

    Raises:
        NonZeroMeanError: if some component has ``|f_0| > mean_tolerance * ||f||_l1``.
    """
    mean = float(np.abs(mean_mode(f)).max())
    tolerance = mean_tolerance * l1_norm(f)
    if mean > tolerance:
        raise NonZeroMeanError(mean, tolerance)
    return f.with_coeffs(inv_laplacian_multiplier(f.grid) * f.coeffs)


def d_multiplier(f: SpectralField) -> SpectralField:
    """``D``, multiplying mode ``k`` by ``|k|_1``."""
    return f.with_coeffs(f.grid.l1 * f.coeffs)


def leray_project(v: SpectralField) -> SpectralField:
    """Removes the gradient part of a vector field with the multiplier ``I - k k^T / |k|_e^2``."""
    check_components(v, v.dim, 'a vector field')
    return v.with_coeffs(apply_matrix(leray_multiplier(v.grid), v.coeffs))


# ======================================================================================================================
#                                                 SEMIGROUPS
# ======================================================================================================================

@docstring_formatter(**docstrings)
def heat_semigroup(f: SpectralField, tau: float, nu: float) -> SpectralField:
    """The heat semigroup ``S^tau``, multiplying mode ``k`` by ``exp(-nu |k|_e^2 tau)``.

    Args:
        f: {field}
        tau: The (nonnegative) time step.
        nu: {viscosity}
    """
    if tau < 0:
        raise ValueError(f'The heat semigroup is only defined forward in time, got tau={tau}')
    return f.with_coeffs(heat_multiplier(f.grid, tau, nu) * f.coeffs)


@docstring_formatter(**docstrings)
def p_semigroup(f: SpectralField, lam: float, rho: float) -> SpectralField:
    """The majorant semigroup ``P_rho^lam``, multiplying mode ``k`` by ``exp(-lam |k|_e^2 rho)``.

    Args:
        f: {field}
        lam: The (nonnegative) time step.
        rho: {rho}
    """
    if lam < 0:
        raise ValueError(f'The majorant semigroup is only defined forward in time, got lam={lam}')
    return f.with_coeffs(heat_multiplier(f.grid, lam, rho) * f.coeffs)


def lambda_smoothing(f: SpectralField, t: float, nu: float) -> SpectralField:
    """``Lambda^t``, multiplying mode ``k`` by ``exp(-|k|_e t nu / 2)``."""
    if t < 0:
        raise ValueError(f'Lambda smoothing needs t >= 0, got t={t}')
    return f.with_coeffs(lambda_multiplier(f.grid, t, nu) * f.coeffs)


# ======================================================================================================================
#                                                 EVALUATION
# ======================================================================================================================

def evaluate(f: SpectralField, x: Sequence[float], y: Optional[Sequence[float]] = None) -> np.ndarray:
    """The truncated series at the complex point ``x + iy``: ``sum_k f_k exp(i(k, x) - (k, y))`` for every component."""
    k = f.grid.components
    x = np.asarray(x, dtype=float).reshape((f.dim,) + (1,) * f.dim)
    y = np.zeros_like(x) if y is None else np.asarray(y, dtype=float).reshape((f.dim,) + (1,) * f.dim)
    phase = np.exp(1j * (k * x).sum(axis=0) - (k * y).sum(axis=0))
    return (f.coeffs * phase).sum(axis=spatial_axes(f.dim))


def evaluate_on_grid(f: SpectralField, y: Optional[Sequence[float]] = None, samples: Optional[int] = None) -> np.ndarray:
    """Values at ``x_p = 2 pi p / S + iy`` for all ``p`` in ``{0, ..., S-1}^n``, shape ``(m, S, ..., S)``.

    With ``S >= 2N+1`` (the default) the inverse transform is exact; coarser grids fall back to direct summation.
    """
    grid = f.grid
    samples = grid.side if samples is None else samples
    shifted = f.coeffs
    if y is not None:
        y = np.asarray(y, dtype=float).reshape((f.dim,) + (1,) * f.dim)
        shifted = shifted * np.exp(-(grid.components * y).sum(axis=0))

    if samples >= grid.side:
        padded = np.zeros((f.components,) + (samples,) * f.dim, dtype=np.complex128)
        idx = grid.axis % samples
        padded[(slice(None),) + np.ix_(*[idx] * f.dim)] = shifted
        return np.fft.ifftn(padded, axes=spatial_axes(f.dim)) * samples ** f.dim

    # Direct summation, one 1d pass per axis
    values = shifted
    nodes = 2 * np.pi * np.arange(samples) / samples
    phases = np.exp(1j * np.outer(grid.axis, nodes))  # (2N+1, S)
    for axis in range(f.dim):
        values = np.moveaxis(np.tensordot(values, phases, axes=([1 + axis], [0])), -1, 1 + axis)
    return values

"""The projected nonlinearity ``B(v)^k = A^k_l d_j (v^j v^l)`` and the pressure, with ``A^k_l = inv_lap d_k d_l - delta_kl``.

``A^k_l`` is the mode-wise multiplier ``q_k q_l / |q|_e^2 - delta_kl`` (``-delta_kl`` on the mean mode); applied to
``d_j (v^j v^l)`` it yields the Leray projection of ``-(v, grad) v`` for solenoidal ``v``.
"""

import numpy as np

from torusflow.commons.miscellaneous import get_torusflow_logger
from torusflow.spectral.convolution import ConvolutionMethod, convolve_direct, from_physical, to_physical
from torusflow.spectral.fields import SpectralField, check_components, get_grid, reflect
from torusflow.spectral.operators import apply_matrix, inv_laplacian_multiplier, projection_multiplier

logger = get_torusflow_logger(__name__)


def a_operator(u: SpectralField, k: int, l: int) -> SpectralField:
    """Applies ``A^k_l`` to a scalar field. Component indices are numbered from 0."""
    check_components(u, 1, 'a scalar field')
    return u.with_coeffs(projection_multiplier(u.grid)[k, l] * u.coeffs)


def velocity_products(coeffs: np.ndarray, dim: int, method: ConvolutionMethod = 'fast') -> np.ndarray:
    """The Galerkin products ``P^{jl} = (v^j v^l)`` of shape ``(..., n, n, *spatial)`` for velocity coefficients of
    shape ``(..., n, *spatial)``."""
    if method == 'direct':
        rows = [np.stack([convolve_direct(np.take(coeffs, j, axis=-dim - 1), np.take(coeffs, l, axis=-dim - 1), dim)
                          for l in range(dim)], axis=-dim - 1)
                for j in range(dim)]
        return np.stack(rows, axis=-dim - 2)

    trunc = (coeffs.shape[-1] - 1) // 2
    physical = to_physical(coeffs, dim)
    pointwise = np.expand_dims(physical, axis=-dim - 1) * np.expand_dims(physical, axis=-dim - 2)
    return from_physical(pointwise, dim, trunc)


def nonlinear_coeffs(coeffs: np.ndarray, dim: int, method: ConvolutionMethod = 'fast') -> np.ndarray:
    """``B(v)`` on raw velocity coefficients; leading axes are batch axes."""
    grid = get_grid(dim, (coeffs.shape[-1] - 1) // 2)
    products = velocity_products(coeffs, dim, method)
    # T^l = sum_j i q_j P^{jl}
    transport = (1j * grid.components[:, None] * products).sum(axis=-dim - 2)
    return apply_matrix(projection_multiplier(grid), transport)


def pressure_coeffs(coeffs: np.ndarray, dim: int, method: ConvolutionMethod = 'fast') -> np.ndarray:
    """``p = -inv_lap d_i d_j (v^i v^j)`` on raw velocity coefficients, with zero mean. Output shape ``(..., 1, *spatial)``."""
    grid = get_grid(dim, (coeffs.shape[-1] - 1) // 2)
    products = velocity_products(coeffs, dim, method)
    k = grid.components
    hessian = -(k[:, None] * k[None, :] * products).sum(axis=(-dim - 2, -dim - 1))
    return np.expand_dims(-inv_laplacian_multiplier(grid) * hessian, axis=-dim - 1)


def symmetrize(coeffs: np.ndarray, dim: int) -> np.ndarray:
    """Projects coefficients onto conjugate-symmetric (real-valued) series."""
    return 0.5 * (coeffs + np.conj(reflect(coeffs, dim)))


def nonlinear_term(v: SpectralField, method: ConvolutionMethod = 'fast') -> SpectralField:
    """The projected nonlinearity ``B(v)`` of a solenoidal velocity field. The output is solenoidal by construction."""
    check_components(v, v.dim, 'a velocity field')
    coeffs = nonlinear_coeffs(v.coeffs, v.dim, method)
    return v.with_coeffs(symmetrize(coeffs, v.dim) if v.real else coeffs)


def pressure_recover(v: SpectralField, method: ConvolutionMethod = 'fast') -> SpectralField:
    """The pressure ``p = -inv_lap d_i d_j (v^i v^j)`` in the zero-mean gauge."""
    check_components(v, v.dim, 'a velocity field')
    coeffs = pressure_coeffs(v.coeffs, v.dim, method)
    return v.with_coeffs(symmetrize(coeffs, v.dim) if v.real else coeffs)

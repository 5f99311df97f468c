"""Exact (alias-free) Galerkin products of truncated series.

The product of two series supported on ``|k|_inf <= N`` is supported on ``|k|_inf <= 2N``; its Galerkin truncation keeps
the coefficients back on the cube ``|k|_inf <= N``. Two interchangeable implementations are provided: a direct double
loop over the cube, used as an oracle, and a zero-padded fast transform with ``L = 4N + 2 >= 2 (2N + 1) - 1`` points per
axis, for which the cyclic convolution coincides with the linear one.
"""

import itertools
from typing import Literal

import numpy as np

from torusflow.commons import variables as vs
from torusflow.commons.exceptions import ShapeMismatchError
from torusflow.commons.miscellaneous import get_torusflow_logger
from torusflow.spectral.fields import SpectralField, check_compatible, spatial_axes

logger = get_torusflow_logger(__name__)

ConvolutionMethod = Literal['fast', 'direct', 'auto']


def padded_length(trunc: int) -> int:
    return 4 * trunc + 2


def _cube_index(dim: int, trunc: int, length: int) -> tuple:
    idx = np.arange(-trunc, trunc + 1) % length
    return (Ellipsis,) + np.ix_(*[idx] * dim)


def to_physical(coeffs: np.ndarray, dim: int) -> np.ndarray:
    """Samples the series on the padded ``L^n`` grid. Leading axes of ``coeffs`` are batch axes."""
    trunc = (coeffs.shape[-1] - 1) // 2
    length = padded_length(trunc)
    padded = np.zeros(coeffs.shape[:-dim] + (length,) * dim, dtype=np.complex128)
    padded[_cube_index(dim, trunc, length)] = coeffs
    return np.fft.ifftn(padded, axes=spatial_axes(dim)) * length ** dim


def from_physical(values: np.ndarray, dim: int, trunc: int) -> np.ndarray:
    """Coefficients of padded-grid samples, truncated back to the cube ``|k|_inf <= trunc``."""
    length = values.shape[-1]
    spectrum = np.fft.fftn(values, axes=spatial_axes(dim)) / length ** dim
    return spectrum[_cube_index(dim, trunc, length)]


def convolve_fast(a: np.ndarray, b: np.ndarray, dim: int) -> np.ndarray:
    """Galerkin product of two coefficient arrays via the padded transform. Leading axes broadcast."""
    trunc = (a.shape[-1] - 1) // 2
    return from_physical(to_physical(a, dim) * to_physical(b, dim), dim, trunc)


def _shifted_slices(shift: int, trunc: int) -> tuple:
    side = 2 * trunc + 1
    source = slice(max(0, -shift), min(side, side - shift))
    destination = slice(max(0, shift), min(side, side + shift))
    return source, destination


def convolve_direct(a: np.ndarray, b: np.ndarray, dim: int) -> np.ndarray:
    """Galerkin product by the double sum ``(ab)_k = sum_{j+m=k} a_j b_m``, looping over ``j`` in lexicographic order.

    Leading axes broadcast. The loop order is fixed, so the floating point reduction order is reproducible.
    """
    trunc = (a.shape[-1] - 1) // 2
    batch = np.broadcast_shapes(a.shape[:-dim], b.shape[:-dim])
    out = np.zeros(batch + a.shape[-dim:], dtype=np.complex128)
    for j in itertools.product(range(-trunc, trunc + 1), repeat=dim):
        a_j = a[(Ellipsis,) + tuple(j_i + trunc for j_i in j)][(Ellipsis,) + (None,) * dim]
        slices = [_shifted_slices(j_i, trunc) for j_i in j]
        source = (Ellipsis,) + tuple(s for s, _ in slices)
        destination = (Ellipsis,) + tuple(d for _, d in slices)
        out[destination] += a_j * b[source]
    return out


def convolve_arrays(a: np.ndarray, b: np.ndarray, dim: int, method: ConvolutionMethod = 'fast') -> np.ndarray:
    if method == 'auto':
        method = 'direct' if (a.shape[-1] - 1) // 2 <= vs.DIRECT_CONVOLUTION_MAX_TRUNC and dim <= 2 else 'fast'
    if method == 'fast':
        return convolve_fast(a, b, dim)
    elif method == 'direct':
        return convolve_direct(a, b, dim)
    raise ValueError(f'Unknown convolution method {method!r}')


def convolve(f: SpectralField, g: SpectralField, method: ConvolutionMethod = 'fast') -> SpectralField:
    """Fourier coefficients of the pointwise product ``fg``, Galerkin-truncated to the common cube.

    Component counts must agree, unless one of the two fields is scalar, in which case it multiplies every component of
    the other.

    Args:
        f: The first factor.
        g: The second factor.
        method: ``'fast'`` (padded transform), ``'direct'`` (double loop) or ``'auto'`` (direct for small 2d cubes).
    """
    check_compatible(f, g, same_components=False)
    if f.components != g.components and 1 not in (f.components, g.components):
        raise ShapeMismatchError(f'Cannot multiply fields with {f.components} and {g.components} components')
    product = convolve_arrays(f.coeffs, g.coeffs, f.dim, method)
    real = f.real and g.real
    if real:  # Products of real series are real up to roundoff
        product = 0.5 * (product + np.conj(np.flip(product, axis=spatial_axes(f.dim))))
    return SpectralField(product, real=real, check=False)

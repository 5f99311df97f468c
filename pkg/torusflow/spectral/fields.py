"""Truncated Fourier representation of periodic fields on the n-torus.

A field is stored as a complex array of shape ``(m, 2N+1, ..., 2N+1)``: one leading axis for the ``m`` components followed
by ``n`` spatial axes. The coefficient of the wavevector ``k`` (with ``|k|_inf <= N``) sits at index ``k + N`` along each
spatial axis, so that reversing every spatial axis maps ``k`` to ``-k``. Iterating over the array in C order visits the
wavevectors in lexicographic order.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, Optional, Sequence, Union

import numpy as np
from lazy_objects.lazy_objects import lazy_property

from torusflow.commons import variables as vs
from torusflow.commons.docstrings import docstring_formatter, docstrings
from torusflow.commons.exceptions import ShapeMismatchError
from torusflow.commons.miscellaneous import get_torusflow_logger

logger = get_torusflow_logger(__name__)


@dataclass(frozen=True)
class Wavevector:
    """An integer wavevector ``k`` of Z^n with its three norms."""

    k: vs.WavevectorType

    def __post_init__(self):
        object.__setattr__(self, 'k', tuple(int(k_j) for k_j in self.k))

    @property
    def dim(self) -> int:
        return len(self.k)

    @property
    def norm_l1(self) -> int:
        return sum(abs(k_j) for k_j in self.k)

    @property
    def norm_l2(self) -> float:
        return float(np.sqrt(sum(k_j ** 2 for k_j in self.k)))

    @property
    def norm_linf(self) -> int:
        return max(abs(k_j) for k_j in self.k)

    @property
    def weight(self) -> int:
        """``max(|k|_1, 1)``, the weight of the smoothness norms (the mean mode gets weight 1)."""
        return max(self.norm_l1, 1)


def lower_norm_constant(dim: int) -> float:
    """The sharp constant ``c`` such that ``c |k|_1 <= |k|_e`` on Z^n, i.e. ``1 / sqrt(n)``."""
    return 1. / np.sqrt(dim)


def _read_only(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


class WavevectorGrid:
    """All the wavevectors of the cube ``|k|_inf <= N`` in Z^n, laid out as the spatial axes of a ``SpectralField``.

    Derived arrays are computed lazily, once, and are read-only. Use ``get_grid`` to share instances.
    """

    def __init__(self, dim: int, trunc: int):
        if dim < 1 or trunc < 0:
            raise ShapeMismatchError(f'Invalid grid dimension {dim} or truncation {trunc}')
        self.dim = dim
        self.trunc = trunc

    @property
    def side(self) -> int:
        return 2 * self.trunc + 1

    @property
    def shape(self) -> tuple:
        return (self.side,) * self.dim

    @property
    def size(self) -> int:
        return self.side ** self.dim

    @lazy_property
    def axis(self) -> np.ndarray:
        return _read_only(np.arange(-self.trunc, self.trunc + 1))

    @lazy_property
    def components(self) -> np.ndarray:
        """The wavevector coordinates, shape ``(n, 2N+1, ..., 2N+1)``, as floats."""
        return _read_only(np.stack(np.meshgrid(*[self.axis] * self.dim, indexing='ij')).astype(float))

    @lazy_property
    def l1(self) -> np.ndarray:
        return _read_only(np.abs(self.components).sum(axis=0))

    @lazy_property
    def l2_squared(self) -> np.ndarray:
        return _read_only((self.components ** 2).sum(axis=0))

    @lazy_property
    def l2(self) -> np.ndarray:
        return _read_only(np.sqrt(self.l2_squared))

    @lazy_property
    def linf(self) -> np.ndarray:
        return _read_only(np.abs(self.components).max(axis=0))

    @lazy_property
    def weights(self) -> np.ndarray:
        """``w(k) = max(|k|_1, 1)``."""
        return _read_only(np.maximum(self.l1, 1.))

    @lazy_property
    def l2_squared_safe(self) -> np.ndarray:
        """``|k|_e^2`` with the mean mode replaced by 1, for divisions."""
        safe = self.l2_squared.copy()
        safe[self.origin] = 1.
        return _read_only(safe)

    @lazy_property
    def nonzero(self) -> np.ndarray:
        mask = np.ones(self.shape, dtype=bool)
        mask[self.origin] = False
        return _read_only(mask)

    @property
    def origin(self) -> tuple:
        return (self.trunc,) * self.dim

    def index(self, k: Sequence[int]) -> tuple:
        """The array index of wavevector ``k``."""
        if len(k) != self.dim:
            raise ShapeMismatchError(f'Wavevector {tuple(k)} does not have {self.dim} coordinates')
        if max(abs(int(k_j)) for k_j in k) > self.trunc:
            raise ShapeMismatchError(f'Wavevector {tuple(k)} lies outside the cube |k|_inf <= {self.trunc}')
        return tuple(int(k_j) + self.trunc for k_j in k)

    def wavevectors(self) -> Iterator[vs.WavevectorType]:
        """Iterates over the cube in lexicographic order, which is the C order of the coefficient arrays."""
        return itertools.product(range(-self.trunc, self.trunc + 1), repeat=self.dim)


@lru_cache(maxsize=None)
def get_grid(dim: int, trunc: int) -> WavevectorGrid:
    return WavevectorGrid(dim, trunc)


def spatial_axes(dim: int) -> tuple:
    """The trailing axes of a coefficient array holding the wavevectors."""
    return tuple(range(-dim, 0))


def reflect(coeffs: np.ndarray, dim: int) -> np.ndarray:
    """Maps the coefficient of ``k`` to the slot of ``-k``."""
    return np.flip(coeffs, axis=spatial_axes(dim))


def is_conjugate_symmetric(coeffs: np.ndarray, dim: int, rtol: float = 1e-12) -> bool:
    scale = np.abs(coeffs).max(initial=0.)
    return bool(np.abs(coeffs - np.conj(reflect(coeffs, dim))).max(initial=0.) <= rtol * scale)


class SpectralField:
    """Immutable truncated Fourier series of a field with ``m`` components on T^n.

    ``SpectralField`` objects are usually built with ``SpectralField.from_modes()`` or ``SpectralField.zeros()``. The
    ``real`` flag marks the series of real-valued fields, whose coefficients satisfy ``f_{-k} = conj(f_k)``.
    """

    def __init__(self, coeffs: np.ndarray, real: bool = False, check: bool = True):
        """Default constructor.

        Args:
            coeffs: Array of shape ``(m, 2N+1, ..., 2N+1)`` with ``n >= 2`` spatial axes and ``N >= 1``.
            real: Whether the field is real-valued.
            check: Whether to validate finiteness and conjugate symmetry. Internal callers producing coefficients from
                already validated fields may skip it.
        """
        coeffs = np.array(coeffs, dtype=np.complex128)
        if coeffs.ndim < 3:
            raise ShapeMismatchError(f'Expected a (components, *spatial) array with at least 2 spatial axes, got shape {coeffs.shape}')
        side = coeffs.shape[1]
        if side < 3 or side % 2 == 0 or any(s != side for s in coeffs.shape[1:]):
            raise ShapeMismatchError(f'Spatial axes must all have the same odd length 2N+1 >= 3, got shape {coeffs.shape}')
        if coeffs.shape[0] < 1:
            raise ShapeMismatchError('A field needs at least one component')

        if check:
            if not np.all(np.isfinite(coeffs)):
                raise ValueError('Spectral coefficients must be finite')
            if real and not is_conjugate_symmetric(coeffs, coeffs.ndim - 1):
                raise ValueError('Field flagged as real but its coefficients are not conjugate-symmetric')

        coeffs.flags.writeable = False
        self._coeffs = coeffs
        self.real = bool(real)

    # ================ CONSTRUCTORS ====================================================================================
    @classmethod
    def zeros(cls, dim: int, trunc: int, components: int = 1) -> 'SpectralField':
        return cls(np.zeros((components,) + get_grid(dim, trunc).shape, dtype=np.complex128), real=True, check=False)

    @classmethod
    def from_modes(cls,
                   dim: int,
                   trunc: int,
                   modes: Dict[vs.WavevectorType, Union[complex, Sequence[complex]]],
                   components: int = 1,
                   real: Optional[bool] = None) -> 'SpectralField':
        """Builds a field from a ``{k: coefficient}`` mapping.

        Args:
            dim: The space dimension ``n``.
            trunc: The truncation ``N``.
            modes: Maps wavevectors to a scalar coefficient (broadcast to every component) or to one coefficient per
                component.
            components: The number of components ``m``.
            real: The real-valuedness flag. If ``None``, it is inferred from the conjugate symmetry of the coefficients.
        """
        grid = get_grid(dim, trunc)
        coeffs = np.zeros((components,) + grid.shape, dtype=np.complex128)
        for k, value in modes.items():
            coeffs[(slice(None),) + grid.index(k)] = value
        if real is None:
            real = is_conjugate_symmetric(coeffs, dim)
        return cls(coeffs, real=real)

    @classmethod
    def stack(cls, fields: Sequence['SpectralField']) -> 'SpectralField':
        """Concatenates the components of ``fields``."""
        check_compatible(*fields)
        return cls(np.concatenate([f.coeffs for f in fields]), real=all(f.real for f in fields), check=False)

    def with_coeffs(self, coeffs: np.ndarray, real: Optional[bool] = None) -> 'SpectralField':
        """A new field on the same cube, keeping the real flag unless told otherwise."""
        return SpectralField(coeffs, real=self.real if real is None else real, check=False)

    # ================ SHAPE ===========================================================================================
    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def components(self) -> int:
        return self._coeffs.shape[0]

    @property
    def dim(self) -> int:
        return self._coeffs.ndim - 1

    @property
    def trunc(self) -> int:
        return (self._coeffs.shape[1] - 1) // 2

    @property
    def grid(self) -> WavevectorGrid:
        return get_grid(self.dim, self.trunc)

    def coeff(self, k: Sequence[int], component: int = 0) -> complex:
        return complex(self._coeffs[(component,) + self.grid.index(k)])

    def component(self, i: int) -> 'SpectralField':
        return SpectralField(self._coeffs[i:i + 1], real=self.real, check=False)

    # ================ ALGEBRA =========================================================================================
    def __add__(self, other: 'SpectralField') -> 'SpectralField':
        check_compatible(self, other)
        return SpectralField(self._coeffs + other.coeffs, real=self.real and other.real, check=False)

    def __sub__(self, other: 'SpectralField') -> 'SpectralField':
        check_compatible(self, other)
        return SpectralField(self._coeffs - other.coeffs, real=self.real and other.real, check=False)

    def __neg__(self) -> 'SpectralField':
        return self.with_coeffs(-self._coeffs)

    def __mul__(self, scalar: complex) -> 'SpectralField':
        return self.with_coeffs(self._coeffs * scalar, real=self.real and np.isreal(scalar))

    __rmul__ = __mul__

    def __repr__(self):
        return f'SpectralField(dim={self.dim}, trunc={self.trunc}, components={self.components}, real={self.real})'


@docstring_formatter(**docstrings)
def check_compatible(*fields: SpectralField, same_components: bool = True):
    """Raises ``ShapeMismatchError`` unless all ``fields`` share dimension and truncation (and component count if
    ``same_components``).

    Args:
        fields: {field}
        same_components: Whether component counts must agree as well.
    """
    reference = fields[0]
    for f in fields[1:]:
        if f.dim != reference.dim or f.trunc != reference.trunc:
            raise ShapeMismatchError(f'Fields disagree: (n={reference.dim}, N={reference.trunc}) vs (n={f.dim}, N={f.trunc})')
        if same_components and f.components != reference.components:
            raise ShapeMismatchError(f'Fields disagree on component count: {reference.components} vs {f.components}')


def check_components(f: SpectralField, components: int, name: str = 'field'):
    if f.components != components:
        raise ShapeMismatchError(f'Expected {name} with {components} components, got {f.components}')

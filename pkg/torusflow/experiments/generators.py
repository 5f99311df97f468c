"""Divergence-free initial velocities, built from the ``initial_data`` section of a manifest."""

from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from torusflow.commons import variables as vs
from torusflow.commons.exceptions import ConfigError, ShapeMismatchError
from torusflow.commons.miscellaneous import get_torusflow_logger
from torusflow.navier_stokes.diagnostics import taylor_green
from torusflow.navier_stokes.projection import symmetrize
from torusflow.spectral.fields import SpectralField, get_grid
from torusflow.spectral.operators import divergence, l1_norm, leray_project
from torusflow.spectral.serialization import read_field

logger = get_torusflow_logger(__name__)


def single_mode(dim: int, trunc: int, k, direction, amplitude: float = 1.) -> SpectralField:
    """``amplitude * P(direction) cos((k, x))``, with ``P`` the Leray projection.

    ``P`` is the identity if ``(k, direction) = 0``.
    """
    if len(k) != dim or len(direction) != dim:
        raise ConfigError(f'k and direction need {dim} entries, got {list(k)} and {list(direction)}', field='k')
    if max(abs(k_i) for k_i in k) > trunc:
        raise ConfigError(f'mode {list(k)} lies outside the cube |k|_inf <= {trunc}', field='k')
    coefficient = 0.5 * amplitude * np.asarray(direction, dtype=float)
    if not any(k):
        coefficient = 2. * coefficient  # cos(0) = 1 is carried by a single coefficient
    modes = {tuple(k): coefficient, tuple(-k_i for k_i in k): coefficient}
    return leray_project(SpectralField.from_modes(dim, trunc, modes, components=dim, real=True))


def random_hs(dim: int, trunc: int, s: float, amplitude: float, rng: np.random.Generator) -> SpectralField:
    """Random real solenoidal field with coefficients of modulus about ``amplitude w(k)^-(s + n + 1)``, so that
    ``||.||_s`` is of the order of ``amplitude sum_k w(k)^-(n + 1)``."""
    grid = get_grid(dim, trunc)
    shape = (dim,) + grid.shape
    moduli = amplitude * grid.weights ** -(s + dim + 1) * rng.uniform(0.5, 1., size=shape)
    phases = np.exp(1j * rng.uniform(0., 2. * np.pi, size=shape))
    coeffs = symmetrize(moduli * phases, dim)
    return leray_project(SpectralField(coeffs, real=True))


def divergence_residual(v_hat: SpectralField) -> float:
    """``||div v||_l1 / sum_k |k|_e |v_k|``, the divergence relative to the scale of the gradient."""
    residual = l1_norm(divergence(v_hat))
    scale = float((np.abs(v_hat.coeffs) * v_hat.grid.l2).sum())
    return residual / scale if scale > 0 else 0.


def check_solenoidal(v_hat: SpectralField, tolerance: float, source: str) -> float:
    """Returns ``divergence_residual(v_hat)``.

    Raises:
        ConfigError: if ``v_hat`` is not a velocity field, or its relative divergence exceeds ``tolerance``.
    """
    try:
        residual = divergence_residual(v_hat)
    except ShapeMismatchError as e:
        raise ConfigError(str(e), field='initial_data') from e
    if residual > tolerance:
        raise ConfigError(f'{source} initial data are not divergence-free: '
                          f'relative ||div||_l1 = {residual:.3e} exceeds {tolerance:.0e}', field='initial_data')
    logger.debug(f'{source} initial data, relative ||div||_l1 = {residual:.3e}')
    return residual


def generate_initial(spec: Dict[str, Any], dim: int, trunc: int, seed: int = 0) -> SpectralField:
    """Builds the initial velocity of a manifest.

    Args:
        spec: Either ``{'path': ...}`` to a field file, or ``{'generator': ..., **parameters}`` with the generators
            ``taylor-green`` (``amplitude``, ``swapped``; ``n = 2`` only), ``single-mode`` (``k``, ``direction``,
            ``amplitude``) and ``random-hs`` (``s``, ``amplitude``, ``seed``).
        dim: The space dimension.
        trunc: The truncation.
        seed: The seed used by ``random-hs`` when the entry has none.

    Raises:
        ConfigError: for unknown generators, invalid parameters, data that does not match ``(dim, trunc)``, or data
            that is not divergence-free (``GENERATED_DIVERGENCE_TOLERANCE`` for generators, ``DIVERGENCE_TOLERANCE``
            for field files).
    """
    if 'path' in spec:
        v_hat = read_field(Path(spec['path']))
        if v_hat.dim != dim or v_hat.trunc != trunc or v_hat.components != dim:
            raise ConfigError(f'the field file holds (n={v_hat.dim}, N={v_hat.trunc}, m={v_hat.components}), '
                              f'expected (n={dim}, N={trunc}, m={dim})', field='initial_data')
        check_solenoidal(v_hat, vs.DIVERGENCE_TOLERANCE, 'File')
        return v_hat

    generator: Optional[str] = spec.get('generator')
    amplitude = float(spec.get('amplitude', 1.))
    if generator == 'taylor-green':
        if dim != 2:
            raise ConfigError(f'the Taylor-Green vortex needs n = 2, got n = {dim}', field='generator')
        v_hat = taylor_green(trunc, amplitude, swapped=bool(spec.get('swapped', False)))
    elif generator == 'single-mode':
        k = spec.get('k', [0] * (dim - 1) + [1])
        direction = spec.get('direction', [1.] + [0.] * (dim - 1))
        v_hat = single_mode(dim, trunc, k, direction, amplitude)
    elif generator == 'random-hs':
        rng = np.random.default_rng(int(spec.get('seed', seed)))
        v_hat = random_hs(dim, trunc, float(spec.get('s', 2.)), amplitude, rng)
    else:
        raise ConfigError(f'unknown generator {generator!r}', field='generator')

    check_solenoidal(v_hat, vs.GENERATED_DIVERGENCE_TOLERANCE, f'Generated {generator}')
    return v_hat

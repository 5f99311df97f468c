"""This module contains sample objects used as fixtures across the test suite."""

import numpy as np

from torusflow.commons.miscellaneous import ROOT_LOGGER, get_torusflow_logger
from torusflow.navier_stokes.diagnostics import taylor_green
from torusflow.navier_stokes.projection import symmetrize
from torusflow.spectral.config import SolverConfig
from torusflow.spectral.fields import SpectralField, get_grid

ROOT_LOGGER.setLevel('DEBUG')
logger = get_torusflow_logger(__name__)

# Wavevectors
sample_wavevectors = {'base': (3, -4),
                      'zero': (0, 0),
                      'axis': (0, 1),
                      '3d': (1, -2, 2)}

# Scalar fields
sample_cos_x1 = SpectralField.from_modes(2, 4, {(1, 0): 0.5, (-1, 0): 0.5})  # cos x1
sample_sin_x2 = SpectralField.from_modes(2, 4, {(0, 1): -0.5j, (0, -1): 0.5j})  # sin x2
sample_exp_ix1 = SpectralField.from_modes(2, 4, {(1, 0): 1.})  # exp(i x1), complex-valued


def random_field(dim: int, trunc: int, seed: int = 0, components: int = 1, real: bool = True) -> SpectralField:
    """A field with random coefficients decaying like ``exp(-|k|_1 / 2)``."""
    rng = np.random.default_rng(seed)
    grid = get_grid(dim, trunc)
    shape = (components,) + grid.shape
    coeffs = (rng.normal(size=shape) + 1j * rng.normal(size=shape)) * np.exp(-0.5 * grid.l1)
    if real:
        coeffs = symmetrize(coeffs, dim)
    return SpectralField(coeffs, real=real)


# Velocities
sample_taylor_green = taylor_green(trunc=8)
sample_taylor_green_swapped = taylor_green(trunc=8, swapped=True)
sample_shear = SpectralField.from_modes(2, 4, {(0, 1): (0.5, 0.), (0, -1): (0.5, 0.)}, components=2)  # (cos x2, 0)

# Configurations
sample_config = SolverConfig(dim=2, trunc=8, viscosity=1., horizon=1., time_steps=32)
sample_small_config = SolverConfig(dim=2, trunc=4, viscosity=1., horizon=0.5, time_steps=16)
sample_config_3d = SolverConfig(dim=3, trunc=3, viscosity=1., horizon=0.5, time_steps=16)

# Manifests
sample_manifest_dict = {'version': 1,
                        'experiment': 'solve',
                        'config': {'dim': 2, 'trunc': 4, 'viscosity': 1., 'horizon': 0.25, 'time_steps': 8},
                        'initial_data': {'generator': 'taylor-green', 'amplitude': 1.},
                        'seed': 0}

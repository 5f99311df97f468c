import numpy as np
import pytest

import tests.sample_objects as so
from torusflow.commons.exceptions import ShapeMismatchError
from torusflow.spectral.fields import SpectralField, Wavevector, get_grid, is_conjugate_symmetric, lower_norm_constant


def test_wavevector_norms():
    k = Wavevector(so.sample_wavevectors['base'])
    assert k.norm_l1 == 7
    assert k.norm_l2 == 5.
    assert k.norm_linf == 4
    assert Wavevector(so.sample_wavevectors['zero']).weight == 1


@pytest.mark.parametrize('k', [(3, -4), (0, 1), (1, -2, 2), (5, 5, 5, 5)])
def test_norm_equivalence(k):
    k = Wavevector(k)
    assert lower_norm_constant(k.dim) * k.norm_l1 <= k.norm_l2 + 1e-14
    assert k.norm_l2 <= k.norm_l1


def test_grid_layout():
    grid = get_grid(2, 3)
    assert grid.shape == (7, 7)
    assert grid.index((0, 0)) == grid.origin == (3, 3)
    assert grid.index((-3, 2)) == (0, 5)
    assert grid.l1[grid.index((-3, 2))] == 5
    assert list(grid.wavevectors())[:2] == [(-3, -3), (-3, -2)]
    assert get_grid(2, 3) is grid
    with pytest.raises(ShapeMismatchError):
        grid.index((4, 0))


def test_from_modes():
    f = so.sample_cos_x1
    assert f.real
    assert f.coeff((1, 0)) == 0.5
    assert f.coeff((0, 1)) == 0.
    assert not so.sample_exp_ix1.real


def test_real_flag_requires_conjugate_symmetry():
    coeffs = so.sample_exp_ix1.coeffs
    assert not is_conjugate_symmetric(coeffs, 2)
    with pytest.raises(ValueError):
        SpectralField(coeffs, real=True)


@pytest.mark.parametrize('bad_shape', [(1, 4, 4), (1, 5, 3), (1, 1, 1), (5,)])
def test_invalid_shapes(bad_shape):
    with pytest.raises(ShapeMismatchError):
        SpectralField(np.zeros(bad_shape))


def test_non_finite_coefficients_are_rejected():
    coeffs = np.zeros((1, 3, 3), dtype=complex)
    coeffs[0, 0, 0] = np.nan
    with pytest.raises(ValueError):
        SpectralField(coeffs)


def test_fields_are_immutable():
    with pytest.raises(ValueError):
        so.sample_cos_x1.coeffs[0, 0, 0] = 1.


def test_algebra():
    f = so.sample_cos_x1 + so.sample_sin_x2
    assert f.real
    assert (f - so.sample_sin_x2).coeff((1, 0)) == 0.5
    assert (2 * f).coeff((1, 0)) == 1.
    assert not (1j * f).real
    with pytest.raises(ShapeMismatchError):
        f + SpectralField.zeros(2, 5)

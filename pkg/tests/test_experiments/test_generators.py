import numpy as np
import pytest

from torusflow.commons import variables as vs
from torusflow.commons.exceptions import ConfigError
from torusflow.experiments.generators import (check_solenoidal, divergence_residual, generate_initial, random_hs,
                                              single_mode)
from torusflow.navier_stokes.diagnostics import taylor_green
from torusflow.spectral.fields import SpectralField, get_grid
from torusflow.spectral.operators import divergence, evaluate, l1_norm, norm_hs
from torusflow.spectral.serialization import write_field


def test_taylor_green():
    v = generate_initial({'generator': 'taylor-green', 'amplitude': 2.}, 2, 4)
    assert l1_norm(divergence(v)) == 0.
    assert np.array_equal(v.coeffs, taylor_green(4, 2.).coeffs)
    swapped = generate_initial({'generator': 'taylor-green', 'swapped': True}, 2, 4)
    assert np.array_equal(swapped.coeffs, taylor_green(4, swapped=True).coeffs)


def test_taylor_green_needs_two_dimensions():
    with pytest.raises(ConfigError) as e:
        generate_initial({'generator': 'taylor-green'}, 3, 4)
    assert e.value.field == 'generator'


def test_single_mode_orthogonal_to_its_wavevector_is_kept():
    v = single_mode(3, 3, (1, 2, 0), (2., -1., 0.5), amplitude=1.)
    x = np.array([0.3, -1.2, 2.])
    assert np.allclose(evaluate(v, x), np.array([2., -1., 0.5]) * np.cos(0.3 - 2.4))
    assert l1_norm(divergence(v)) <= 1e-15


def test_single_mode_is_projected():
    v = single_mode(2, 2, (1, 0), (1., 1.))
    assert v.coeff((1, 0), 0) == 0.
    assert v.coeff((1, 0), 1) == pytest.approx(0.5)


def test_single_mode_constant():
    v = single_mode(2, 2, (0, 0), (1., 0.), amplitude=3.)
    assert np.allclose(evaluate(v, [1., 2.]), [3., 0.])


def test_single_mode_defaults():
    v = generate_initial({'generator': 'single-mode'}, 3, 2)
    assert v.coeff((0, 0, 1), 0) == pytest.approx(0.5)
    assert v.coeff((0, 0, -1), 0) == pytest.approx(0.5)


@pytest.mark.parametrize('k, direction', [((1, 0, 0), (1., 0.)), ((3, 0), (0., 1.))])
def test_single_mode_errors(k, direction):
    with pytest.raises(ConfigError) as e:
        single_mode(2, 2, k, direction)
    assert e.value.field == 'k'


@pytest.mark.parametrize('dim, trunc', [(2, 8), (3, 4)])
def test_random_hs(dim, trunc):
    v = random_hs(dim, trunc, 2., 1e-3, np.random.default_rng(0))
    assert v.real
    assert l1_norm(divergence(v)) <= 1e-12 * l1_norm(v)
    scale = 1e-3 * float((get_grid(dim, trunc).weights ** -(dim + 1.)).sum())
    assert 0.1 * scale <= norm_hs(v, 2.) <= 10. * scale


def test_random_hs_is_seeded():
    first = generate_initial({'generator': 'random-hs', 'seed': 4}, 2, 4, seed=0)
    second = generate_initial({'generator': 'random-hs'}, 2, 4, seed=4)
    third = generate_initial({'generator': 'random-hs'}, 2, 4, seed=5)
    assert np.array_equal(first.coeffs, second.coeffs)
    assert not np.array_equal(first.coeffs, third.coeffs)


def test_field_files(tmp_path):
    v = taylor_green(4)
    write_field(v, tmp_path / 'v.bin')
    assert np.array_equal(generate_initial({'path': str(tmp_path / 'v.bin')}, 2, 4).coeffs, v.coeffs)
    with pytest.raises(ConfigError) as e:
        generate_initial({'path': str(tmp_path / 'v.bin')}, 2, 5)
    assert e.value.field == 'initial_data'


def test_unknown_generator():
    with pytest.raises(ConfigError):
        generate_initial({'generator': 'vortex'}, 2, 4)


@pytest.mark.parametrize('initial, dim', [({'generator': 'taylor-green'}, 2),
                                       ({'generator': 'single-mode', 'k': [1, 2, 0], 'direction': [1., 1., 1.]}, 3),
                                       ({'generator': 'random-hs', 'amplitude': 500.}, 2),
                                       ({'generator': 'random-hs', 's': -1.}, 3)])
def test_generated_data_are_solenoidal(initial, dim):
    v = generate_initial(initial, dim, 4)
    assert check_solenoidal(v, vs.GENERATED_DIVERGENCE_TOLERANCE, 'Generated') <= 1e-14


def test_divergence_residual():
    compressible = SpectralField.from_modes(2, 4, {(1, 0): (0.5, 0.), (-1, 0): (0.5, 0.)}, components=2)  # (cos x1, 0)
    assert divergence_residual(compressible) == pytest.approx(1.)
    assert divergence_residual(SpectralField.zeros(2, 4, components=2)) == 0.
    with pytest.raises(ConfigError) as e:
        check_solenoidal(compressible, 1e-14, 'Test')
    assert e.value.field == 'initial_data'
    with pytest.raises(ConfigError):
        check_solenoidal(SpectralField.zeros(2, 4), 1e-14, 'Test')


def test_compressible_field_files_are_rejected(tmp_path):
    compressible = SpectralField.from_modes(2, 4, {(1, 0): (0.5, 0.), (-1, 0): (0.5, 0.)}, components=2)
    write_field(compressible, tmp_path / 'v.json')
    with pytest.raises(ConfigError) as e:
        generate_initial({'path': str(tmp_path / 'v.json')}, 2, 4)
    assert e.value.field == 'initial_data'
    assert 'divergence-free' in str(e.value)

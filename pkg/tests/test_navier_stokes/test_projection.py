import numpy as np
import pytest

import tests.sample_objects as so
from torusflow.navier_stokes import projection as pr
from torusflow.spectral.convolution import convolve
from torusflow.spectral.fields import SpectralField, get_grid
from torusflow.spectral.operators import derivative, divergence, l1_norm, leray_project, mean_mode, projection_multiplier


def test_a_operator_multipliers():
    u = SpectralField.from_modes(2, 3, {(1, 0): 1., (0, 1): 1.})
    assert pr.a_operator(u, 0, 0).coeff((1, 0)) == 0.
    assert pr.a_operator(u, 0, 1).coeff((0, 1)) == 0.
    assert pr.a_operator(u, 1, 1).coeff((1, 0)) == -1.
    assert pr.a_operator(SpectralField.from_modes(2, 3, {(0, 0): 1.}), 0, 0).coeff((0, 0)) == -1.


def test_a_operator_is_bounded():
    multiplier = projection_multiplier(get_grid(2, 50))
    assert np.abs(multiplier).max() <= 2.
    u = so.random_field(2, 6)
    for k in range(2):
        for l in range(2):
            assert l1_norm(pr.a_operator(u, k, l)) <= 2. * l1_norm(u)


def test_constant_velocity_has_no_nonlinearity():
    v = SpectralField.from_modes(2, 4, {(0, 0): (0.3, -1.2)}, components=2)
    assert l1_norm(pr.nonlinear_term(v)) <= 1e-14
    assert l1_norm(pr.pressure_recover(v)) <= 1e-14


@pytest.mark.parametrize('method', ['fast', 'direct'])
def test_taylor_green_is_a_steady_euler_flow(method):
    assert l1_norm(pr.nonlinear_term(so.sample_taylor_green, method)) <= 1e-13


def test_nonlinear_term_matches_brute_force():
    v = leray_project(so.random_field(2, 6, seed=3, components=2))
    fast = pr.nonlinear_term(v, 'fast')
    brute = []
    for k in range(2):
        total = SpectralField.zeros(2, 6)
        for l in range(2):
            transport = sum((derivative(convolve(v.component(j), v.component(l), 'direct'), j) for j in range(2)),
                            SpectralField.zeros(2, 6))
            total = total + pr.a_operator(transport, k, l)
        brute.append(total)
    assert np.abs(fast.coeffs - SpectralField.stack(brute).coeffs).max() <= 1e-12


def test_nonlinear_term_is_solenoidal():
    v = leray_project(so.random_field(3, 3, seed=4, components=3))
    b = pr.nonlinear_term(v)
    assert l1_norm(divergence(b)) <= 1e-12 * l1_norm(b)
    assert b.real


def test_taylor_green_pressure():
    p = pr.pressure_recover(so.sample_taylor_green)
    for k in [(2, 0), (-2, 0), (0, 2), (0, -2)]:
        assert p.coeff(k) == pytest.approx(1. / 8., abs=1e-14)
    assert l1_norm(p) == pytest.approx(0.5, abs=1e-13)
    swapped = pr.pressure_recover(so.sample_taylor_green_swapped)
    assert swapped.coeff((2, 0)) == pytest.approx(-1. / 8., abs=1e-14)


def test_pressure_has_zero_mean():
    p = pr.pressure_recover(leray_project(so.random_field(2, 5, seed=5, components=2)))
    assert mean_mode(p)[0] == 0.

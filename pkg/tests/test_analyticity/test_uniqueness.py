import numpy as np
import pytest

import tests.sample_objects as so
from torusflow.analyticity import uniqueness as un
from torusflow.analyticity.strip import strip_constant
from torusflow.commons import variables as vs
from torusflow.commons.exceptions import ConfigError, ShapeMismatchError
from torusflow.navier_stokes.diagnostics import exact_taylor_green
from torusflow.spectral.operators import leray_project, norm_analytic

config = so.sample_small_config
alpha = strip_constant(config.viscosity, config.dim)
v1_hat = leray_project(so.random_field(2, 4, seed=10, components=2)) * 0.1
r_tilde = 0.25 / (2. * alpha)
_direction = leray_project(so.random_field(2, 4, seed=11, components=2))
perturbation = _direction * (1e-6 / norm_analytic(_direction, r_tilde))


def test_admissibility():
    assert un.is_admissible(0.1 / alpha, 0.2, 1., 2)
    assert not un.is_admissible(0.2 / alpha, 0.2, 1., 2)


def test_analytic_gap_series():
    times = np.linspace(0., 1., 5)
    traj = exact_taylor_green(times, 1., 4)
    weaker = exact_taylor_green(times, 1., 4, amplitude=0.5)
    assert np.allclose(un.analytic_gap_series(traj, weaker, 0.), 0.5 * traj.l1_norms)
    assert np.allclose(un.analytic_gap_series(traj, weaker, 1.), 0.5 * traj.l1_norms * np.exp(2.))
    with pytest.raises(ValueError):
        un.analytic_gap_series(traj, weaker, -1.)
    with pytest.raises(ShapeMismatchError):
        un.analytic_gap_series(traj, exact_taylor_green(np.linspace(0., 1., 3), 1., 4), 0.)


def test_identical_data():
    report = un.uniqueness_gap(v1_hat, v1_hat, r_tilde, 0.25, config, delta=0.)
    assert report.sup_gap == report.grid_sup_gap == 0.
    assert report.gap_bound == 2. * config.picard_tolerance
    assert report.bounded and report.continuous
    assert np.isnan(report.lipschitz_constant)
    assert report.r == pytest.approx(report.r_tilde / 2.)
    assert report.times[0] >= 0.25


def test_nearby_data():
    report = un.uniqueness_gap(v1_hat, v1_hat + perturbation, r_tilde, 0.25, config, delta=1e-6)
    assert report.initial_gap == pytest.approx(1e-6)
    assert report.check_time == pytest.approx(0.375)
    assert report.gap_bound == pytest.approx(vs.UNIQUENESS_GAP_CONSTANT * 1e-6)
    assert 0. < report.check_gap <= report.gap_bound
    assert report.bounded and report.continuous
    assert 0. < report.sup_gap <= 10. * report.initial_gap
    assert len(report.gaps) == len(report.times) == 9
    assert report.to_dict()['bounded']


def test_unrelated_data_are_not_bounded():
    unrelated = leray_project(so.random_field(2, 4, seed=99, components=2)) * 0.1
    report = un.uniqueness_gap(v1_hat, unrelated, r_tilde, 0.25, config, delta=1e-6)
    assert report.initial_gap > 1e-3
    assert report.check_gap > report.gap_bound
    assert not report.bounded


def test_gap_must_match_the_announced_distance():
    # The data are 1e-6 apart, but announced as 1e-10 apart
    report = un.uniqueness_gap(v1_hat, v1_hat + perturbation, r_tilde, 0.25, config, delta=1e-10)
    assert not report.bounded


def test_distinct_data_announced_as_identical():
    report = un.uniqueness_gap(v1_hat, v1_hat + perturbation, r_tilde, 0.25, config, delta=0.)
    assert report.grid_sup_gap > 2. * config.picard_tolerance
    assert not report.bounded


def test_gap_bound():
    assert un.gap_bound(1e-6, 1e-10) == pytest.approx(vs.UNIQUENESS_GAP_CONSTANT * 1e-6)
    assert un.gap_bound(0., 1e-10) == 2e-10


def test_check_falls_back_to_the_last_node():
    short = config.replace(horizon=0.3, time_steps=12)
    report = un.uniqueness_gap(v1_hat, v1_hat + perturbation, r_tilde, 0.25, short, delta=1e-6)
    assert report.check_time == pytest.approx(0.3)
    assert report.bounded


def test_invalid_radii_and_times():
    with pytest.raises(ConfigError) as e:
        un.uniqueness_gap(v1_hat, v1_hat, 0.3 / alpha, 0.25, config)
    assert e.value.field == 'r_tilde'
    with pytest.raises(ConfigError) as e:
        un.uniqueness_gap(v1_hat, v1_hat, 0.1 / alpha, 0.25, config, r=0.2 / alpha)
    assert e.value.field == 'r'
    with pytest.raises(ConfigError) as e:
        un.uniqueness_gap(v1_hat, v1_hat, 0.1 / alpha, 0.75, config)
    assert e.value.field == 't_hat'

import numpy as np
import pytest

import tests.sample_objects as so
from torusflow.commons.exceptions import ShapeMismatchError
from torusflow.experiments.generators import random_hs
from torusflow.majorant.certification import certified_constants, certified_time
from torusflow.majorant.equation import majorant_solve
from torusflow.majorant.sequences import (MajorantSequence, MajorantTrajectory, dominates, majorant_convolve,
                                          majorize_initial)
from torusflow.navier_stokes.diagnostics import exact_taylor_green
from torusflow.navier_stokes.mild import picard_solve
from torusflow.spectral.config import SolverConfig
from torusflow.spectral.fields import SpectralField
from torusflow.spectral.operators import heat_semigroup


@pytest.mark.parametrize('coeffs', [np.zeros((4, 4)), np.zeros((3, 5)), np.zeros(3)])
def test_majorants_live_on_odd_cubes(coeffs):
    with pytest.raises(ShapeMismatchError):
        MajorantSequence(coeffs)


@pytest.mark.parametrize('value', [-1., np.inf, np.nan])
def test_majorants_are_finite_and_nonnegative(value):
    coeffs = np.ones((3, 3))
    coeffs[0, 0] = value
    with pytest.raises(ValueError):
        MajorantSequence(coeffs)


def test_sequence_basics():
    V = MajorantSequence.from_modes(2, 2, {(1, 0): 2., (0, 0): 1.})
    assert (V.dim, V.trunc) == (2, 2)
    assert V.coeff((1, 0)) == 2.
    assert V.norm_hs(0.) == 3.
    assert V.norm_hs(1.) == pytest.approx(2. * 2. + 1.)
    assert V.normalized(6., 1.).norm_hs(1.) == pytest.approx(6.)
    assert (V + V).coeff((1, 0)) == 4.
    with pytest.raises(ValueError):
        MajorantSequence.zeros(2, 2).normalized(1., 0.)


def test_majorize_initial_is_the_smallest_majorant():
    v = so.random_field(2, 4, seed=8, components=2)
    V = majorize_initial(v)
    assert dominates(v, V).dominated
    assert np.allclose(V.coeffs, np.maximum(np.abs(v.coeffs[0]), np.abs(v.coeffs[1])))
    assert not dominates(v, V.scaled(0.9)).dominated


def test_domination_report_locates_violations():
    V = MajorantSequence.from_modes(2, 2, {(1, 0): 1., (0, 1): 1.})
    u = SpectralField.from_modes(2, 2, {(1, 0): (2., 0.5), (0, 1): (0.5, 1.5)}, components=2)
    report = dominates(u, V)
    assert not report
    assert report.violations == 2
    assert report.worst_mode == (1, 0)
    assert report.worst_component == 0
    assert report.worst_node == 0
    assert report.worst_excess == pytest.approx(1., abs=1e-8)
    assert report.first_violation == (0, 1)
    assert report.to_dict()['violations'] == 2


def test_domination_report_when_dominated():
    v = so.sample_taylor_green
    report = dominates(v, majorize_initial(v))
    assert report.dominated
    assert report.violations == 0
    assert report.worst_excess <= 0.
    assert report.worst_mode is None and report.first_violation is None


def test_heat_flow_is_dominated_by_the_smoothed_majorant():
    v = so.random_field(2, 5, seed=9, components=2)
    V = majorize_initial(v)
    for t in [0.1, 0.5, 2.]:
        assert dominates(heat_semigroup(v, t, 0.7), V, shift=(t, 0.7)).dominated
    assert not dominates(v, V, shift=(1., 0.7)).dominated


def test_trajectory_domination():
    traj = exact_taylor_green(np.linspace(0., 1., 5), 1., 4)
    values = np.stack([majorize_initial(traj.initial).coeffs] * len(traj))
    V = MajorantTrajectory(traj.times, values)
    assert dominates(traj, V).dominated
    assert dominates(traj, V, shift=(None, 1.)).dominated
    assert not dominates(traj, MajorantTrajectory(traj.times, 0.5 * values)).dominated
    with pytest.raises(ShapeMismatchError):
        dominates(traj, MajorantTrajectory(np.linspace(0., 2., 5), values))
    with pytest.raises(TypeError):
        dominates(traj, MajorantSequence(values[0]))


def test_majorant_trajectory():
    times = np.linspace(0., 1., 3)
    values = np.stack([np.full((3, 3), t) for t in times])
    V = MajorantTrajectory(times, values)
    assert V.is_nondecreasing()
    assert not MajorantTrajectory(times, values[::-1]).is_nondecreasing()
    assert np.allclose(V.sup_coefficients, times)
    assert np.allclose(V.norms_hs(0.), 9. * times)
    assert V.sequence(2).coeff((0, 0)) == 1.
    with pytest.raises(ShapeMismatchError):
        MajorantTrajectory(times, values[:2])


def test_majorant_convolve_is_nonnegative():
    rng = np.random.default_rng(0)
    U = rng.uniform(size=(9, 9)) * 1e-20
    W = majorant_convolve(U, U, 2, 'fast')
    assert np.all(W >= 0.)
    assert np.isrealobj(W)


@pytest.mark.slow
@pytest.mark.parametrize('seed', range(20))
def test_every_picard_iterate_is_dominated(seed):
    rng = np.random.default_rng(seed)
    v_hat = random_hs(2, 8, 1., 10. ** rng.uniform(-3., -2.), rng)
    constants = certified_constants(2, 1.)
    V_hat = majorize_initial(v_hat)
    t_cert = certified_time(V_hat, 1., constants, time_steps=16)
    config = SolverConfig(dim=2, trunc=8, viscosity=1., smoothness=1., horizon=t_cert, time_steps=16)
    majorant, report = majorant_solve(V_hat, constants.a, constants.rho, horizon=t_cert, time_steps=16)
    assert report.converged

    violations = []

    def check_iterate(m, iterate):
        violations.append(dominates(iterate, majorant, shift=(None, 1.)).violations)

    picard_solve(v_hat, config, callback=check_iterate)
    assert len(violations) > 1
    assert sum(violations) == 0

import numpy as np
import pytest

from torusflow.analyticity.decay import decay_rate_fit, mean_decay_check, mean_deviations, shell_maxima
from torusflow.commons.exceptions import DegenerateTrajectoryError, TooFewModesError
from torusflow.navier_stokes.diagnostics import single_mode_heat_flow
from torusflow.navier_stokes.trajectory import Trajectory
from torusflow.spectral.fields import SpectralField, get_grid


def exponential_field(rate: float, trunc: int = 8) -> SpectralField:
    """The real field with coefficients ``exp(-rate |k|_e)``."""
    return SpectralField(np.exp(-rate * get_grid(2, trunc).l2)[None], real=True)


def test_shell_maxima_skip_the_mean():
    shells, radii, maxima = shell_maxima(exponential_field(1., trunc=3))
    assert shells[0] == 1
    assert list(shells) == sorted(set(shells))
    assert np.all(np.floor(radii) == shells)
    assert maxima[0] == pytest.approx(np.exp(-1.))


@pytest.mark.parametrize('rate', [0.3, 1., 2.5])
def test_decay_rate_fit_recovers_exponential_decay(rate):
    fit = decay_rate_fit(exponential_field(rate), floor=1e-300)
    assert fit.slope == pytest.approx(-rate, rel=1e-10)
    assert fit.intercept == pytest.approx(0., abs=1e-8)
    assert fit.rms <= 1e-10
    assert fit.modes_used == 11
    assert set(fit.to_dict()) == {'slope', 'intercept', 'rms', 'modes_used'}


def test_decay_rate_fit_drops_shells_below_the_floor():
    fit = decay_rate_fit(exponential_field(2.), floor=1e-6)
    assert fit.modes_used == 6
    with pytest.raises(TooFewModesError):
        decay_rate_fit(exponential_field(2.), floor=1e-3)


def test_mean_decay_of_a_heat_mode():
    times = np.linspace(0., 2., 17)
    traj = single_mode_heat_flow(times, 1., 2, 4, (0, 1), (1., 0.), amplitude=3.)
    assert np.allclose(mean_deviations(traj), 3. * np.exp(-times))
    decay = mean_decay_check(traj)
    assert decay.rate == pytest.approx(1.)
    assert decay.constant == pytest.approx(3.)
    assert decay.bound_constant == pytest.approx(3.)
    assert decay.to_dict()['deviations'][0] == pytest.approx(3.)


def test_mean_decay_of_a_constant_flow():
    times = np.linspace(0., 1., 5)
    coeffs = np.zeros((5, 2, 9, 9))
    coeffs[:, 0, 4, 4] = 1.
    traj = Trajectory(single_mode_heat_flow(times, 1., 2, 4, (0, 1), (1., 0.)).config, times, coeffs)
    with pytest.raises(DegenerateTrajectoryError):
        mean_decay_check(traj)

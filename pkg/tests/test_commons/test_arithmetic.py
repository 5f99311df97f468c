import numpy as np
import pytest

from torusflow.commons import arithmetic as ar


def test_safe_divide():
    assert ar.safe_divide(1., 4.) == 0.25
    assert np.isnan(ar.safe_divide(1., 0.))


def test_log_linear_fit():
    x = np.linspace(0., 5., 11)
    slope, intercept, rms = ar.log_linear_fit(x, 3. * np.exp(-0.7 * x))
    assert slope == pytest.approx(-0.7, abs=1e-12)
    assert np.exp(intercept) == pytest.approx(3., rel=1e-12)
    assert rms < 1e-12


def test_observed_order():
    assert ar.observed_order(4e-4, 1e-4) == pytest.approx(2.)


def test_bisect_increasing():
    threshold = ar.bisect_increasing(lambda x: x <= np.pi, 0., 8., steps=50)
    assert threshold <= np.pi
    assert threshold == pytest.approx(np.pi, abs=1e-12)

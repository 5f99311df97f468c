import pytest

import tests.sample_objects as so
from torusflow.commons.exceptions import ConfigError
from torusflow.spectral.config import SolverConfig


def test_defaults():
    config = SolverConfig()
    assert config.picard_tolerance == 1e-10
    assert config.max_iterations == 200
    assert config.time_step == config.horizon / config.time_steps


@pytest.mark.parametrize('field, value', [('dim', 1), ('trunc', 0), ('viscosity', 0.), ('horizon', -1.),
                                          ('time_steps', 1), ('picard_tolerance', 0.), ('threads', 0),
                                          ('smoothness', float('nan'))])
def test_invalid_values(field, value):
    with pytest.raises(ConfigError) as e:
        SolverConfig(**{field: value})
    assert e.value.field == field


def test_unknown_key():
    with pytest.raises(ConfigError) as e:
        SolverConfig.from_dict({'dim': 2, 'trunk': 8})
    assert e.value.field == 'trunk'


def test_reproducible_forces_one_thread():
    assert SolverConfig(threads=4, reproducible=True).threads == 1


def test_json_round_trip(tmp_path):
    so.sample_config.to_json(tmp_path / 'config.json')
    assert SolverConfig.from_json(tmp_path / 'config.json') == so.sample_config
    assert so.sample_config.replace(horizon=2.).horizon == 2.

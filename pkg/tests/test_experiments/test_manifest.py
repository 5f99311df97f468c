from pathlib import Path

import pytest
from jsonschema import ValidationError

import tests.sample_objects as so
from torusflow.commons.exceptions import ConfigError
from torusflow.experiments.config import RunManifest
from torusflow.spectral.config import SolverConfig


def test_from_dict():
    manifest = RunManifest.from_dict(so.sample_manifest_dict)
    assert manifest.experiment == 'solve'
    assert manifest.config == SolverConfig(dim=2, trunc=4, horizon=0.25, time_steps=8)
    assert manifest.output_dir == Path('outputs') / 'solve'
    assert manifest.initial_data['generator'] == 'taylor-green'


def test_defaults():
    manifest = RunManifest.from_dict({'version': 1})
    assert manifest.experiment == 'solve'
    assert manifest.config == SolverConfig()
    assert manifest.seed == 0


@pytest.mark.parametrize('change', [{'version': 2},
                                    {'experiment': 'simulate'},
                                    {'config': {'trunc': 'eight'}},
                                    {'config': {'resolution': 8}},
                                    {'initial_data': {'generator': 'vortex'}},
                                    {'initial_data': {'path': 'a.json', 'amplitude': 1.}},
                                    {'seed': -1},
                                    {'verbose': True}])
def test_invalid_manifests(change):
    with pytest.raises(ValidationError):
        RunManifest.from_dict({**so.sample_manifest_dict, **change})


def test_invalid_values_caught_by_the_config():
    with pytest.raises(ConfigError) as e:
        RunManifest.from_dict({**so.sample_manifest_dict, 'config': {'smoothness': float('inf')}})
    assert e.value.field == 'smoothness'


def test_unknown_experiment():
    with pytest.raises(ConfigError) as e:
        RunManifest(experiment='simulate')
    assert e.value.field == 'experiment'


def test_overrides():
    manifest = RunManifest.from_dict({**so.sample_manifest_dict, 'config': {'threads': 4}})
    overridden = manifest.with_overrides(seed=3, reproducible=True, output_dir=Path('elsewhere'))
    assert overridden.seed == 3
    assert overridden.config.reproducible
    assert overridden.config.threads == 1
    assert overridden.output_dir == Path('elsewhere')
    assert manifest.seed == 0

    renamed = manifest.with_overrides(experiment='decay')
    assert renamed.experiment == 'decay'
    assert renamed.output_dir == Path('outputs') / 'decay'
    assert manifest.with_overrides(threads=2).config.threads == 2


def test_json_round_trip(tmp_path):
    manifest = RunManifest.from_dict({**so.sample_manifest_dict, 'output_dir': str(tmp_path / 'out'),
                                      'options': {'binary': True}})
    manifest.to_json(tmp_path / 'manifest.json')
    assert RunManifest.from_json(tmp_path / 'manifest.json') == manifest

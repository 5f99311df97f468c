import json

import numpy as np
import pandas as pd
import pytest
from jsonschema import ValidationError

import tests.sample_objects as so
from torusflow.commons import variables as vs
from torusflow.commons.exceptions import ConfigError, DivergedError
from torusflow.experiments import experiments as ex
from torusflow.experiments.config import RunManifest
from torusflow.navier_stokes.trajectory import Trajectory


def make_manifest(tmp_path, **changes) -> RunManifest:
    return RunManifest.from_dict({**so.sample_manifest_dict, 'output_dir': str(tmp_path), **changes})


def test_solve_taylor_green(tmp_path):
    results = ex.solve(make_manifest(tmp_path))
    assert results['passed'] and results['converged']
    assert results['solenoidal'] and results['energy_nonincreasing']
    assert results['exact_velocity_error'] <= 1e-8
    assert results['exact_pressure_error'] <= 1e-12
    assert results['mean_drift'] == 0.

    residuals = pd.read_csv(tmp_path / 'residuals.csv')
    assert list(residuals.columns) == ['time', 'momentum_residual', 'l1_norm', 'energy', 'divergence_l1']
    assert len(residuals) == 9
    assert np.isnan(residuals['momentum_residual'].iloc[0])
    assert len(pd.read_csv(tmp_path / 'picard.csv')) == results['iterations']
    assert len(Trajectory.from_directory(tmp_path / vs.TRAJECTORY_DIRNAME)) == 9


def test_solve_binary_trajectory(tmp_path):
    ex.solve(make_manifest(tmp_path, options={'binary': True}))
    assert len(list((tmp_path / vs.TRAJECTORY_DIRNAME / 'fields').glob('*.bin'))) == 9


def test_certify(tmp_path):
    manifest = make_manifest(tmp_path, experiment='certify',
                             initial_data={'generator': 'random-hs', 'amplitude': 1e-3},
                             options={'probe': False})
    results = ex.certify_experiment(manifest)
    assert results['passed']
    assert results['scans_passed']
    assert results['probe_passed'] is None
    assert results['verified']
    assert results['verified_horizon'] == min(results['T_cert'], 0.25)
    report = json.loads((tmp_path / vs.CERT_REPORT_FILENAME).read_text())
    assert report['T_cert'] == results['T_cert']


def test_certify_without_verification(tmp_path):
    manifest = make_manifest(tmp_path, experiment='certify', options={'probe': False, 'verify': False})
    results = ex.certify_experiment(manifest)
    assert results['verified'] is None
    assert 'verified_horizon' not in results


def test_decay(tmp_path):
    manifest = make_manifest(tmp_path, experiment='decay',
                             config={'dim': 2, 'trunc': 8, 'horizon': 0.25, 'time_steps': 8},
                             initial_data={'generator': 'random-hs', 'amplitude': 1e-3},
                             options={'floor': 1e-15})
    results = ex.decay(manifest)
    assert results['passed']
    assert results['fitted_nodes'] == 8
    assert results['strip_finite']
    assert results['strip_stable']
    assert results['max_strip_ratio'] < vs.STRIP_VARIATION_LIMIT
    assert results['mean_rate_passed'] is None
    assert results['mean_rate'] > 0.
    decay = pd.read_csv(tmp_path / 'decay.csv')
    assert len(decay) == 8
    assert (decay['slope'] <= decay['smoothing_bound'] * 0.9).all()
    assert len(pd.read_csv(tmp_path / 'mean_decay.csv')) == 9


def test_decay_verdict():
    verdict = ex.decay_verdict(True, True, 1.5, 0.2, horizon=0.25)
    assert verdict == {'passed': True, 'strip_stable': True, 'mean_rate_passed': None}
    assert ex.decay_verdict(True, True, 1.5, 0.95, horizon=20.)['mean_rate_passed']


def test_decay_verdict_strip_variation():
    verdict = ex.decay_verdict(True, True, vs.STRIP_VARIATION_LIMIT, 1., horizon=0.25)
    assert not verdict['passed']
    assert not verdict['strip_stable']
    assert not ex.decay_verdict(True, False, 1., 1., horizon=0.25)['passed']


def test_decay_verdict_slow_mean_decay():
    verdict = ex.decay_verdict(True, True, 1.5, 0.85, horizon=20.)
    assert not verdict['passed']
    assert verdict['mean_rate_passed'] is False
    # The window [20, 40] does not cover [10, 20]
    assert ex.decay_verdict(True, True, 1.5, 0.85, horizon=40.)['mean_rate_passed'] is None


def test_uniqueness(tmp_path):
    manifest = make_manifest(tmp_path, experiment='uniqueness', options={'delta': 1e-6})
    results = ex.uniqueness(manifest)
    assert results['passed']
    assert results['initial_gap'] == pytest.approx(1e-6)
    assert results['t_hat'] == 0.125
    assert results['check_time'] == 0.25
    assert 0. < results['check_gap'] <= results['gap_bound'] == pytest.approx(vs.UNIQUENESS_GAP_CONSTANT * 1e-6)
    assert len(pd.read_csv(tmp_path / 'gaps.csv')) == 5


def test_uniqueness_of_identical_data(tmp_path):
    results = ex.uniqueness(make_manifest(tmp_path, experiment='uniqueness', options={'delta': 0.}))
    assert results['passed']
    assert results['sup_gap'] == 0.


def test_majorant_check(tmp_path):
    manifest = make_manifest(tmp_path, experiment='majorant-check',
                             initial_data={'generator': 'random-hs', 'amplitude': 1e-3})
    results = ex.majorant_check(manifest)
    assert results['passed']
    assert results['violations'] == 0
    assert results['converged']
    assert results['majorant_nondecreasing']
    assert results['iterates_checked'] >= 2
    assert len(pd.read_csv(tmp_path / 'domination.csv')) == results['iterates_checked']


def test_props(tmp_path):
    manifest = make_manifest(tmp_path, experiment='props', options={'trials': 2, 'cases': [[2, 3], [3, 2]]})
    results = ex.props(manifest)
    assert results['passed']
    assert results['checks'] == 2 * 2 * len(vs.CALCULUS_PROPERTY_IDS)
    assert set(results['properties']) == set(vs.CALCULUS_PROPERTY_IDS)
    scans = json.loads((tmp_path / 'scans.json').read_text())
    assert set(scans) == {'n=2', 'n=3'}


def test_json_ready():
    cleaned = ex.json_ready({'a': np.float64(1.5), 'b': [float('nan'), np.inf], 'c': (np.int64(2), np.bool_(True))})
    assert cleaned == {'a': 1.5, 'b': [None, None], 'c': [2, True]}
    assert isinstance(cleaned['c'][0], int)


def test_error_records():
    record = ex.error_record(ConfigError('bad value', field='trunc'))
    assert record == {'error': 'ConfigError', 'message': 'trunc: bad value', 'field': 'trunc',
                      'exit_code': vs.EXIT_CONFIG_ERROR}
    assert ex.error_record(DivergedError('boom'))['exit_code'] == vs.EXIT_NUMERICAL_FAILURE
    validation = ValidationError('not an integer', path=['config', 'trunc'])
    assert ex.error_record(validation)['field'] == 'config/trunc'


def test_run_experiment_writes_a_summary(tmp_path):
    manifest = make_manifest(tmp_path).with_overrides(reproducible=True)
    assert ex.run_experiment(manifest) == vs.EXIT_SUCCESS
    summary = json.loads((tmp_path / vs.SUMMARY_FILENAME).read_text())
    assert summary['status'] == 'ok'
    assert summary['results']['passed']
    assert 'elapsed_seconds' not in summary
    assert summary['config']['reproducible']


def test_run_experiment_reports_divergence(tmp_path):
    manifest = make_manifest(tmp_path, config={'dim': 2, 'trunc': 4, 'horizon': 2., 'time_steps': 8},
                             initial_data={'generator': 'random-hs', 'amplitude': 500.})
    assert ex.run_experiment(manifest) == vs.EXIT_NUMERICAL_FAILURE
    error = json.loads((tmp_path / vs.ERROR_FILENAME).read_text())
    assert error['error'] == 'DivergedError'
    assert not (tmp_path / vs.SUMMARY_FILENAME).exists()


def test_run_experiment_reports_configuration_errors(tmp_path):
    manifest = make_manifest(tmp_path, config={'dim': 3, 'trunc': 4, 'horizon': 0.5, 'time_steps': 8})
    assert ex.run_experiment(manifest) == vs.EXIT_CONFIG_ERROR
    error = json.loads((tmp_path / vs.ERROR_FILENAME).read_text())
    assert error['field'] == 'generator'

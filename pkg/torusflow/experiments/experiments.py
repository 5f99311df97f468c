"""The named experiments of the command line.

Each experiment reads a ``RunManifest``, writes its csv and json artifacts in ``manifest.output_dir`` and returns a
dictionary of results. ``run_experiment`` wraps them: it writes ``summary.json`` (or ``error.json``) and maps failures
to exit codes.

Experiment options (``manifest.options``):

========================  =====================================================================================
Experiment                Options
========================  =====================================================================================
``solve``                 ``binary`` (bool, binary field files)
``certify``               ``probe`` (bool), ``verify`` (bool, solves on ``min(T_cert, T)``)
``decay``                 ``floor`` (1e-13), ``smoothing_tolerance`` (0.1), ``strip_fraction`` (0.9)
``uniqueness``            ``delta`` (1e-6), ``t_hat`` (``T / 2``), ``r_tilde`` (``t_hat / (2 alpha)``), ``r``
``majorant-check``        none, the horizon is ``min(T, T_cert)``
``props``                 ``trials`` (100), ``cases`` ([[2, 4], [3, 3]])
========================  =====================================================================================
"""

import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd
from jsonschema import ValidationError
from tqdm import tqdm

from torusflow.analyticity.decay import decay_rate_fit, mean_decay_check
from torusflow.analyticity.strip import strip_constant, strip_evaluate, strip_width
from torusflow.analyticity.uniqueness import uniqueness_gap
from torusflow.commons import variables as vs
from torusflow.commons.exceptions import TooFewModesError, TorusflowError
from torusflow.commons.file_management import dumps_json, validate_against_schema, write_csv, write_json
from torusflow.commons.miscellaneous import get_torusflow_logger
from torusflow.experiments.config import RunManifest
from torusflow.experiments.generators import generate_initial, random_hs
from torusflow.majorant.calculus import run_property_suite
from torusflow.majorant.certification import certified_constants, certified_time, certify, run_constant_scans
from torusflow.majorant.equation import majorant_solve
from torusflow.majorant.sequences import dominates, majorize_initial
from torusflow.navier_stokes.diagnostics import (energy_is_nonincreasing, energy_series, exact_taylor_green,
                                                 exact_taylor_green_pressure, momentum_residual)
from torusflow.navier_stokes.mild import mild_residual, picard_solve
from torusflow.navier_stokes.projection import pressure_recover
from torusflow.navier_stokes.trajectory import PicardReport
from torusflow.spectral.fields import SpectralField
from torusflow.spectral.operators import l1_norm, norm_analytic

logger = get_torusflow_logger(__name__)


def _initial(manifest: RunManifest) -> SpectralField:
    return generate_initial(manifest.initial_data, manifest.config.dim, manifest.config.trunc, manifest.seed)


def _picard_rows(report: PicardReport) -> List[Dict[str, Any]]:
    ratios = [np.nan] + report.contraction_ratios
    return [{'iteration': i + 1, 'residual': residual, 'contraction_ratio': ratio}
            for i, (residual, ratio) in enumerate(zip(report.residuals, ratios))]


def _is_taylor_green(manifest: RunManifest) -> bool:
    spec = manifest.initial_data
    return spec.get('generator') == 'taylor-green' and not spec.get('swapped', False)


# ======================================================================================================================
#                                                 EXPERIMENTS
# ======================================================================================================================

def solve(manifest: RunManifest) -> Dict[str, Any]:
    """Solves, writes the trajectory, ``residuals.csv`` and ``picard.csv``, and checks the solver invariants."""
    config, out_dir = manifest.config, manifest.output_dir
    v_hat = _initial(manifest)
    traj, report = picard_solve(v_hat, config)

    traj.to_directory(out_dir / vs.TRAJECTORY_DIRNAME, binary=bool(manifest.options.get('binary', False)))
    momentum = np.full(len(traj), np.nan)
    momentum[1:-1] = momentum_residual(traj)
    write_csv(out_dir / 'residuals.csv', pd.DataFrame({'time': traj.times,
                                                        'momentum_residual': momentum,
                                                        'l1_norm': traj.l1_norms,
                                                        'energy': energy_series(traj),
                                                        'divergence_l1': traj.divergence_l1}))
    write_csv(out_dir / 'picard.csv', _picard_rows(report))

    results = {'passed': report.converged,
               'converged': report.converged,
               'iterations': report.iterations,
               'final_residual': float(report.final_residual),
               'mild_residual': mild_residual(traj),
               'max_momentum_residual': float(np.nanmax(momentum)),
               'mean_drift': traj.mean_drift,
               'solenoidal': traj.is_solenoidal(),
               'energy_nonincreasing': energy_is_nonincreasing(traj, slack=1e-12)}

    if _is_taylor_green(manifest):
        amplitude = float(manifest.initial_data.get('amplitude', 1.))
        exact = exact_taylor_green(traj.times, config.viscosity, config.trunc, amplitude)
        pressure_errors = [l1_norm(pressure_recover(state)
                                   - exact_taylor_green_pressure(t, config.viscosity, config.trunc, amplitude))
                           for t, state in zip(traj.times, traj.states)]
        results['exact_velocity_error'] = float(traj.distance(exact).max())
        results['exact_pressure_error'] = float(max(pressure_errors))

    if not report.converged:
        logger.warning(f'Picard did not converge in {report.iterations} sweeps')
    return results


def certify_experiment(manifest: RunManifest) -> Dict[str, Any]:
    """Writes the ``CertReport`` of the majorant of the initial data, then solves on ``min(T_cert, T)``."""
    config, out_dir = manifest.config, manifest.output_dir
    v_hat = _initial(manifest)
    report = certify(majorize_initial(v_hat), config.smoothness, config.viscosity, time_steps=config.time_steps,
                     probe=bool(manifest.options.get('probe', True)), progress=not config.reproducible)
    report.to_json(out_dir / vs.CERT_REPORT_FILENAME)

    scans_passed = all(scan.passed for scan in report.scans.values())
    results = {'T_cert': report.t_cert,
               'T_cert_unbounded': report.t_cert_unbounded,
               'mu': report.mu,
               'data_norm': report.data_norm,
               'contraction_factor': report.contraction_factor,
               'scans_passed': scans_passed,
               'probe_passed': None if report.probe is None else report.probe.passed}

    verified = None
    if manifest.options.get('verify', True):
        horizon = min(report.t_cert, config.horizon)
        _, picard = picard_solve(v_hat, config.replace(horizon=horizon))
        verified = picard.converged
        results['verified_horizon'] = horizon
    results['verified'] = verified
    results['passed'] = scans_passed and verified is not False
    return results


def decay_verdict(smoothing_passed: bool,
                  strip_finite: bool,
                  max_strip_ratio: float,
                  mean_rate_ratio: float,
                  horizon: float) -> Dict[str, Any]:
    """Combines the decay checks. The strip values on the two sample grids must agree within ``STRIP_VARIATION_LIMIT``;
    the rate towards the mean must reach ``MEAN_RATE_FRACTION nu / 2`` once the fit window covers ``MEAN_RATE_WINDOW``,
    and is not judged on shorter runs."""
    strip_stable = bool(strip_finite and max_strip_ratio < vs.STRIP_VARIATION_LIMIT)
    start, end = vs.MEAN_RATE_WINDOW
    mean_rate_passed = None
    if horizon / 2. <= start and horizon >= end:
        mean_rate_passed = bool(mean_rate_ratio >= vs.MEAN_RATE_FRACTION)
    return {'passed': bool(smoothing_passed and strip_stable and mean_rate_passed is not False),
            'strip_stable': strip_stable,
            'mean_rate_passed': mean_rate_passed}


def decay(manifest: RunManifest) -> Dict[str, Any]:
    """Fits the coefficient decay at every node and the decay towards the mean, and evaluates the flow in the certified
    strip. Writes ``decay.csv`` and ``mean_decay.csv``."""
    config, out_dir, options = manifest.config, manifest.output_dir, manifest.options
    floor = float(options.get('floor', 1e-13))
    tolerance = float(options.get('smoothing_tolerance', 0.1))
    fraction = float(options.get('strip_fraction', 0.9))
    nu, dim = config.viscosity, config.dim

    traj, _ = picard_solve(_initial(manifest), config)
    rows = []
    for i in tqdm(range(1, len(traj)), desc='Decay fits', disable=config.reproducible):
        t, state = float(traj.times[i]), traj.state(i)
        row = {'time': t, 'smoothing_bound': -nu * t / 2.}
        try:
            fit = decay_rate_fit(state, floor)
            row.update(fit.to_dict())
            row['smoothing_ok'] = fit.slope <= -nu * t / 2. * (1. - tolerance)
        except TooFewModesError:
            row.update({'slope': np.nan, 'intercept': np.nan, 'rms': np.nan, 'modes_used': 0, 'smoothing_ok': None})
        y = [fraction * strip_width(t, nu, dim)] + [0.] * (dim - 1)
        row['strip_value'] = strip_evaluate(state, y)
        row['strip_value_fine'] = strip_evaluate(state, y, samples=2 * state.grid.side)
        rows.append(row)
    df = pd.DataFrame.from_records(rows)
    write_csv(out_dir / 'decay.csv', df)

    mean = mean_decay_check(traj)
    bound = mean.bound_constant * np.exp(-nu * traj.times / 2.)
    write_csv(out_dir / 'mean_decay.csv', pd.DataFrame({'time': mean.times, 'deviation': mean.deviations,
                                                         'bound': bound}))

    fitted = df[df['smoothing_ok'].notna()]
    strip_ratio = (np.maximum(df['strip_value'], df['strip_value_fine'])
                   / np.maximum(np.minimum(df['strip_value'], df['strip_value_fine']), np.finfo(float).tiny))
    smoothing_passed = bool(fitted['smoothing_ok'].astype(bool).all())
    strip_finite = bool(np.isfinite(df['strip_value']).all() and np.isfinite(df['strip_value_fine']).all())
    max_strip_ratio = float(strip_ratio.max())
    mean_rate_ratio = mean.rate / (nu / 2.)
    return {**decay_verdict(smoothing_passed, strip_finite, max_strip_ratio, mean_rate_ratio, config.horizon),
            'fitted_nodes': len(fitted),
            'smoothing_passed': smoothing_passed,
            'strip_finite': strip_finite,
            'max_strip_ratio': max_strip_ratio,
            'mean_rate': mean.rate,
            'mean_rate_ratio': mean_rate_ratio,
            'mean_bound_constant': mean.bound_constant}


def uniqueness(manifest: RunManifest) -> Dict[str, Any]:
    """Solves from the data and from a perturbation of size ``delta`` in ``||.||*_{r_tilde}``, writes ``gaps.csv``."""
    config, out_dir, options = manifest.config, manifest.output_dir, manifest.options
    t_hat = float(options.get('t_hat', config.horizon / 2.))
    r_tilde = float(options.get('r_tilde', t_hat / (2. * strip_constant(config.viscosity, config.dim))))
    r = options.get('r')
    delta = float(options.get('delta', vs.UNIQUENESS_DELTA))

    v1_hat = _initial(manifest)
    v2_hat = v1_hat
    if delta > 0:
        rng = np.random.default_rng(manifest.seed)
        perturbation = random_hs(config.dim, config.trunc, config.smoothness, 1., rng)
        v2_hat = v1_hat + perturbation * (delta / norm_analytic(perturbation, r_tilde))

    report = uniqueness_gap(v1_hat, v2_hat, r_tilde, t_hat, config, r=None if r is None else float(r), delta=delta)
    write_csv(out_dir / 'gaps.csv', pd.DataFrame({'time': report.times, 'gap': report.gaps, 'ratio': report.ratios}))

    scalars = {name: value for name, value in report.to_dict().items() if not isinstance(value, list)}
    return {**scalars, 'passed': report.bounded and report.continuous}


def majorant_check(manifest: RunManifest) -> Dict[str, Any]:
    """Checks ``v^(m)(t) << Lambda^t V(t)`` for every Picard iterate at every node of ``[0, min(T, T_cert)]``, writes
    ``domination.csv``."""
    config, out_dir = manifest.config, manifest.output_dir
    v_hat = _initial(manifest)
    constants = certified_constants(config.dim, config.viscosity)
    V_hat = majorize_initial(v_hat)
    t_cert = certified_time(V_hat, config.smoothness, constants, time_steps=config.time_steps)
    horizon = min(config.horizon, t_cert)
    config = config.replace(horizon=horizon)

    majorant, _ = majorant_solve(V_hat, constants.a, constants.rho, horizon=horizon, time_steps=config.time_steps,
                                 tolerance=config.picard_tolerance, max_iterations=config.max_iterations,
                                 threads=config.threads)
    rows = []

    def check_iterate(m: int, iterate: np.ndarray):
        report = dominates(iterate, majorant, shift=(None, config.viscosity))
        rows.append({'iteration': m, **report.to_dict()})

    traj, picard = picard_solve(v_hat, config, callback=check_iterate)
    final = dominates(traj, majorant, shift=(None, config.viscosity))
    for row in rows:
        row['worst_mode'] = str(row['worst_mode'])
        row['first_violation'] = None if row['first_violation'] is None else str(row['first_violation'])
    write_csv(out_dir / 'domination.csv', rows)

    violations = sum(row['violations'] for row in rows) + final.violations
    return {'passed': violations == 0,
            'horizon': horizon,
            'T_cert': t_cert,
            'iterates_checked': len(rows),
            'violations': violations,
            'worst_excess': max([row['worst_excess'] for row in rows] + [final.worst_excess]),
            'converged': picard.converged,
            'majorant_nondecreasing': majorant.is_nondecreasing()}


def props(manifest: RunManifest) -> Dict[str, Any]:
    """Runs the majorant calculus suite and the constant scans, writes ``props.csv`` and ``scans.json``."""
    config, out_dir, options = manifest.config, manifest.output_dir, manifest.options
    trials = int(options.get('trials', 100))
    cases = [tuple(case) for case in options.get('cases', [[2, 4], [3, 3]])]

    frames, scans = [], {}
    for dim, trunc in cases:
        frames.append(run_property_suite(dim, trunc, trials=trials, seed=manifest.seed,
                                         progress=not config.reproducible))
        if f'n={dim}' not in scans:
            constants = certified_constants(dim, config.viscosity)
            scans[f'n={dim}'] = {name: scan.to_dict() for name, scan in run_constant_scans(constants).items()}
    df = pd.concat(frames, ignore_index=True)
    write_csv(out_dir / 'props.csv', df)
    write_json(out_dir / 'scans.json', scans)

    per_property = df.groupby('property_id')['passed'].all()
    scans_passed = all(scan['passed'] for by_name in scans.values() for scan in by_name.values())
    failures = int((~df['passed']).sum())
    return {'passed': failures == 0 and scans_passed,
            'checks': len(df),
            'failures': failures,
            'properties': {name: bool(passed) for name, passed in per_property.items()},
            'scans_passed': scans_passed}


EXPERIMENTS: Dict[str, Callable[[RunManifest], Dict[str, Any]]] = {
    'solve': solve,
    'certify': certify_experiment,
    'decay': decay,
    'uniqueness': uniqueness,
    'majorant-check': majorant_check,
    'props': props,
}


# ======================================================================================================================
#                                                 RUNNER
# ======================================================================================================================

def json_ready(obj: Any) -> Any:
    """Replaces non-finite floats by ``None`` and numpy scalars by python ones, recursively."""
    if isinstance(obj, dict):
        return {key: json_ready(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_ready(value) for value in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def exit_code_of(error: Exception) -> int:
    """1 for numerical failures, 2 for configuration and usage errors."""
    if isinstance(error, TorusflowError) and error.numerical:
        return vs.EXIT_NUMERICAL_FAILURE
    return vs.EXIT_CONFIG_ERROR


def error_record(error: Exception) -> Dict[str, Any]:
    """The content of ``error.json``."""
    if isinstance(error, ValidationError):
        field = '/'.join(str(part) for part in error.absolute_path) or None
        message = error.message
    else:
        field = getattr(error, 'field', None)
        message = str(error)
    return {'error': type(error).__name__, 'message': message, 'field': field, 'exit_code': exit_code_of(error)}


def write_error(output_dir: Optional[Path], error: Exception) -> int:
    """Logs ``error``, writes ``error.json`` to ``output_dir`` (if given) and returns the exit code."""
    record = error_record(error)
    logger.error(f'{record["error"]}: {record["message"]}')
    if output_dir is not None:
        write_json(Path(output_dir) / vs.ERROR_FILENAME, record)
    print(dumps_json(record), end='')
    return record['exit_code']


def run_experiment(manifest: RunManifest) -> int:
    """Runs the experiment of ``manifest``, writes ``summary.json`` and prints it.

    Returns:
        The exit code: 0 on success, 1 if a check failed or the numerics broke down, 2 for configuration errors.
    """
    logger.info(f'Running {manifest.experiment} into {manifest.output_dir}')
    start = time.perf_counter()
    try:
        results = EXPERIMENTS[manifest.experiment](manifest)
    except (TorusflowError, ValidationError) as e:
        return write_error(manifest.output_dir, e)

    passed = bool(results.get('passed', True))
    summary = {'experiment': manifest.experiment,
               'status': 'ok' if passed else 'failed',
               'seed': manifest.seed,
               'version': manifest.version,
               'config': manifest.config.to_dict(),
               'initial_data': manifest.initial_data,
               'results': json_ready(results)}
    if not manifest.config.reproducible:
        summary['elapsed_seconds'] = time.perf_counter() - start

    validate_against_schema(summary, vs.SUMMARY_SCHEMA_PATH)
    write_json(manifest.output_dir / vs.SUMMARY_FILENAME, summary)
    print(dumps_json(summary), end='')
    return vs.EXIT_SUCCESS if passed else vs.EXIT_NUMERICAL_FAILURE

"""Certified constants, the certified existence time and the small-data global threshold.

Writing ``V = V_hat + U``, the majorant equation is the fixed point ``U = F(U) = a int P_rho D((U + V_hat)^2)``. In the
sup-in-time ``||.||_s`` norm ``F`` is bounded by ``c_W(T) ||.||_s^2`` with

    c_W(T) = c_alg(s) * max_{k != 0} |k|_1 I_k(T),

where ``c_alg`` is the algebra constant of ``||.||_s`` on the cube and ``I_k(T)`` bounds the time integral of the
semigroup on mode ``k`` (the exact integral, or the trapezoid weights the solver actually uses, whichever is larger).
On the ball of radius ``R = 2 a c_W |V_hat|^2`` the map is a contraction into itself iff ``x = a c_W |V_hat|`` stays
below ``CLOSURE_THRESHOLD``. ``c_W`` is nondecreasing in ``T`` and bounded, so the closure also decides the global
threshold ``mu`` with ``c_W(infinity)``.
"""

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from tqdm import tqdm

from torusflow.commons import variables as vs
from torusflow.commons.arithmetic import bisect_increasing
from torusflow.commons.docstrings import docstring_formatter, docstrings
from torusflow.commons.exceptions import DivergedError
from torusflow.commons.file_management import dumps_json, validate_against_schema, write_text_atomically
from torusflow.commons.miscellaneous import get_torusflow_logger
from torusflow.majorant.calculus import nonlinear_domination_check, random_pair
from torusflow.majorant.equation import majorant_solve
from torusflow.majorant.sequences import MajorantSequence
from torusflow.spectral.fields import get_grid

logger = get_torusflow_logger(__name__)


# ======================================================================================================================
#                                                 CONSTANTS
# ======================================================================================================================

@dataclass(frozen=True)
class CertifiedConstants:
    """The constants of the majorant construction for a dimension and a viscosity."""

    dim: int
    viscosity: float
    a: float  # Weight of the majorant nonlinearity, 2n
    rho: float  # Decay parameter of the majorant semigroup, nu / 2
    lemma1_c: float  # Constant c with (|k|_e^2 + |j|_e^2) c >= |k|_1 |j|_1, n / 2

    def to_dict(self) -> Dict[str, Any]:
        return {'dim': self.dim, 'viscosity': self.viscosity, 'a': self.a, 'rho': self.rho, 'lemma1_c': self.lemma1_c}


def certified_constants(dim: int, nu: float) -> CertifiedConstants:
    """``a = 2n``, ``rho = nu / 2`` and ``lemma1_c = n / 2``; see the ``scan_*`` functions for their checks."""
    if dim < 2 or nu <= 0:
        raise ValueError(f'Constants need n >= 2 and nu > 0, got n={dim}, nu={nu}')
    return CertifiedConstants(dim=dim, viscosity=float(nu), a=2. * dim, rho=nu / 2., lemma1_c=dim / 2.)


@dataclass
class ScanResult:
    """Outcome of an exhaustive check of a constant."""

    name: str
    passed: bool
    checked: int  # Number of distinct cases checked
    worst_margin: float  # min over cases of (bound - value), nonnegative if passed
    witness: Optional[List[int]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'passed': self.passed, 'checked': self.checked, 'worst_margin': self.worst_margin,
                'witness': self.witness}


def _absolute_modes(dim: int, radius: int) -> np.ndarray:
    """One representative ``(|k_1|, ..., |k_n|)`` (sorted) of every wavevector of the cube up to signs and permutations.

    The scanned inequalities only depend on ``k`` through such invariants.
    """
    return np.array(list(itertools.combinations_with_replacement(range(radius + 1), dim)), dtype=float)


def _min_squared_norm_per_l1(dim: int, radius: int) -> np.ndarray:
    """``m[q] = min |k|_e^2`` over the cube wavevectors with ``|k|_1 = q``, ``inf`` where there is none."""
    modes = _absolute_modes(dim, radius)
    l1 = modes.sum(axis=1).astype(int)
    l2_squared = (modes ** 2).sum(axis=1)
    minima = np.full(dim * radius + 1, np.inf)
    np.minimum.at(minima, l1, l2_squared)
    return minima


def scan_lemma1_constant(dim: int, c: float, radius: int = vs.CONSTANT_SCAN_RADIUS) -> ScanResult:
    """Checks ``(|k|_e^2 + |j|_e^2) c >= |k|_1 |j|_1`` for all ``|k|_inf, |j|_inf <= radius``.

    For fixed ``|k|_1`` and ``|j|_1`` the left-hand side is smallest at the smallest euclidean norms, so it suffices to
    check every pair of ``l1`` values at these minima.
    """
    minima = _min_squared_norm_per_l1(dim, radius)
    q = np.arange(minima.size)
    valid = np.isfinite(minima)
    margins = c * (minima[:, None] + minima[None, :]) - q[:, None] * q[None, :]
    margins = np.where(valid[:, None] & valid[None, :], margins, np.inf)
    worst = np.unravel_index(int(np.argmin(margins)), margins.shape)
    worst_margin = float(margins[worst])
    return ScanResult(name='lemma1_c', passed=worst_margin >= 0, checked=int(valid.sum()) ** 2,
                      worst_margin=worst_margin, witness=[int(worst[0]), int(worst[1])] if worst_margin < 0 else None)


def scan_rho(dim: int, nu: float, rho: float, radius: int = vs.CONSTANT_SCAN_RADIUS) -> ScanResult:
    """Checks ``nu |k|_e^2 >= nu |k|_e / 2 + rho |k|_e^2`` for every ``k != 0`` of the cube.

    Together with ``|j|_e + |m|_e >= |k|_e`` for ``k = j + m``, this is the mode-wise inequality letting the heat
    semigroup absorb both the ``Lambda`` smoothing and the majorant semigroup ``P_rho``.
    """
    modes = _absolute_modes(dim, radius)
    l2_squared = np.unique((modes ** 2).sum(axis=1))
    l2_squared = l2_squared[l2_squared > 0]
    l2 = np.sqrt(l2_squared)
    margins = nu * l2_squared - nu * l2 / 2. - rho * l2_squared
    worst = int(np.argmin(margins))
    return ScanResult(name='rho', passed=bool(margins[worst] >= 0), checked=int(l2_squared.size),
                      worst_margin=float(margins[worst]), witness=None)


def scan_projection_constant(dim: int, c: float = 1., radius: int = vs.PROJECTION_SCAN_RADIUS) -> ScanResult:
    """Checks ``|k_j k_l| / |k|_e^2 <= c`` for all ``j, l`` and ``k != 0`` of the cube."""
    modes = _absolute_modes(dim, radius)[1:]
    margins = c * (modes ** 2).sum(axis=1) - modes.max(axis=1) ** 2
    worst = int(np.argmin(margins))
    return ScanResult(name='projection', passed=bool(margins[worst] >= 0), checked=int(modes.shape[0]),
                      worst_margin=float(margins[worst]),
                      witness=[int(x) for x in modes[worst]] if margins[worst] < 0 else None)


def scan_nonlinear_constant(dim: int, a: float, trunc: int = 4, trials: int = 4, seed: int = 0) -> ScanResult:
    """Checks ``B(u) << a D(U^2)`` on random velocities ``u`` with every component dominated by ``U``."""
    rng = np.random.default_rng(seed)
    worst_margin, witness = np.inf, None
    for _ in range(trials):
        u, U = random_pair(dim, trunc, rng, components=dim)
        check = nonlinear_domination_check(u, U, a)
        if -check.worst_excess < worst_margin:
            worst_margin = -check.worst_excess
            witness = None if check.witness is None else list(check.witness)
    return ScanResult(name='a', passed=worst_margin >= 0, checked=trials, worst_margin=float(worst_margin),
                      witness=witness)


def run_constant_scans(constants: CertifiedConstants, progress: bool = False) -> Dict[str, ScanResult]:
    scans = {'lemma1_c': lambda: scan_lemma1_constant(constants.dim, constants.lemma1_c),
             'rho': lambda: scan_rho(constants.dim, constants.viscosity, constants.rho),
             'projection': lambda: scan_projection_constant(constants.dim),
             'a': lambda: scan_nonlinear_constant(constants.dim, constants.a)}
    results = {name: scan() for name, scan in tqdm(scans.items(), desc='Constant scans', disable=not progress)}
    for result in results.values():
        (logger.info if result.passed else logger.warning)(
                f'Scan {result.name}: {"passed" if result.passed else "FAILED"} over {result.checked} cases '
                f'(worst margin {result.worst_margin:.3e})')
    return results


# ======================================================================================================================
#                                                 CONTRACTION
# ======================================================================================================================

def algebra_constant(s: float, dim: int, trunc: int) -> float:
    """A constant ``c`` with ``||UV||_s <= c ||U||_s ||V||_s`` for nonnegative sequences on the cube.

    ``w(j + m) <= w(j) + w(m) <= 2 w(j) w(m)`` gives ``2^s`` for ``s >= 0``. For ``s < 0``, ``w <= nN`` on the
    cube gives ``(nN)^(2|s|)``.
    """
    return 2. ** s if s >= 0 else float(dim * trunc) ** (2. * abs(s))


def integral_bounds(rates: np.ndarray, horizon: float, time_steps: Optional[int] = None) -> np.ndarray:
    """``sup_{t <= T} int_0^t exp(-rate (t - xi)) dxi`` per rate, and the same for the trapezoid weights of a uniform
    grid of ``time_steps`` intervals, whichever is larger. ``horizon`` may be ``inf``.

    ``rates`` must be positive.
    """
    if np.isinf(horizon):
        exact = 1. / rates
    else:
        exact = -np.expm1(-rates * horizon) / rates
    if time_steps is None:
        return exact

    if np.isinf(horizon):
        raise ValueError('A trapezoid bound needs a finite horizon')
    step = horizon / time_steps
    decay = np.exp(-rates * step)
    # h (1/2 + E^M / 2 + E (1 - E^(M-1)) / (1 - E)), the total trapezoid weight at the last node
    geometric = decay * -np.expm1(-(time_steps - 1) * rates * step) / -np.expm1(-rates * step)
    trapezoid = step * (0.5 + 0.5 * decay ** time_steps + geometric)
    return np.maximum(exact, trapezoid)


def stationary_integral_bounds(rates: np.ndarray, step: float) -> np.ndarray:
    """The ``T -> infinity`` limits of ``integral_bounds`` on a grid of step ``step``: ``1 / rate`` against
    ``(h / 2) coth(rate h / 2)``."""
    return np.maximum(1. / rates, 0.5 * step / np.tanh(0.5 * rates * step))


@docstring_formatter(**docstrings)
def c_w(horizon: float, s: float, constants: CertifiedConstants, trunc: int, time_steps: Optional[int] = None,
        step: Optional[float] = None) -> float:
    """The bound ``c_W(T)`` of the majorant nonlinearity in the sup-in-time ``||.||_s`` norm.

    Args:
        horizon: The final time ``T``, possibly ``inf``.
        s: {smoothness}
        constants: {constants}
        trunc: The truncation of the majorants.
        time_steps: The number of intervals of the solver's grid on ``[0, T]``, to include its trapezoid weights.
        step: For ``T = inf``, the step of the solver's grid, to include its trapezoid weights.
    """
    grid = get_grid(constants.dim, trunc)
    rates = constants.rho * grid.l2_squared[grid.nonzero]
    if np.isinf(horizon) and step is not None:
        bounds = stationary_integral_bounds(rates, step)
    else:
        bounds = integral_bounds(rates, horizon, time_steps)
    return algebra_constant(s, constants.dim, trunc) * float((grid.l1[grid.nonzero] * bounds).max())


@dataclass
class ClosureCheck:
    """The three quantities of the closure of ``F`` on a ball."""

    radius: float  # R = 2 a c_W |V_hat|^2
    contraction_factor: float  # q = 2 a c_W (R + |V_hat|)
    image_radius: float  # a c_W (R + |V_hat|)^2
    closes: bool  # q < 1 and image_radius <= R

    def to_dict(self) -> Dict[str, Any]:
        return {'radius': self.radius, 'contraction_factor': self.contraction_factor,
                'image_radius': self.image_radius, 'closes': self.closes}


def closure(norm: float, c_w_value: float, a: float) -> ClosureCheck:
    radius = 2. * a * c_w_value * norm ** 2
    contraction_factor = 2. * a * c_w_value * (radius + norm)
    image_radius = a * c_w_value * (radius + norm) ** 2
    closes = contraction_factor < 1. and image_radius <= radius * (1. + 1e-12)
    return ClosureCheck(radius, contraction_factor, image_radius, closes)


@docstring_formatter(**docstrings)
def contraction_closes(norm: float, horizon: float, s: float, constants: CertifiedConstants, trunc: int,
                       time_steps: Optional[int] = None, step: Optional[float] = None) -> bool:
    """Whether ``F`` maps the ball of radius ``R = 2 a c_W(T) norm^2`` into itself and contracts there.

    Equivalent to ``a c_W(T) norm <= CLOSURE_THRESHOLD``.

    Args:
        norm: ``||V_hat||_s``.
        horizon: The final time ``T``, possibly ``inf``.
        s: {smoothness}
        constants: {constants}
        trunc: The truncation of the majorants.
        time_steps: See ``c_w``.
        step: See ``c_w``.
    """
    if norm == 0:
        return True
    return closure(norm, c_w(horizon, s, constants, trunc, time_steps, step), constants.a).closes


@docstring_formatter(**docstrings)
def certified_time(V_hat: MajorantSequence,
                   s: float,
                   constants: CertifiedConstants,
                   time_steps: Optional[int] = None,
                   upper_bound: float = vs.CERT_SEARCH_UPPER_BOUND) -> float:
    """The largest ``T`` (up to ``upper_bound``) at which the contraction closes, by dyadic search then bisection.

    Args:
        V_hat: {majorant}
        s: {smoothness}
        constants: {constants}
        time_steps: If given, ``c_W`` also covers the trapezoid weights of a uniform grid of that many intervals.
        upper_bound: The end of the search; returned when the contraction closes there, in particular for
            ``V_hat = 0``.

    Returns:
        ``T_cert > 0``. Since ``c_W(T) -> 0`` as ``T -> 0``, the contraction closes on a short enough horizon for every
        finite ``||V_hat||_s``.

    Raises:
        DivergedError: if the contraction still fails at ``T = CERT_SEARCH_MIN_TIME``, which only happens for norms
            that are not finite or so large that closing needs an even shorter horizon. No certificate is returned then.
    """
    norm = V_hat.norm_hs(s)

    def closes(horizon: float) -> bool:
        return contraction_closes(norm, horizon, s, constants, V_hat.trunc, time_steps)

    horizon = upper_bound
    if closes(horizon):
        logger.info(f'Certified time reaches the search bound T = {upper_bound}')
        return upper_bound

    while not closes(horizon / 2.):
        horizon /= 2.
        if horizon < vs.CERT_SEARCH_MIN_TIME:
            raise DivergedError(f'The contraction does not close down to T = {horizon:.3e}')
    logger.debug(f'Certified time bracketed in [{horizon / 2.:.6e}, {horizon:.6e}]')

    t_cert = bisect_increasing(closes, horizon / 2., horizon, vs.CERT_BISECTION_STEPS)
    logger.info(f'Certified time T = {t_cert:.6e} for |V_hat|_{s} = {norm:.6e}')
    return t_cert


# ======================================================================================================================
#                                                 GLOBAL THRESHOLD
# ======================================================================================================================

@dataclass
class ProbeResult:
    """Long-horizon majorant runs at ``mu / 2`` (expected bounded) and at ``100 mu`` (expected to diverge)."""

    horizon: float
    time_steps: int
    below_converged: bool
    below_growth: Optional[float]  # max |V(T) - V(T/2)| / max V(T/2) at mu / 2
    above_diverged: Optional[bool]  # Whether the run at 100 mu raised DivergedError, None if not run

    @property
    def passed(self) -> bool:
        return (self.below_converged and self.below_growth is not None
                and self.below_growth < vs.PROBE_GROWTH_TOLERANCE)

    def to_dict(self) -> Dict[str, Any]:
        return {'horizon': self.horizon, 'time_steps': self.time_steps, 'below_converged': self.below_converged,
                'below_growth': self.below_growth, 'above_diverged': self.above_diverged, 'passed': self.passed}


def _probe(profile: MajorantSequence, norm: float, s: float, constants: CertifiedConstants, horizon: float,
           time_steps: int) -> Optional[float]:
    """Growth of the majorant between ``T / 2`` and ``T`` for data of norm ``norm``; ``None`` if the run fails."""
    V_hat = profile.normalized(norm, s)
    try:
        majorant, report = majorant_solve(V_hat, constants.a, constants.rho, horizon=horizon, time_steps=time_steps)
    except DivergedError:
        return None
    if not report.converged:
        return None
    half = majorant.values[time_steps // 2]
    return float(np.abs(majorant.values[-1] - half).max() / max(half.max(), np.finfo(float).tiny))


def default_profile(dim: int, trunc: int) -> MajorantSequence:
    """The majorant of the unit-modulus modes ``|k|_inf = 1`` (the smallest nonzero shell)."""
    grid = get_grid(dim, trunc)
    return MajorantSequence(np.where(grid.linf == 1, 1., 0.))


@docstring_formatter(**docstrings)
def global_threshold(s: float,
                     constants: CertifiedConstants,
                     trunc: int,
                     profile: Optional[MajorantSequence] = None,
                     probe: bool = True,
                     probe_above: bool = True,
                     probe_horizon: float = vs.PROBE_HORIZON,
                     probe_time_steps: int = vs.PROBE_TIME_STEPS) -> Dict[str, Any]:
    """The largest data norm ``mu`` for which the contraction closes uniformly in ``T``, by bisection.

    ``c_W(inf)`` includes the trapezoid weights of the probe grid, so the probe runs are covered by the certificate.

    Args:
        s: {smoothness}
        constants: {constants}
        trunc: The truncation of the majorants.
        profile: The shape of the probe data, defaults to ``default_profile``.
        probe: Whether to run the long-horizon check at ``mu / 2``.
        probe_above: Whether to also run it at ``100 mu``.
        probe_horizon: The probe horizon.
        probe_time_steps: The number of intervals of the probe grid.

    Returns:
        A dictionary with ``mu`` and, if probed, the ``ProbeResult`` under ``probe``.
    """
    step = probe_horizon / probe_time_steps

    def closes(norm: float) -> bool:
        return contraction_closes(norm, np.inf, s, constants, trunc, step=step)

    high = 1.
    while closes(high):
        high *= 2.
    low = high / 2.
    while not closes(low):
        low /= 2.
        high /= 2.
    mu = bisect_increasing(closes, low, high, vs.CERT_BISECTION_STEPS)
    logger.info(f'Global threshold mu = {mu:.6e} (s={s}, n={constants.dim}, nu={constants.viscosity}, N={trunc})')

    result: Dict[str, Any] = {'mu': mu, 'probe': None}
    if probe:
        profile = default_profile(constants.dim, trunc) if profile is None else profile
        growth = _probe(profile, mu / 2., s, constants, probe_horizon, probe_time_steps)
        above = None
        if probe_above:
            above = _probe(profile, 100. * mu, s, constants, probe_horizon, probe_time_steps) is None
        result['probe'] = ProbeResult(probe_horizon, probe_time_steps, growth is not None, growth, above)
        logger.info(f'Probe at mu / 2: growth {growth}, run at 100 mu diverged: {above}')
    return result


# ======================================================================================================================
#                                                 REPORT
# ======================================================================================================================

@dataclass
class CertReport:
    """The constants, the certified time and the global threshold of one initial majorant."""

    constants: CertifiedConstants
    smoothness: float
    trunc: int
    data_norm: float  # ||V_hat||_s
    t_cert: float
    t_cert_unbounded: bool  # The contraction closes with c_W(inf), i.e. the certificate holds for all times
    contraction_factor: float  # q at T_cert
    mu: float
    scans: Dict[str, ScanResult] = field(default_factory=dict)
    probe: Optional[ProbeResult] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {'a': self.constants.a,
                'rho': self.constants.rho,
                'lemma1_c': self.constants.lemma1_c,
                'dim': self.constants.dim,
                'viscosity': self.constants.viscosity,
                'smoothness': self.smoothness,
                'trunc': self.trunc,
                'data_norm': self.data_norm,
                'T_cert': self.t_cert,
                'T_cert_unbounded': self.t_cert_unbounded,
                'contraction_factor': self.contraction_factor,
                'mu': self.mu,
                'scans': {name: scan.to_dict() for name, scan in self.scans.items()},
                'probe': None if self.probe is None else self.probe.to_dict(),
                'notes': self.notes}

    def validate(self):
        validate_against_schema(self.to_dict(), vs.CERT_REPORT_SCHEMA_PATH)

    def to_json(self, path: Path):
        self.validate()
        write_text_atomically(path, dumps_json(self.to_dict()))


@docstring_formatter(**docstrings)
def certify(V_hat: MajorantSequence,
            s: float,
            nu: float,
            time_steps: Optional[int] = None,
            probe: bool = True,
            progress: bool = False) -> CertReport:
    """Runs the constant scans, ``certified_time`` and ``global_threshold`` for one initial majorant.

    Args:
        V_hat: {majorant}
        s: {smoothness}
        nu: {viscosity}
        time_steps: See ``certified_time``.
        probe: Whether to run the long-horizon probes of ``global_threshold``.
        progress: Whether to show a progress bar over the scans.
    """
    constants = certified_constants(V_hat.dim, nu)
    scans = run_constant_scans(constants, progress=progress)
    t_cert = certified_time(V_hat, s, constants, time_steps)
    norm = V_hat.norm_hs(s)
    unbounded = contraction_closes(norm, np.inf, s, constants, V_hat.trunc)
    factor = closure(norm, c_w(t_cert, s, constants, V_hat.trunc, time_steps), constants.a).contraction_factor
    threshold = global_threshold(s, constants, V_hat.trunc, profile=V_hat if norm > 0 else None, probe=probe)

    notes = [f'c_W(T) = c_alg * max_k |k|_1 I_k(T) with c_alg = {algebra_constant(s, V_hat.dim, V_hat.trunc):.6g}',
             f'closure: a c_W |V_hat|_s <= {vs.CLOSURE_THRESHOLD:.6f}',
             'statements concern the Galerkin truncation |k|_inf <= N']
    if unbounded:
        notes.append('the data is below the global threshold, T_cert is the search bound')

    return CertReport(constants=constants, smoothness=s, trunc=V_hat.trunc, data_norm=norm, t_cert=t_cert,
                      t_cert_unbounded=unbounded, contraction_factor=factor, mu=threshold['mu'], scans=scans,
                      probe=threshold['probe'], notes=notes)

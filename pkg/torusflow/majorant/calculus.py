"""The majorant calculus: rules turning ``u << U`` and ``v << V`` into a majorant of an expression in ``u`` and ``v``.

Every rule is checked coefficient-wise on truncated fields. ``calculus_check`` checks one rule on one quadruple
``(u, v, U, V)``, ``run_property_suite`` runs every rule on random quadruples and collects the outcomes in a table.

=================  ==========================================  =======================================
``property_id``    conclusion                                  parameters
=================  ==========================================  =======================================
``sum``            ``u + v << U + V``
``product``        ``uv << UV``                                ``method``
``scalar``         ``lambda u << |lambda| U``                  ``scalar``
``integral``       ``int_0^t u << 2 int_0^t U``                ``t``, ``nu``, ``time_steps``
``derivative``     ``d_l u << D U``                            ``axis``
``heat``           ``S^t u << U``                              ``t``, ``nu``
``d_product``      ``D(uv) << U DV + V DU``                    ``method``
``inv_laplacian``  ``inv_lap u << U``
``projection``     ``inv_lap d_j d_l u << c U``, ``c = 1``     ``j``, ``l``
=================  ==========================================  =======================================
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from torusflow.commons import variables as vs
from torusflow.commons.exceptions import MajorantSetupError, ShapeMismatchError
from torusflow.commons.miscellaneous import get_torusflow_logger
from torusflow.majorant.sequences import MajorantSequence, domination_margins, dominates, majorant_convolve
from torusflow.navier_stokes.mild import duhamel_history, time_grid
from torusflow.navier_stokes.projection import nonlinear_coeffs
from torusflow.spectral.convolution import ConvolutionMethod, convolve_arrays
from torusflow.spectral.fields import SpectralField, get_grid
from torusflow.spectral.operators import heat_multiplier, inv_laplacian_multiplier

logger = get_torusflow_logger(__name__)

# Rules needing the second pair (v, V)
BINARY_PROPERTIES = ('sum', 'product', 'd_product')


@dataclass
class CalculusCheck:
    """Outcome of one rule of the majorant calculus on one quadruple."""

    property_id: str
    passed: bool
    worst_excess: float  # max over modes of |lhs_k| - bound_k
    witness: Optional[vs.WavevectorType]  # The worst mode if the rule fails

    def to_dict(self) -> Dict[str, Any]:
        return {'property_id': self.property_id, 'passed': self.passed, 'worst_excess': self.worst_excess,
                'witness': None if self.witness is None else list(self.witness)}


def _check_precondition(name: str, u: SpectralField, U: MajorantSequence):
    if u.dim != U.dim or u.trunc != U.trunc:
        raise ShapeMismatchError(f'{name}: field (n={u.dim}, N={u.trunc}) vs majorant (n={U.dim}, N={U.trunc})')
    report = dominates(u, U)
    if not report.dominated:
        raise MajorantSetupError(f'{name}: the input is not dominated by its majorant (worst mode '
                                 f'{report.worst_mode}, excess {report.worst_excess:.3e})')


def _conclusion(property_id: str, u: SpectralField, v: Optional[SpectralField], U: MajorantSequence,
                V: Optional[MajorantSequence], params: Dict[str, Any]) -> Tuple[np.ndarray, np.ndarray]:
    """The left-hand side coefficients (with a component axis) and the majorant bound of one rule."""
    grid = u.grid
    dim = u.dim
    method: ConvolutionMethod = params.get('method', 'auto')

    if property_id == 'sum':
        return u.coeffs + v.coeffs, U.coeffs + V.coeffs

    if property_id == 'product':
        return convolve_arrays(u.coeffs, v.coeffs, dim, method), majorant_convolve(U.coeffs, V.coeffs, dim, method)

    if property_id == 'scalar':
        scalar = params.get('scalar', 1.)
        return scalar * u.coeffs, abs(scalar) * U.coeffs

    if property_id == 'integral':
        t, nu = params.get('t', 1.), params.get('nu', 1.)
        times = time_grid(t, params.get('time_steps', 16))
        history = params.get('history')
        if history is None:  # u(xi) = S^xi u, dominated by U at every node
            history = np.stack([heat_multiplier(grid, xi, nu) * u.coeffs for xi in times])
        integral = duhamel_history(np.asarray(history), times, np.zeros(grid.shape))[-1]
        return integral, 2. * t * U.coeffs

    if property_id == 'derivative':
        axis = params.get('axis', 0)
        return 1j * grid.components[axis] * u.coeffs, grid.l1 * U.coeffs

    if property_id == 'heat':
        return heat_multiplier(grid, params.get('t', 1.), params.get('nu', 1.)) * u.coeffs, U.coeffs

    if property_id == 'd_product':
        lhs = grid.l1 * convolve_arrays(u.coeffs, v.coeffs, dim, method)
        bound = (majorant_convolve(U.coeffs, grid.l1 * V.coeffs, dim, method)
                 + majorant_convolve(V.coeffs, grid.l1 * U.coeffs, dim, method))
        return lhs, bound

    if property_id == 'inv_laplacian':
        return inv_laplacian_multiplier(grid) * u.coeffs, U.coeffs

    if property_id == 'projection':
        j, l = params.get('j', 0), params.get('l', 1 % dim)
        k = grid.components
        multiplier = inv_laplacian_multiplier(grid) * (-k[j] * k[l])
        return multiplier * u.coeffs, params.get('constant', 1.) * U.coeffs

    raise ValueError(f'Unknown majorant-calculus property {property_id!r}, expected one of {vs.CALCULUS_PROPERTY_IDS}')


def calculus_check(property_id: str,
                   u: SpectralField,
                   v: Optional[SpectralField],
                   U: MajorantSequence,
                   V: Optional[MajorantSequence],
                   **params) -> CalculusCheck:
    """Checks one rule of the majorant calculus, see the module docstring for the rules and their parameters.

    Args:
        property_id: One of ``CALCULUS_PROPERTY_IDS``.
        u: The first field, dominated by ``U``.
        v: The second field, dominated by ``V``. Only used by ``sum``, ``product`` and ``d_product``.
        U: The majorant of ``u``.
        V: The majorant of ``v``.
        **params: The rule's parameters. ``integral`` accepts an explicit ``history`` of ``u`` on its time grid, each
            node of which must be dominated by ``U``.

    Raises:
        MajorantSetupError: if ``u << U`` (or ``v << V``) does not hold on input.
    """
    _check_precondition('u << U', u, U)
    if property_id in BINARY_PROPERTIES:
        if v is None or V is None:
            raise MajorantSetupError(f'{property_id} needs a second pair (v, V)')
        _check_precondition('v << V', v, V)
    if property_id == 'integral' and params.get('history') is not None:
        history = np.asarray(params['history'])
        if np.any(domination_margins(history, U.coeffs[None, None]) > 0):
            raise MajorantSetupError('integral: the history is not dominated by U at every node')

    lhs, bound = _conclusion(property_id, u, v, U, V, params)
    margins = domination_margins(lhs, bound[None])
    worst = float(margins.max())
    passed = worst <= 0
    witness = None
    if not passed:
        index = np.unravel_index(int(np.argmax(margins)), margins.shape)
        witness = tuple(int(i) - u.trunc for i in index[1:])
        logger.debug(f'{property_id}: fails at mode {witness} by {worst:.3e}')
    return CalculusCheck(property_id, passed, worst, witness)


# ======================================================================================================================
#                                                 HARNESSES
# ======================================================================================================================

def random_pair(dim: int, trunc: int, rng: np.random.Generator, components: int = 1,
                mean: bool = True) -> Tuple[SpectralField, MajorantSequence]:
    """A random majorant ``U`` and a field ``u << U`` with ``u_k = U_k r_k exp(i theta_k)``, ``r_k`` uniform in
    ``[0, 1]``.

    Args:
        dim: The space dimension.
        trunc: The truncation.
        rng: The random generator.
        components: The number of components of ``u``.
        mean: Whether the mean mode may be nonzero.
    """
    grid = get_grid(dim, trunc)
    U = rng.uniform(0., 1., size=grid.shape) * np.exp(-0.5 * grid.l1)
    if not mean:
        U[grid.origin] = 0.
    ratio = rng.uniform(0., 1., size=(components,) + grid.shape)
    phase = np.exp(1j * rng.uniform(0., 2. * np.pi, size=(components,) + grid.shape))
    return SpectralField(U * ratio * phase, real=False), MajorantSequence(U)


def _random_params(property_id: str, dim: int, rng: np.random.Generator) -> Dict[str, Any]:
    if property_id == 'scalar':
        return {'scalar': complex(rng.normal(), rng.normal())}
    if property_id in ('integral', 'heat'):
        return {'t': float(rng.uniform(0.01, 2.)), 'nu': float(rng.uniform(0.1, 2.))}
    if property_id == 'derivative':
        return {'axis': int(rng.integers(dim))}
    if property_id == 'projection':
        return {'j': int(rng.integers(dim)), 'l': int(rng.integers(dim))}
    return {}


def run_property_suite(dim: int,
                       trunc: int,
                       trials: int = 100,
                       seed: int = 0,
                       property_ids: Tuple[str, ...] = vs.CALCULUS_PROPERTY_IDS,
                       progress: bool = False) -> pd.DataFrame:
    """Runs every rule on ``trials`` random quadruples.

    Returns:
        A dataframe with one row per (rule, trial) and the columns ``property_id``, ``trial``, ``dim``, ``trunc``,
        ``passed``, ``worst_excess`` and ``witness``.
    """
    rng = np.random.default_rng(seed)
    rows: List[Dict[str, Any]] = []
    for property_id in tqdm(property_ids, desc=f'Majorant calculus (n={dim}, N={trunc})', disable=not progress):
        for trial in range(trials):
            u, U = random_pair(dim, trunc, rng)
            v, V = random_pair(dim, trunc, rng)
            check = calculus_check(property_id, u, v, U, V, **_random_params(property_id, dim, rng))
            rows.append({**check.to_dict(), 'trial': trial, 'dim': dim, 'trunc': trunc,
                         'witness': None if check.witness is None else str(check.witness)})

    df = pd.DataFrame.from_records(rows, columns=['property_id', 'trial', 'dim', 'trunc', 'passed', 'worst_excess',
                                                  'witness'])
    failures = int((~df['passed']).sum())
    if failures:
        logger.warning(f'Majorant calculus: {failures} of {len(df)} checks failed')
    else:
        logger.info(f'Majorant calculus: all {len(df)} checks passed (n={dim}, N={trunc})')
    return df


def nonlinear_domination_check(u: SpectralField, U: MajorantSequence, a: float,
                               method: ConvolutionMethod = 'auto') -> CalculusCheck:
    """Checks ``B(u)^k << a D(U^2)`` for every component ``k``, for a velocity ``u`` whose components are all
    dominated by ``U``.

    With ``a = 2n`` it holds with a factor 2 to spare, as ``|B(u)^k_q| <= n |q|_1 (UU)_q``: each entry of the projection
    multiplier has modulus at most 1, and ``|sum_j q_j (u^j u^l)_q| <= |q|_1 (UU)_q``.
    """
    _check_precondition('u << U', u, U)
    grid = u.grid
    lhs = nonlinear_coeffs(u.coeffs, u.dim, method)
    bound = a * grid.l1 * majorant_convolve(U.coeffs, U.coeffs, u.dim, method)
    margins = domination_margins(lhs, bound[None])
    worst = float(margins.max())
    witness = None
    if worst > 0:
        index = np.unravel_index(int(np.argmax(margins)), margins.shape)
        witness = tuple(int(i) - u.trunc for i in index[1:])
    return CalculusCheck('nonlinear', worst <= 0, worst, witness)

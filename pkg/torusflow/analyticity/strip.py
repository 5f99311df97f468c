"""Evaluation in complex strips ``|Im x|_m < r`` and the analytic-norm inequalities used to control it."""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np

from torusflow.commons.docstrings import docstring_formatter, docstrings
from torusflow.commons.miscellaneous import get_torusflow_logger
from torusflow.majorant.sequences import MajorantSequence
from torusflow.spectral.fields import SpectralField, lower_norm_constant
from torusflow.spectral.operators import d_multiplier, evaluate_on_grid, norm_analytic

logger = get_torusflow_logger(__name__)


def strip_evaluate(f: SpectralField, y: Sequence[float], samples: Optional[int] = None) -> float:
    """``max |f(x + iy)|`` over a uniform sample grid of ``x`` and all components."""
    return float(np.abs(evaluate_on_grid(f, y=y, samples=samples)).max())


def strip_constant(nu: float, dim: int) -> float:
    """``alpha = 3 / (nu c)`` with ``c = 1 / sqrt(n)``, the ratio between time and strip width."""
    return 3. / (nu * lower_norm_constant(dim))


def strip_width(t: float, nu: float, dim: int) -> float:
    """The certified half-width ``nu c t / 3`` of the strip at time ``t``."""
    return t / strip_constant(nu, dim)


@docstring_formatter(**docstrings)
def strip_majorant_bound(V: MajorantSequence, t: float, r: float, nu: float) -> float:
    """``sum_j V_j exp(-nu |j|_e t / 2 + |j|_1 r / alpha)``, a bound of ``|v(t, x)|`` on ``|Im x|_m <= r / alpha`` for
    every ``v << Lambda^t V``.

    Args:
        V: {majorant}
        t: The time.
        r: The strip parameter, the half-width being ``r / alpha``.
        nu: {viscosity}
    """
    grid = V.grid
    exponent = -nu * grid.l2 * t / 2. + grid.l1 * r / strip_constant(nu, V.dim)
    return float((V.coeffs * np.exp(exponent)).sum())


@dataclass
class CauchyCheck:
    """``||Df||*_r`` against ``||f||*_{r + delta} / (e delta)``."""

    lhs: float
    rhs: float
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {'lhs': self.lhs, 'rhs': self.rhs, 'passed': self.passed}


@docstring_formatter(**docstrings)
def cauchy_inequality_check(f: SpectralField, r: float, delta: float, rtol: float = 1e-12) -> CauchyCheck:
    """Checks ``||Df||*_r <= ||f||*_(r + delta) / (e delta)``.

    Mode-wise this is ``q exp(q r) <= exp(q (r + delta)) / (e delta)``, with equality at ``q = 1 / delta``.

    Args:
        f: {field}
        r: {radius}
        delta: The positive radius increment.
        rtol: The relative slack.
    """
    if delta <= 0:
        raise ValueError(f'The radius increment must be positive, got {delta}')
    lhs = norm_analytic(d_multiplier(f), r)
    rhs = norm_analytic(f, r + delta) / (np.e * delta)
    return CauchyCheck(lhs, rhs, lhs <= rhs * (1. + rtol))

"""This module contains basic arithmetic functions."""

from typing import Tuple

import numpy as np


def safe_divide(dividend, divisor):
    """Simple division which return ``np.nan`` if ``divisor`` equals zero."""
    return dividend / divisor if divisor != 0 else np.nan


def log_linear_fit(x: np.ndarray, y: np.ndarray) -> Tuple[float, float, float]:
    """Least-squares fit of ``log(y) = slope * x + intercept``.

    Returns:
        The slope, the intercept and the root-mean-square residual of the fit in log space.
    """
    x = np.asarray(x, dtype=float)
    log_y = np.log(np.asarray(y, dtype=float))
    slope, intercept = np.polyfit(x, log_y, deg=1)
    rms = float(np.sqrt(np.mean((log_y - (slope * x + intercept)) ** 2)))
    return float(slope), float(intercept), rms


def observed_order(coarse_error: float, fine_error: float, refinement: float = 2.) -> float:
    """The convergence order implied by the errors of two runs whose step sizes differ by ``refinement``."""
    return float(np.log(coarse_error / fine_error) / np.log(refinement))


def bisect_increasing(predicate, low: float, high: float, steps: int) -> float:
    """Bisects the threshold of a monotone predicate, assuming ``predicate(low)`` holds and ``predicate(high)`` does not.

    Returns:
        The largest tested value at which ``predicate`` holds.
    """
    for _ in range(steps):
        middle = 0.5 * (low + high)
        if predicate(middle):
            low = middle
        else:
            high = middle
    return low

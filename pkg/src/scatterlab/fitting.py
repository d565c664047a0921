"""Log-log slope fitting for decay-rate verification."""

from __future__ import annotations

import numpy as np

__all__ = ["fit_log_slope", "fit_decay_exponent"]


def fit_log_slope(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares slope and intercept of log y against log x.

    Nonpositive samples are dropped; at least two points must survive.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0)
    if np.sum(keep) < 2:
        raise ValueError("need at least two positive samples for a slope fit")
    lx, ly = np.log(x[keep]), np.log(y[keep])
    slope, intercept = np.polyfit(lx, ly, 1)
    return float(slope), float(intercept)


def fit_decay_exponent(x: np.ndarray, y: np.ndarray) -> float:
    """Decay exponent p of y ~ C x^(-p): the negated log-log slope."""
    slope, _ = fit_log_slope(x, y)
    return -slope

"""Delayed exponential function and its exponentially weighted product form.

The delayed exponential is the piecewise-polynomial fundamental solution of
the pure-delay equation ``u'(t) = b * u(t - tau)`` with unit history: it
vanishes for ``t < -tau``, equals 1 on ``[-tau, 0]``, and gains one polynomial
degree per delay interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["DelayedExp", "fundamental_solution"]

# above this size of |base * b| a term is evaluated in log space to dodge
# overflow of base**j; below it, direct powers keep small cases exact
_LOG_TERM_CUTOFF = 1e2


def _term(base: float, b: float, j: int) -> float:
    # (base * b)**j / j!  with sign tracking for negative rates
    base = max(base, 0.0)  # guard tiny negative bases from floor rounding at knots
    x = base * abs(b)
    if x == 0.0:
        return 1.0 if j == 0 else 0.0
    sign = -1.0 if (b < 0.0 and j % 2) else 1.0
    if x > _LOG_TERM_CUTOFF or j > 20:
        return sign * math.exp(j * math.log(x) - math.lgamma(j + 1))
    return sign * x**j / math.factorial(j)


@dataclass(frozen=True)
class DelayedExp:
    """Scalar delayed exponential with rate ``b`` and delay ``tau``."""

    b: float
    tau: float

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"delay tau must be positive, got {self.tau}")

    def segment_count(self, t: float) -> int:
        """Number of polynomial terms beyond the constant 1 at time ``t``."""
        if t < -self.tau:
            raise ValueError(f"t={t} is below the support start -tau={-self.tau}")
        return int(math.floor(t / self.tau)) + 1

    def value(self, t: float) -> float:
        """Evaluate at ``t``: zero before ``-tau``, the finite sum after."""
        if t < -self.tau:
            return 0.0
        acc = 1.0
        for j in range(1, self.segment_count(t) + 1):
            acc += _term(t - (j - 1) * self.tau, self.b, j)
        return acc

    __call__ = value


def fundamental_solution(a: float, b: float, tau: float, t):
    """Response at times ``t`` of ``u'(t) = a u(t) + b u(t - tau)`` to a unit
    initial state with zero history.

    Equals ``exp(a t) * DelayedExp(b * exp(-a tau), tau).value(t - tau)``, but
    every term carries its own exponential factor, so no intermediate quantity
    grows like ``exp(|a| t)``.  That matters for stiff spectral modes, where
    the plain delayed-exponential value overflows long before the product
    does.  Vanishes for ``t < 0``.

    Parameters
    ----------
    a, b : float
        Instantaneous and delayed rates.
    tau : float
        Delay, positive.
    t : float or ndarray
        Evaluation times.

    Returns
    -------
    float or ndarray
        Matching the shape of ``t``.
    """
    if not tau > 0:
        raise ValueError(f"delay tau must be positive, got {tau}")
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    out = np.zeros_like(t_arr)
    alive = t_arr >= 0.0
    out[alive] = np.exp(a * t_arr[alive])
    if alive.any() and b != 0.0:
        k_max = int(math.floor(float(t_arr[alive].max()) / tau))
        log_b = math.log(abs(b))
        sign = 1.0
        for k in range(1, k_max + 1):
            sign *= -1.0 if b < 0.0 else 1.0
            s = t_arr - k * tau
            act = s >= 0.0
            sa = s[act]
            with np.errstate(divide="ignore"):
                log_mag = k * (np.log(sa) + log_b) - math.lgamma(k + 1) + a * sa
            out[act] += sign * np.exp(log_mag)  # s == 0 -> -inf -> term 0
    return float(out[0]) if scalar else out

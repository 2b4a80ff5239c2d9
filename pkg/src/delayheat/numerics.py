"""Shared numerical kernels.

Uniform grids, composite Simpson quadrature (plus the prefix/segment weight
variants the delay solvers need), deterministic bisection, and a damped
complex-Newton Lambert-W evaluator on the principal branch.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "BracketError",
    "ComplexRootResult",
    "ConvergenceError",
    "UniformGrid",
    "bisect",
    "lambert_w_log",
    "lambert_w_principal",
    "segment_weights",
    "simpson",
    "simpson_weights",
]


class BracketError(ValueError):
    """Root bracketing failed: no sign change over the supplied interval."""


class ConvergenceError(RuntimeError):
    """An iteration hit its cap before reaching the requested residual."""

    def __init__(self, message, last_iterate=None, residual=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


@dataclass(frozen=True)
class ComplexRootResult:
    """A located complex root with the modulus of its defining equation."""

    value: complex
    residual: float
    iterations: int


@dataclass(frozen=True)
class UniformGrid:
    """Uniform grid with ``n_cells`` cells on [t0, t1].

    Nodes are generated with endpoint pinning, so ``nodes[-1] == t1`` exactly.
    """

    t0: float
    t1: float
    n_cells: int

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise ValueError(f"grid needs t1 > t0, got [{self.t0}, {self.t1}]")
        if self.n_cells < 1:
            raise ValueError(f"grid needs at least one cell, got {self.n_cells}")

    @property
    def h(self) -> float:
        return (self.t1 - self.t0) / self.n_cells

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.n_cells + 1)


def simpson(samples, h: float) -> float:
    """Composite Simpson estimate of an integral from uniform samples.

    Parameters
    ----------
    samples : array_like
        Integrand values at the 2m+1 nodes of a uniform grid, m >= 1.
    h : float
        Grid spacing.

    Returns
    -------
    float
        The composite Simpson sum; exact for polynomials of degree <= 3.
    """
    y = np.asarray(samples, dtype=float)
    if y.ndim != 1 or len(y) < 3 or len(y) % 2 == 0:
        raise ValueError(
            f"Simpson needs an odd number (>= 3) of samples, got {len(y)}"
        )
    if not h > 0:
        raise ValueError(f"Simpson needs h > 0, got {h}")
    return float((h / 3.0) * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


@lru_cache(maxsize=None)
def simpson_weights(n_cells: int) -> np.ndarray:
    """Composite Simpson node weights for an even cell count.

    The integral is ``h * dot(weights, samples)``.
    """
    if n_cells < 2 or n_cells % 2:
        raise ValueError(f"Simpson weights need an even cell count >= 2, got {n_cells}")
    w = np.full(n_cells + 1, 2.0 / 3.0)
    w[1::2] = 4.0 / 3.0
    w[0] = w[-1] = 1.0 / 3.0
    w.flags.writeable = False
    return w


@lru_cache(maxsize=None)
def segment_weights(n_cells: int) -> np.ndarray:
    """Quadrature weights for any cell count >= 1.

    Even counts get composite Simpson; odd counts get Simpson on the first
    ``n_cells - 1`` cells and a trapezoid patch on the last one, which keeps a
    single uniform grid at the price of a locally lower order on that cell.
    """
    if n_cells < 1:
        raise ValueError(f"need at least one cell, got {n_cells}")
    if n_cells == 1:
        w = np.array([0.5, 0.5])
    elif n_cells % 2 == 0:
        w = np.array(simpson_weights(n_cells))
    else:
        w = np.zeros(n_cells + 1)
        w[:n_cells] += simpson_weights(n_cells - 1)
        w[-2] += 0.5
        w[-1] += 0.5
    w.flags.writeable = False
    return w


def bisect(f, a: float, b: float, tol: float) -> float:
    """Deterministic bisection for a root of ``f`` on [a, b].

    Requires a sign change between the endpoints. The midpoint rule is used
    throughout; an exact zero at the midpoint keeps the left half, so repeated
    runs return bit-identical results.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    fa = f(a)
    fb = f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0) == (fb > 0):
        raise BracketError(f"no sign change on [{a}, {b}]: f(a)={fa}, f(b)={fb}")
    while (b - a) > tol:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:  # interval at floating-point resolution
            break
        fm = f(mid)
        if fm == 0.0 or (fm > 0) == (fa > 0):
            if fm == 0.0:
                b = mid
            else:
                a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


_E = math.e


def _lambert_initial_guess(z: complex) -> complex:
    az = abs(z)
    if az < 0.5:
        return z * (1.0 - z)
    lz = cmath.log(z)
    asym = lz - cmath.log(lz) if lz != 0 else 0.0
    if az >= _E:
        return asym
    t = (az - 0.5) / (_E - 0.5)
    return (1.0 - t) * z * (1.0 - z) + t * asym


def lambert_w_principal(z: complex, tol: float = 1e-12, max_iter: int = 100) -> ComplexRootResult:
    """Principal-branch Lambert W: solve ``w * exp(w) = z``.

    Damped Newton iteration from an asymptotic initial guess for large ``|z|``
    and the series guess ``z(1 - z)`` for small ``|z|``, blended in between.
    For negative real ``z`` with ``|z| > 1/e`` the returned root has
    ``Im w`` in (0, pi].

    Raises
    ------
    ConvergenceError
        If the residual ``|w exp(w) - z|`` does not fall below
        ``tol * max(1, |z|)`` within ``max_iter`` iterations. The error
        carries the last iterate and its residual.
    """
    z = complex(z)
    if z == 0:
        raise ValueError("lambert_w_principal requires z != 0")
    bound = tol * max(1.0, abs(z))
    w = _lambert_initial_guess(z)
    res = abs(w * cmath.exp(w) - z)
    for it in range(1, max_iter + 1):
        if res <= bound:
            if z.imag == 0.0 and w.imag < 0.0:
                w = w.conjugate()
            return ComplexRootResult(w, res, it - 1)
        ew = cmath.exp(w)
        deriv = ew * (1.0 + w)
        if deriv == 0:
            deriv = 1e-300
        step = (w * ew - z) / deriv
        # damp: halve the step until the residual decreases
        for _ in range(50):
            cand = w - step
            cand_res = abs(cand * cmath.exp(cand) - z)
            if cand_res < res:
                break
            step *= 0.5
        w, res = cand, cand_res
    raise ConvergenceError(
        f"Lambert W failed to converge for z={z}: residual {res:.3e}",
        last_iterate=w,
        residual=res,
    )


def lambert_w_log(log_abs_z: float, arg_z: float = math.pi, tol: float = 1e-12,
                  max_iter: int = 100) -> ComplexRootResult:
    """Principal-branch Lambert W of ``z = exp(log_abs_z + i arg_z)``.

    Works directly with ``log z``, so it stays finite when ``|z|`` overflows a
    float. Newton runs on ``log w + w - log z``; the reported residual is the
    modulus of that log-form equation (callers wanting the direct residual
    must reassemble it from exponents).
    """
    zeta = complex(log_abs_z, arg_z)
    bound = tol * max(1.0, abs(zeta))
    w = zeta - cmath.log(zeta)
    q = cmath.log(w) + w - zeta
    for it in range(1, max_iter + 1):
        if abs(q) <= bound:
            return ComplexRootResult(w, abs(q), it - 1)
        step = q * w / (w + 1.0)
        for _ in range(50):
            cand = w - step
            cand_q = cmath.log(cand) + cand - zeta
            if abs(cand_q) < abs(q):
                break
            step *= 0.5
        w, q = cand, cand_q
    raise ConvergenceError(
        f"log-form Lambert W failed to converge for log z={zeta}: residual {abs(q):.3e}",
        last_iterate=w,
        residual=abs(q),
    )

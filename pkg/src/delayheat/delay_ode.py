"""Scalar linear delay ODE solvers.

Solves ``u'(t) = a u(t) + b u(t - tau) + f(t)`` with initial value ``u0`` and
history ``phi`` on ``[-tau, 0]`` by two independent routes:

* a closed-form evaluation built from the delayed-exponential fundamental
  solution and two convolution integrals, and
* the method of steps, which advances one delay interval at a time treating
  the delayed term as known data.

Each serves as the other's oracle. History and forcing are sampled functions
on one uniform lattice with an even number of cells per delay interval, so
every convolution reduces to Simpson sums over lattice slices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .delayed_exp import fundamental_solution
from .numerics import UniformGrid, segment_weights

__all__ = ["DelayOdeProblem", "Trajectory", "solve_closed_form", "solve_step_method"]


def _sample(fn, times: np.ndarray) -> np.ndarray:
    """Sample a callable on given times, accepting vectorized or scalar fns."""
    try:
        vals = np.asarray(fn(times), dtype=float)
        if vals.shape == times.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(float(s))) for s in times])


@dataclass(frozen=True, eq=False)
class DelayOdeProblem:
    """A scalar delay ODE instance with sampled history and forcing.

    ``history`` holds ``cells_per_tau + 1`` samples on ``[-tau, 0]``; its
    value at 0 is quadrature data only and need not equal ``u0``.  ``forcing``
    holds samples on ``[0, n_intervals * tau]`` on the same lattice, where
    ``n_intervals = ceil(horizon / tau)``; beyond ``horizon`` it is continued
    by zero so the solvers always work on whole delay intervals.
    """

    a: float
    b: float
    tau: float
    horizon: float
    u0: float
    history: np.ndarray
    forcing: np.ndarray

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not self.horizon > 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        c = len(self.history) - 1
        if c < 2 or c % 2:
            raise ValueError(f"cells per tau must be even and >= 2, got {c}")
        if len(self.forcing) != self.n_intervals * c + 1:
            raise ValueError(
                f"forcing needs {self.n_intervals * c + 1} samples "
                f"(ceil(horizon/tau) intervals at {c} cells each), got {len(self.forcing)}"
            )

    @property
    def cells_per_tau(self) -> int:
        return len(self.history) - 1

    @property
    def n_intervals(self) -> int:
        return int(math.ceil(self.horizon / self.tau - 1e-12))

    @property
    def step(self) -> float:
        return self.tau / self.cells_per_tau

    @property
    def lattice(self) -> UniformGrid:
        """The full sample lattice from ``-tau`` to the padded horizon."""
        n = self.n_intervals
        return UniformGrid(-self.tau, n * self.tau, (n + 1) * self.cells_per_tau)

    @classmethod
    def from_callables(cls, a, b, tau, horizon, u0, history, forcing=None,
                       cells_per_tau=200):
        """Build a problem by sampling ``history`` and ``forcing`` callables."""
        if cells_per_tau < 2 or cells_per_tau % 2:
            raise ValueError(f"cells_per_tau must be even and >= 2, got {cells_per_tau}")
        h = tau / cells_per_tau
        hist_nodes = -tau + h * np.arange(cells_per_tau + 1)
        hist_nodes[-1] = 0.0
        hist = _sample(history, hist_nodes)
        n_int = int(math.ceil(horizon / tau - 1e-12))
        f_nodes = h * np.arange(n_int * cells_per_tau + 1)
        f = np.zeros(len(f_nodes))
        if forcing is not None:
            live = f_nodes <= horizon * (1 + 1e-12)
            f[live] = _sample(forcing, f_nodes[live])
        return cls(float(a), float(b), float(tau), float(horizon), float(u0), hist, f)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Solution values on the lattice from ``-tau`` to the padded horizon.

    Values on ``[-tau, 0)`` are the supplied history samples, bit for bit;
    the value at 0 is ``u0``.  Nodes past ``horizon`` (the zero-padding up to
    a whole number of delay intervals) solve the zero-continued problem and
    carry reduced quadrature accuracy next to the continuation splice.
    """

    grid: UniformGrid
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != self.grid.n_cells + 1:
            raise ValueError(
                f"{len(self.values)} values for {self.grid.n_cells + 1} grid nodes"
            )

    def index_of(self, t: float) -> int:
        """Index of the grid node at time ``t`` (must lie on the grid)."""
        h = self.grid.h
        idx = int(round((t - self.grid.t0) / h))
        if idx < 0 or idx > self.grid.n_cells or abs(self.grid.t0 + idx * h - t) > 1e-6 * h:
            raise ValueError(f"t={t} is not a node of the trajectory grid")
        return idx

    def at(self, t: float) -> float:
        return float(self.values[self.index_of(t)])


@lru_cache(maxsize=None)
def _piecewise_weights(n_cells: int, phase: int, period: int) -> np.ndarray:
    """Simpson weights on [0, n_cells] with pieces split at the interior
    nodes ``phase + m * period``, where the convolution kernel has knots."""
    start = phase % period
    if start == 0:
        start = period
    w = np.zeros(n_cells + 1)
    edges = [0, *range(start, n_cells, period), n_cells]
    for lo, hi in zip(edges[:-1], edges[1:]):
        w[lo:hi + 1] += segment_weights(hi - lo)
    w.flags.writeable = False
    return w


def _check_alignment(problem: DelayOdeProblem, out_grid: UniformGrid) -> np.ndarray:
    h = problem.step
    lattice = problem.lattice
    nodes = out_grid.nodes
    idx = np.rint((nodes - lattice.t0) / h).astype(int)
    aligned = np.abs(lattice.t0 + idx * h - nodes) <= 1e-6 * h
    if not aligned.all() or idx.min() < 0 or idx.max() > lattice.n_cells:
        raise ValueError(
            "output grid is not aligned with the problem's history/forcing lattice"
        )
    return idx


def solve_closed_form(problem: DelayOdeProblem, out_grid: UniformGrid | None = None) -> Trajectory:
    """Evaluate the closed-form solution of a scalar delay ODE.

    At each lattice node ``t > 0`` the value is assembled from the
    fundamental solution ``F`` of the homogeneous delay equation as

    ``F(t) u0 + b * int_{-tau}^{0} F(t - tau - s) phi(s) ds
            + int_{0}^{t} F(t - s) f(s) ds``

    with both integrals evaluated by composite Simpson on the stored lattice,
    split at the kernel's knots (odd pieces get one trapezoid patch).

    Parameters
    ----------
    problem : DelayOdeProblem
    out_grid : UniformGrid, optional
        Output nodes; must coincide with lattice nodes. Defaults to the full
        lattice on ``[-tau, n_intervals * tau]``.

    Returns
    -------
    Trajectory
    """
    c = problem.cells_per_tau
    h = problem.step
    n = problem.n_intervals * c
    F = fundamental_solution(problem.a, problem.b, problem.tau, h * np.arange(n + 1))
    hist = problem.history
    forc = problem.forcing
    vals = np.empty(c + n + 1)
    vals[:c] = hist[:c]
    vals[c] = problem.u0
    for i in range(1, n + 1):
        acc = F[i] * problem.u0
        jh = min(i, c)
        wh = _piecewise_weights(jh, i % c, c)
        acc += problem.b * h * float(np.dot(wh * F[i - jh:i + 1][::-1], hist[:jh + 1]))
        wf = _piecewise_weights(i, i % c, c)
        acc += h * float(np.dot(wf * F[i::-1], forc[:i + 1]))
        vals[c + i] = acc
    if out_grid is None:
        return Trajectory(problem.lattice, vals)
    idx = _check_alignment(problem, out_grid)
    return Trajectory(out_grid, vals[idx])


def solve_step_method(problem: DelayOdeProblem, cells_per_tau: int | None = None) -> Trajectory:
    """Solve a scalar delay ODE by the method of steps.

    On each interval ``[k tau, (k+1) tau]`` the delayed term is known data
    from the previous interval, so the update is the scalar Duhamel formula

    ``u(t) = exp(a (t - k tau)) u(k tau)
             + int_{k tau}^{t} exp(a (t - s)) (b u(s - tau) + f(s)) ds``

    with the integral taken over progressively longer node prefixes (odd
    prefixes get one trapezoid patch at the last cell). Continuity between
    intervals holds by construction.

    Parameters
    ----------
    problem : DelayOdeProblem
    cells_per_tau : int, optional
        Must match the problem's sampling lattice when given; the sampled
        history and forcing fix the resolution.

    Returns
    -------
    Trajectory
    """
    c = problem.cells_per_tau
    if cells_per_tau is not None and cells_per_tau != c:
        raise ValueError(
            f"cells_per_tau={cells_per_tau} does not match the problem lattice ({c})"
        )
    h = problem.step
    E = np.exp(problem.a * h * np.arange(c + 1))
    prefix_w = [None] + [segment_weights(j) for j in range(1, c + 1)]
    vals = np.empty((problem.n_intervals + 1) * c + 1)
    vals[:c] = problem.history[:c]
    vals[c] = problem.u0
    for k in range(problem.n_intervals):
        base = c + k * c
        # delayed samples: raw history on the first interval (its right
        # endpoint is phi(0), not u0), computed trajectory afterwards
        delayed = problem.history if k == 0 else vals[base - c:base + 1]
        g = problem.b * delayed + problem.forcing[k * c:(k + 1) * c + 1]
        u_start = vals[base]
        for j in range(1, c + 1):
            conv = float(np.dot(prefix_w[j] * E[:j + 1][::-1], g[:j + 1]))
            vals[base + j] = E[j] * u_start + h * conv
    return Trajectory(problem.lattice, vals)

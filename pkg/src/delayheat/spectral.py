"""Spectral solver for the 1D heat equation with a constant delay.

Diagonalizes ``u_t = c_a u_xx + c0 u + c_a_delay u_xx(t - tau) + c0_delay
u(t - tau) + f`` over the sine (Dirichlet) or cosine (Neumann) eigenbasis of
the negative second derivative on ``[0, L]``, solves the resulting family of
scalar delay ODEs mode by mode, and synthesizes field snapshots.  Only
constant coefficients are supported; the explicit modal representation
requires a common eigenbasis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .delay_ode import DelayOdeProblem, Trajectory, solve_closed_form
from .numerics import UniformGrid, simpson_weights

__all__ = [
    "DelayHeatProblem",
    "FieldSnapshot",
    "SpectralBasis",
    "assemble_from_pde",
    "dirichlet_lift",
    "project",
    "solve",
    "synthesize",
]


@dataclass(frozen=True)
class SpectralBasis:
    """First ``n_modes`` eigenpairs of ``-d^2/dx^2`` on ``[0, L]``.

    Dirichlet: ``mu_n = (n pi / L)^2``, ``phi_n = sqrt(2/L) sin(n pi x / L)``.
    Neumann: ``mu_n = ((n-1) pi / L)^2``, ``phi_1 = 1/sqrt(L)`` and
    ``phi_n = sqrt(2/L) cos((n-1) pi x / L)`` for ``n > 1``.
    Both families are orthonormal in L^2(0, L).
    """

    kind: str
    L: float
    n_modes: int

    def __post_init__(self):
        if self.kind not in ("dirichlet", "neumann"):
            raise ValueError(f"kind must be 'dirichlet' or 'neumann', got {self.kind!r}")
        if not self.L > 0:
            raise ValueError(f"length must be positive, got {self.L}")
        if self.n_modes < 1:
            raise ValueError(f"need at least one mode, got {self.n_modes}")

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues ``mu_n >= 0`` of the negative second derivative."""
        n = np.arange(1, self.n_modes + 1)
        if self.kind == "dirichlet":
            return (n * math.pi / self.L) ** 2
        return ((n - 1) * math.pi / self.L) ** 2

    def mode_matrix(self, x) -> np.ndarray:
        """Eigenfunction values, shape ``(n_modes, len(x))``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        n = np.arange(1, self.n_modes + 1)[:, None]
        if self.kind == "dirichlet":
            return math.sqrt(2.0 / self.L) * np.sin(n * math.pi * x[None, :] / self.L)
        modes = math.sqrt(2.0 / self.L) * np.cos((n - 1) * math.pi * x[None, :] / self.L)
        modes[0, :] = 1.0 / math.sqrt(self.L)
        return modes


def project(values, grid: UniformGrid, basis: SpectralBasis) -> np.ndarray:
    """Modal coefficients of field samples by Simpson projection.

    Parameters
    ----------
    values : array_like
        Field samples on the grid nodes; the last axis must match them. Any
        leading axes (e.g. time slices) are kept.
    grid : UniformGrid
        Uniform spatial grid spanning ``[0, L]`` with an even cell count.
    basis : SpectralBasis

    Returns
    -------
    ndarray
        Coefficients ``<field, phi_n>``, shape ``values.shape[:-1] + (n_modes,)``.
    """
    if abs(grid.t0) > 1e-12 * basis.L or abs(grid.t1 - basis.L) > 1e-12 * basis.L:
        raise ValueError(f"projection grid must span [0, {basis.L}], got [{grid.t0}, {grid.t1}]")
    vals = np.asarray(values, dtype=float)
    if vals.shape[-1] != grid.n_cells + 1:
        raise ValueError(f"{vals.shape[-1]} samples for {grid.n_cells + 1} grid nodes")
    w = simpson_weights(grid.n_cells)
    modes = basis.mode_matrix(grid.nodes)
    return grid.h * (vals * w) @ modes.T


@dataclass(frozen=True, eq=False)
class FieldSnapshot:
    """Synthesized field values at one time."""

    t: float
    x_nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != len(self.x_nodes):
            raise ValueError("values and x_nodes must have equal length")


def synthesize(coeffs, basis: SpectralBasis, x_nodes, t: float = 0.0) -> FieldSnapshot:
    """Pointwise modal sum ``sum_n c_n phi_n(x)`` as a FieldSnapshot."""
    coeffs = np.asarray(coeffs, dtype=float)
    x = np.atleast_1d(np.asarray(x_nodes, dtype=float))
    values = coeffs @ basis.mode_matrix(x)
    return FieldSnapshot(t, x, values)


def dirichlet_lift(gamma_left: float, gamma_right: float, basis: SpectralBasis,
                   x_cells: int = 4096) -> np.ndarray:
    """Modal coefficients of the stationary boundary lift.

    For constant diffusivity and zero reaction the lift is the linear
    interpolant ``gamma_left (1 - x/L) + gamma_right x/L``, projected onto the
    Dirichlet basis by quadrature.
    """
    if basis.kind != "dirichlet":
        raise ValueError("boundary lift requires a Dirichlet basis")
    grid = UniformGrid(0.0, basis.L, x_cells)
    x = grid.nodes
    lift = gamma_left * (1.0 - x / basis.L) + gamma_right * (x / basis.L)
    return project(lift, grid, basis)


@dataclass(frozen=True, eq=False)
class DelayHeatProblem:
    """Per-mode delay-ODE family assembled from a 1D delayed heat equation.

    ``rate`` and ``rate_delay`` hold the instantaneous and delayed modal
    rates.  ``forcing_n`` holds the modal loads of the volumetric source and
    ``boundary_n`` the boundary-lift loads (all zero for Neumann or
    homogeneous Dirichlet data); both are sampled on the delay lattice of
    ``cells_per_tau`` cells per interval, continued by zero past ``horizon``.
    """

    basis: SpectralBasis
    tau: float
    rate: np.ndarray
    rate_delay: np.ndarray
    u0_n: np.ndarray
    history_n: np.ndarray
    forcing_n: np.ndarray
    boundary_n: np.ndarray
    horizon: float

    def __post_init__(self):
        n = self.basis.n_modes
        if not (len(self.rate) == len(self.rate_delay) == len(self.u0_n) == n
                and self.history_n.shape[0] == n
                and self.forcing_n.shape == self.boundary_n.shape
                and self.forcing_n.shape[0] == n):
            raise ValueError("modal arrays must all have basis.n_modes rows")
        c = self.history_n.shape[1] - 1
        if c < 2 or c % 2:
            raise ValueError(f"cells per tau must be even and >= 2, got {c}")

    @property
    def cells_per_tau(self) -> int:
        return self.history_n.shape[1] - 1

    @property
    def n_intervals(self) -> int:
        return int(math.ceil(self.horizon / self.tau - 1e-12))

    def mode_problem(self, n: int) -> DelayOdeProblem:
        """The scalar delay ODE of mode index ``n`` (0-based)."""
        return DelayOdeProblem(
            a=float(self.rate[n]),
            b=float(self.rate_delay[n]),
            tau=self.tau,
            horizon=self.horizon,
            u0=float(self.u0_n[n]),
            history=self.history_n[n],
            forcing=self.forcing_n[n] + self.boundary_n[n],
        )


def solve(problem: DelayHeatProblem, cells_per_tau: int | None = None,
          workers: int = 1) -> list[Trajectory]:
    """Solve every mode's delay ODE by the closed form.

    Modes are independent; the result is deterministic regardless of the
    order or parallelism of the per-mode solves (``workers > 1`` runs them on
    a thread pool, collected in mode order).
    """
    if cells_per_tau is not None and cells_per_tau != problem.cells_per_tau:
        raise ValueError(
            f"cells_per_tau={cells_per_tau} does not match the problem lattice "
            f"({problem.cells_per_tau})"
        )
    indices = range(problem.basis.n_modes)
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda n: solve_closed_form(problem.mode_problem(n)), indices))
    return [solve_closed_form(problem.mode_problem(n)) for n in indices]


def _slice_samples(fn, times, x_nodes):
    """Sample ``fn(t, x)`` on a time/space grid, shape (len(times), len(x))."""
    rows = []
    for t in times:
        row = np.asarray(fn(float(t), x_nodes), dtype=float)
        if row.shape != x_nodes.shape:
            row = np.array([float(fn(float(t), float(x))) for x in x_nodes])
        rows.append(row)
    return np.vstack(rows)


def assemble_from_pde(c_a: float, c0: float, c_a_delay: float, c0_delay: float,
                      basis: SpectralBasis, tau: float, horizon: float,
                      cells_per_tau: int, *, initial, history, forcing=None,
                      gamma_left=None, gamma_right=None,
                      x_cells: int = 512) -> DelayHeatProblem:
    """Assemble the modal delay-ODE family of a constant-coefficient PDE.

    The instantaneous operator is ``c_a d^2/dx^2 + c0`` (``c_a > 0``) and the
    delayed one ``c_a_delay d^2/dx^2 + c0_delay``, giving modal rates
    ``-c_a mu_n + c0`` and ``-c_a_delay mu_n + c0_delay``.

    Parameters
    ----------
    basis : SpectralBasis
    tau, horizon : float
    cells_per_tau : int
        Even lattice resolution per delay interval.
    initial : callable x -> field, or samples on the projection grid
    history : callable (t, x) -> field
        Sampled slice by slice on the history lattice.
    forcing : callable (t, x) -> field, optional
    gamma_left, gamma_right : callable t -> float, optional
        Dirichlet endpoint data; enters through the boundary-lift load
        ``-rate_n * <lift(t), phi_n>``. Rejected on a Neumann basis.
    x_cells : int
        Spatial quadrature cells for all projections.

    Returns
    -------
    DelayHeatProblem
    """
    if not c_a > 0:
        raise ValueError(f"instantaneous diffusivity must be positive, got {c_a}")
    if cells_per_tau < 2 or cells_per_tau % 2:
        raise ValueError(f"cells_per_tau must be even and >= 2, got {cells_per_tau}")
    mu = basis.eigenvalues()
    rate = -c_a * mu + c0
    rate_delay = -c_a_delay * mu + c0_delay

    xg = UniformGrid(0.0, basis.L, x_cells)
    x = xg.nodes
    h = tau / cells_per_tau
    n_int = int(math.ceil(horizon / tau - 1e-12))

    if callable(initial):
        init_samples = np.asarray(initial(x), dtype=float)
        if init_samples.shape != x.shape:
            init_samples = np.array([float(initial(float(xx))) for xx in x])
    else:
        init_samples = np.asarray(initial, dtype=float)
    u0_n = project(init_samples, xg, basis)

    hist_times = -tau + h * np.arange(cells_per_tau + 1)
    hist_times[-1] = 0.0
    history_n = project(_slice_samples(history, hist_times, x), xg, basis).T

    f_times = h * np.arange(n_int * cells_per_tau + 1)
    forcing_n = np.zeros((basis.n_modes, len(f_times)))
    if forcing is not None:
        live = f_times <= horizon * (1 + 1e-12)
        forcing_n[:, live] = project(_slice_samples(forcing, f_times[live], x), xg, basis).T

    boundary_n = np.zeros_like(forcing_n)
    if gamma_left is not None or gamma_right is not None:
        if basis.kind != "dirichlet":
            raise ValueError("boundary data requires a Dirichlet basis")
        lift_left = dirichlet_lift(1.0, 0.0, basis, x_cells=max(x_cells, 2048))
        lift_right = dirichlet_lift(0.0, 1.0, basis, x_cells=max(x_cells, 2048))
        live = f_times <= horizon * (1 + 1e-12)
        zeros = np.zeros(int(live.sum()))
        gl = np.array([float(gamma_left(t)) for t in f_times[live]]) if gamma_left else zeros
        gr = np.array([float(gamma_right(t)) for t in f_times[live]]) if gamma_right else zeros
        lift_coeff = np.outer(lift_left, gl) + np.outer(lift_right, gr)
        boundary_n[:, live] = -rate[:, None] * lift_coeff

    return DelayHeatProblem(
        basis=basis,
        tau=tau,
        rate=rate,
        rate_delay=rate_delay,
        u0_n=u0_n,
        history_n=history_n,
        forcing_n=forcing_n,
        boundary_n=boundary_n,
        horizon=horizon,
    )

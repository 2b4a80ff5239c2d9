"""Exponential-decay certificate for the dissipative delayed heat equation.

Given ellipticity bounds ``kappa`` (instantaneous part), ``tilde_kappa`` and
sup-norm ``tilde_lambda`` (delayed part), the certificate fixes the free
constants of a Lyapunov-functional argument - the weight values ``rho(0)`` and
``rho(tau)`` of a linear decreasing weight, the Young-inequality parameter
``eps``, and the derived constants ``alpha1``, ``alpha2``, ``rho0``, ``beta`` -
and yields a decay rate ``omega`` and amplitude ``C`` with
``E(t) <= C exp(-2 omega t) E(0)`` for the energy

``E(t) = 1/2 ||u(t)||^2 + 1/2 int_{t-tau}^{t} <a_delay grad u, grad u> ds``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .delay_ode import Trajectory
from .numerics import simpson_weights
from .spectral import DelayHeatProblem, SpectralBasis, solve

__all__ = [
    "CoefficientBounds",
    "EnergyTrace",
    "StabilityCertificate",
    "build_certificate",
    "certified_energy_bound",
    "check_condition",
    "empirical_energy_check",
    "energy_trace",
    "fit_decay_rate",
    "optimal_epsilon",
    "random_dissipative_problem",
]


@dataclass(frozen=True)
class CoefficientBounds:
    """Ellipticity data of the two diffusion operators plus the delay."""

    kappa: float
    tilde_kappa: float
    tilde_lambda: float
    tau: float

    def __post_init__(self):
        for name in ("kappa", "tilde_kappa", "tilde_lambda", "tau"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.tilde_kappa > self.tilde_lambda:
            raise ValueError(
                f"lower bound tilde_kappa={self.tilde_kappa} exceeds "
                f"sup bound tilde_lambda={self.tilde_lambda}"
            )


def check_condition(bounds: CoefficientBounds) -> bool:
    """Strict dissipativity condition ``kappa > tilde_lambda * sqrt(tilde_lambda / tilde_kappa)``."""
    return bounds.kappa > bounds.tilde_lambda * math.sqrt(
        bounds.tilde_lambda / bounds.tilde_kappa
    )


def optimal_epsilon(bounds: CoefficientBounds) -> float:
    """Young parameter minimizing ``chi(eps) = tilde_lambda/2 (eps + tilde_lambda/(eps tilde_kappa))``."""
    return math.sqrt(bounds.tilde_lambda / bounds.tilde_kappa)


@dataclass(frozen=True)
class StabilityCertificate:
    """Constants of the Lyapunov decay proof.

    ``rho_at_0`` and ``rho_at_tau`` are the endpoint values of the linear
    weight; ``rho0`` is its slope constant ``(rho(0) - rho(tau)) / tau^2``.
    ``C`` is the amplitude ``rho(0)/rho(tau)``; ``C_equiv`` is the more
    conservative constant from the Lyapunov-energy equivalence, reported for
    reference.
    """

    feasible: bool
    eps: float
    rho_at_0: float
    rho_at_tau: float
    rho0: float
    alpha1: float
    alpha2: float
    beta: float
    omega: float
    C: float
    C_equiv: float


def build_certificate(bounds: CoefficientBounds, margin: float = 0.1,
                      eps: float | None = None) -> StabilityCertificate:
    """Construct the decay certificate.

    ``rho(tau)`` sits ``margin`` above its lower bound
    ``tau * tilde_lambda / (2 eps tilde_kappa)``; ``rho(0)`` is the midpoint
    of its feasible interval when that interval is nonempty.  Then

    ``alpha1 = kappa - tilde_lambda eps / 2 - tilde_lambda rho(0) / tau``,
    ``alpha2 = tilde_kappa rho(tau) / tau - tilde_lambda / (2 eps)``,
    ``beta = min(alpha1, alpha2, rho0)``,
    ``omega = beta/2 * min(1, tau / (2 rho(0)))``, ``C = rho(0)/rho(tau)``.

    Infeasibility (any constant nonpositive) is a result state, not an error.

    Parameters
    ----------
    bounds : CoefficientBounds
    margin : float
        Relative headroom of ``rho(tau)`` over its lower bound, in (0, 1).
    eps : float, optional
        Override for the Young parameter; defaults to the optimizer
        ``sqrt(tilde_lambda / tilde_kappa)``.
    """
    if not 0 < margin < 1:
        raise ValueError(f"margin must lie in (0, 1), got {margin}")
    if eps is None:
        eps = optimal_epsilon(bounds)
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    tau = bounds.tau
    lam = bounds.tilde_lambda
    rho_tau = (1.0 + margin) * tau * lam / (2.0 * eps * bounds.tilde_kappa)
    rho_zero_upper = tau * (bounds.kappa - lam * eps / 2.0) / lam
    if rho_zero_upper > rho_tau:
        rho_zero = 0.5 * (rho_tau + rho_zero_upper)
    else:
        rho_zero = (1.0 + margin) * rho_tau  # infeasible; keep rho decreasing
    rho0 = (rho_zero - rho_tau) / tau**2
    alpha1 = bounds.kappa - lam * eps / 2.0 - lam * rho_zero / tau
    alpha2 = bounds.tilde_kappa * rho_tau / tau - lam / (2.0 * eps)
    beta = min(alpha1, alpha2, rho0)
    omega = 0.5 * beta * min(1.0, tau / (2.0 * rho_zero))
    feasible = (
        check_condition(bounds)
        and alpha1 > 0 and alpha2 > 0 and rho0 > 0 and omega > 0
    )
    return StabilityCertificate(
        feasible=feasible,
        eps=eps,
        rho_at_0=rho_zero,
        rho_at_tau=rho_tau,
        rho0=rho0,
        alpha1=alpha1,
        alpha2=alpha2,
        beta=beta,
        omega=omega,
        C=rho_zero / rho_tau,
        C_equiv=max(1.0, 2.0 * rho_zero / tau) / min(1.0, 2.0 * rho_tau / tau),
    )


@dataclass(frozen=True, eq=False)
class EnergyTrace:
    """Sampled energy values over time."""

    times: np.ndarray
    values: np.ndarray


def energy_trace(trajectories: list[Trajectory], weights, tau: float) -> EnergyTrace:
    """Energy of a modal solution at every lattice time ``t >= 0``.

    ``E(t) = 1/2 sum_n u_n(t)^2
           + 1/2 int_{t - tau}^{t} sum_n w_n u_n(s)^2 ds``

    where ``w_n`` is the modal weight of the delayed gradient form (for a
    constant delayed diffusivity ``c``, ``w_n = c * mu_n``).  The window
    integral uses composite Simpson over the ``cells_per_tau`` lattice cells.
    """
    weights = np.asarray(weights, dtype=float)
    if len(weights) != len(trajectories):
        raise ValueError("one weight per mode trajectory is required")
    grid = trajectories[0].grid
    for traj in trajectories[1:]:
        if traj.grid != grid:
            raise ValueError("all trajectories must share one grid")
    h = grid.h
    c = int(round(tau / h))
    if abs(c * h - tau) > 1e-9 * tau or c < 2:
        raise ValueError("trajectory grid does not resolve the delay interval")
    if grid.t0 > -tau + 1e-12 * tau:
        raise ValueError("trajectories must start at -tau to cover the first energy window")
    values = np.vstack([traj.values for traj in trajectories])
    kinetic = 0.5 * (values**2).sum(axis=0)
    weighted = (weights[:, None] * values**2).sum(axis=0)
    sw = simpson_weights(c)
    n_nodes = values.shape[1]
    times = grid.nodes
    out_t, out_e = [], []
    for i in range(c, n_nodes):
        window = 0.5 * h * float(np.dot(sw, weighted[i - c:i + 1]))
        out_t.append(times[i])
        out_e.append(kinetic[i] + window)
    return EnergyTrace(np.array(out_t), np.array(out_e))


def fit_decay_rate(trace: EnergyTrace, window: tuple[float, float]) -> float:
    """Least-squares rate of ``E(t) ~ exp(-2 omega t)`` over a time window."""
    t0, t1 = window
    mask = (trace.times >= t0) & (trace.times <= t1)
    if mask.sum() < 2:
        raise ValueError("decay window must contain at least two samples")
    energies = trace.values[mask]
    if (energies <= 0).any():
        raise ValueError("decay fit requires strictly positive energies")
    slope = np.polyfit(trace.times[mask], np.log(energies), 1)[0]
    return -0.5 * float(slope)


def random_dissipative_problem(bounds: CoefficientBounds, rng,
                               *, coeff_delay: float | None = None,
                               n_modes: int = 6, length: float = 1.0,
                               cells_per_tau: int = 32,
                               horizon_intervals: int = 10):
    """A random smooth homogeneous Dirichlet problem realizing the bounds.

    Constant coefficients: the instantaneous diffusivity is ``kappa`` and the
    delayed one is drawn from ``[tilde_kappa, tilde_lambda]`` (both bounds are
    then honest envelopes).  Histories are random low-order polynomials in
    time with modal amplitudes decaying like ``1/(1 + mu_n)``, and the initial
    state matches the history at 0.  Returns the problem and the modal
    weights of the delayed gradient form.
    """
    basis = SpectralBasis("dirichlet", length, n_modes)
    mu = basis.eigenvalues()
    if coeff_delay is None:
        coeff_delay = float(rng.uniform(bounds.tilde_kappa, bounds.tilde_lambda))
    tau = bounds.tau
    h = tau / cells_per_tau
    hist_times = -tau + h * np.arange(cells_per_tau + 1)
    s = (hist_times + tau) / tau
    coeff = rng.uniform(-1.0, 1.0, size=(n_modes, 3)) / (1.0 + mu)[:, None]
    history_n = coeff[:, [0]] + coeff[:, [1]] * s + coeff[:, [2]] * s**2
    horizon = horizon_intervals * tau
    problem = DelayHeatProblem(
        basis=basis,
        tau=tau,
        rate=-bounds.kappa * mu,
        rate_delay=-coeff_delay * mu,
        u0_n=history_n[:, -1].copy(),
        history_n=history_n,
        forcing_n=np.zeros((n_modes, horizon_intervals * cells_per_tau + 1)),
        boundary_n=np.zeros((n_modes, horizon_intervals * cells_per_tau + 1)),
        horizon=horizon,
    )
    return problem, coeff_delay * mu


def certified_energy_bound(certificate: StabilityCertificate, trace: EnergyTrace) -> np.ndarray:
    """The certified envelope ``C exp(-2 omega t) E(0)`` on the trace times."""
    e0 = trace.values[0]
    return certificate.C * np.exp(-2.0 * certificate.omega * trace.times) * e0


def empirical_energy_check(bounds: CoefficientBounds, rng, margin: float = 0.1, **kwargs):
    """Simulate a random realization and report (trace, bound, certificate)."""
    cert = build_certificate(bounds, margin=margin)
    problem, weights = random_dissipative_problem(bounds, rng, **kwargs)
    trajectories = solve(problem)
    trace = energy_trace(trajectories, weights, bounds.tau)
    return trace, certified_energy_bound(cert, trace), cert

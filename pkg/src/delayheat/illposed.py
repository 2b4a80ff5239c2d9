"""Characteristic roots of the under-regularized delayed heat equation.

For the modal ansatz ``u(t) = exp(omega t) phi`` of

``d^m/dt^m u(t) = -A u(t - tau) - eps (A)^alpha u(t)``

with eigenvalue magnitude ``lam`` of the positive operator ``A``, the growth
rates solve ``omega^m + eps lam^alpha + lam exp(-tau omega) = 0``.  When the
regularization order ``alpha`` is below 1, ``Re omega`` diverges along an
eigenvalue sweep (ill-posedness); at ``alpha = 1`` it stays bounded.  Three
routes are implemented: the exact Lambert-W reduction for ``m = 1``, a
bisection on the reduced real equation for ``m = 2`` with prescribed
eigenvalue, and the interval construction that manufactures an eigenvalue
sequence for any ``m >= 2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .numerics import BracketError, bisect, lambert_w_log, lambert_w_principal

__all__ = [
    "CharProblem",
    "CharacteristicRoot",
    "EigenvalueConstruction",
    "ScanPoint",
    "blowup_table",
    "construct_eigenvalues",
    "growth_scan",
    "root_m1",
    "root_m2",
]

# largest |log z| handed to the direct Lambert evaluator before switching to
# the log-argument form (exp(600) is representable, exp(710) is not)
_DIRECT_LOG_CUTOFF = 600.0


@dataclass(frozen=True)
class CharProblem:
    """One modal characteristic equation ``omega^m + eps lam^alpha + lam e^{-tau omega} = 0``."""

    m: int
    alpha: float
    eps: float
    tau: float
    lam: float

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"time order m must be >= 1, got {self.m}")
        for name in ("eps", "tau", "lam"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.alpha > 1:
            raise ValueError(f"regularization order must be <= 1, got {self.alpha}")


@dataclass(frozen=True)
class CharacteristicRoot:
    """A characteristic root with its defining-equation residual.

    For ``m = 1`` the shifted root ``v = omega + eps lam^alpha`` is carried
    along and the residual is ``|v + lam exp(tau eps lam^alpha) exp(-tau v)|``;
    for ``m >= 2`` the residual is
    ``|omega^m + eps lam^alpha + lam exp(-tau omega)|``.
    """

    problem: CharProblem
    omega: complex
    residual: float
    v: complex | None = None


def root_m1(problem: CharProblem, tol: float = 1e-12, max_iter: int = 100) -> CharacteristicRoot:
    """First-order characteristic root via the Lambert-W reduction.

    Substituting ``v = omega + eps lam^alpha`` turns the characteristic
    equation into ``v = -lam exp(tau eps lam^alpha) exp(-tau v)``, i.e.
    ``tau v exp(tau v) = -tau lam exp(tau eps lam^alpha)``, solved on the
    principal branch (``Im v`` in ``(0, pi/tau]`` once the argument magnitude
    exceeds ``1/e``).  The argument is kept in log form when
    ``tau eps lam^alpha`` is large enough to overflow a float.
    """
    if problem.m != 1:
        raise ValueError(f"root_m1 requires m = 1, got m = {problem.m}")
    power = problem.eps * problem.lam ** problem.alpha
    log_mag = math.log(problem.tau * problem.lam) + problem.tau * power
    if log_mag <= _DIRECT_LOG_CUTOFF:
        result = lambert_w_principal(-math.exp(log_mag), tol=tol, max_iter=max_iter)
    else:
        result = lambert_w_log(log_mag, math.pi, tol=tol, max_iter=max_iter)
    w = result.value
    if w.imag < 0:
        w = w.conjugate()
    v = w / problem.tau
    omega = v - power
    residual = abs(v + cmath.exp(math.log(problem.lam) + problem.tau * power - problem.tau * v))
    return CharacteristicRoot(problem, omega, residual, v=v)


@dataclass(frozen=True)
class ScanPoint:
    """One eigenvalue of a growth-rate sweep."""

    lam: float
    omega: complex
    v: complex
    v_over_lambda: float
    residual: float


def growth_scan(alpha: float, eps: float, tau: float, lambdas) -> list[ScanPoint]:
    """Growth rates ``Re omega`` along a strictly increasing eigenvalue sweep."""
    lams = [float(lam) for lam in lambdas]
    if any(b <= a for a, b in zip(lams, lams[1:])):
        raise ValueError("eigenvalue sweep must be strictly increasing")
    points = []
    for lam in lams:
        root = root_m1(CharProblem(1, alpha, eps, tau, lam))
        points.append(ScanPoint(lam, root.omega, root.v, abs(root.v) / lam, root.residual))
    return points


def _h1(z: float) -> float:
    """Inverse of ``y exp(y)`` on [0, inf)."""
    if z < 0:
        raise ValueError(f"h1 requires z >= 0, got {z}")
    if z == 0.0:
        return 0.0
    return lambert_w_principal(complex(z)).value.real


def _h2(eta: float, tol: float = 1e-14) -> float:
    """Inverse of ``2 y / sin(y)`` on [pi/2, pi), an increasing bijection onto [pi, inf)."""
    if eta < math.pi:
        raise ValueError(f"h2 requires eta >= pi, got {eta}")
    if eta == math.pi:
        return 0.5 * math.pi

    def f(y):
        return 2.0 * y / math.sin(y) - eta

    hi = math.pi - 0.25 * math.pi
    while f(hi) < 0:
        hi = 0.5 * (hi + math.pi)
        if math.pi - hi < 1e-15:
            break
    return bisect(f, 0.5 * math.pi, hi, tol)


def root_m2(lam: float, alpha: float, bisect_tol: float = 1e-13) -> CharacteristicRoot:
    """Second-order characteristic root with a prescribed eigenvalue.

    Normalized to ``eps = tau = 1``.  Writing ``omega = y1 + i y2`` with
    ``y2`` in ``[pi/2, pi)``, the imaginary part of the characteristic
    equation becomes ``y1 e^{y1} * (2 y2 / sin y2) = lam``; with ``h1`` and
    ``h2`` the inverses of those two factors, the real part reduces to one
    scalar equation in ``z``

    ``F(z) = h1(z)^2 - h2(lam/z)^2 + lam^alpha + lam e^{-h1(z)} cos(h2(lam/z))``

    solved by bisection in ``log z`` on ``(0, lam/pi]``.

    Raises
    ------
    BracketError
        If ``F`` has no sign change over the bracket, which signals an
        eigenvalue below the construction's threshold.
    """
    if alpha >= 1:
        raise ValueError(f"construction requires alpha < 1, got {alpha}")
    if not lam > 0:
        raise ValueError(f"eigenvalue must be positive, got {lam}")

    def f_of_log(u):
        z = math.exp(u)
        h1 = _h1(z)
        h2 = _h2(lam / z)
        return h1 * h1 - h2 * h2 + lam**alpha + lam * math.exp(-h1) * math.cos(h2)

    lo = math.log(lam) - 28.0  # z -> 0 limit: -pi^2 + lam^alpha - lam
    hi = math.log(lam / math.pi)
    try:
        u_root = bisect(f_of_log, lo, hi, bisect_tol)
    except BracketError as exc:
        raise BracketError(
            f"no root bracket for lam={lam}: eigenvalue below the construction threshold"
        ) from exc
    z = math.exp(u_root)
    omega = complex(_h1(z), _h2(lam / z))
    residual = abs(omega * omega + lam**alpha + lam * cmath.exp(-omega))
    problem = CharProblem(2, alpha, 1.0, 1.0, lam)
    return CharacteristicRoot(problem, omega, residual)


@dataclass(frozen=True)
class EigenvalueConstruction:
    """One manufactured eigenvalue of the general-m construction."""

    k: int
    x: float
    lam: float
    residual: float


def construct_eigenvalues(m: int, alpha: float, eps: float, tau: float,
                          k_range, bisect_tol: float = 1e-13) -> list[EigenvalueConstruction]:
    """Manufacture eigenvalues making ``omega = x (1 + i tan(pi/2m))`` a root.

    For each index ``k`` the real part ``x_k`` is the bisection root of
    ``f1(x) = eps e^{alpha tau x} sin(tau beta x)^{1-alpha}`` against
    ``f2(x) = (1 + beta^2)^{(m/2)(1-alpha)} x^{m(1-alpha)} (-cos(tau beta x))``
    inside ``I_k = ((pi + 4 k pi)/(2 tau beta), (pi + 2 k pi)/(tau beta))``,
    where ``beta = tan(pi/(2m))``; the eigenvalue follows as
    ``lam_k = (1 + beta^2)^{m/2} x_k^m e^{tau x_k} / sin(tau beta x_k)``.
    The interval endpoints carry the exact sign pattern
    ``f1(a_k) > 0 > -f2(b_k)``, so a sign change is guaranteed.  Both
    sequences are strictly increasing in ``k``.
    """
    if m < 2:
        raise ValueError(f"construction requires m >= 2, got {m}")
    if alpha >= 1:
        raise ValueError(f"construction requires alpha < 1, got {alpha}")
    beta = math.tan(math.pi / (2 * m))
    one_m_a = 1.0 - alpha
    amp = (1.0 + beta * beta) ** (0.5 * m * one_m_a)

    def f1(x):
        s = max(math.sin(tau * beta * x), 0.0)
        return eps * math.exp(alpha * tau * x) * s**one_m_a

    def f2(x):
        return amp * x ** (m * one_m_a) * (-math.cos(tau * beta * x))

    out = []
    for k in k_range:
        a_k = (math.pi + 4 * k * math.pi) / (2 * tau * beta)
        b_k = (math.pi + 2 * k * math.pi) / (tau * beta)
        x_mid = 0.5 * (a_k + b_k)
        if not (math.sin(tau * beta * x_mid) > 0 and math.cos(tau * beta * x_mid) < 0):
            raise ValueError(f"interval I_{k} violates its sign preconditions")

        def g(x, a_k=a_k, b_k=b_k):
            # exact endpoint values: cos vanishes at a_k, sin vanishes at b_k
            if x == a_k:
                return eps * math.exp(alpha * tau * a_k)
            if x == b_k:
                return -amp * b_k ** (m * one_m_a)
            return f1(x) - f2(x)

        x_k = bisect(g, a_k, b_k, bisect_tol * (b_k - a_k))
        lam_k = (1.0 + beta * beta) ** (0.5 * m) * x_k**m * math.exp(tau * x_k) \
            / math.sin(tau * beta * x_k)
        omega = x_k * complex(1.0, beta)
        residual = abs(omega**m + eps * lam_k**alpha + lam_k * cmath.exp(-tau * omega))
        out.append(EigenvalueConstruction(k, x_k, lam_k, residual))
    return out


def blowup_table(roots: list[CharacteristicRoot], t: float) -> list[tuple[float, float]]:
    """Modal solution norms ``exp(Re omega * t)`` at time ``t`` for unit data."""
    if not t > 0:
        raise ValueError(f"time must be positive, got {t}")
    return [(root.problem.lam, math.exp(root.omega.real * t)) for root in roots]

"""Recovery certificates and penalty rules for leading-response recovery."""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .design import RANK_RTOL, RegressionProblem, validate_weights
from .exceptions import ConfigError, RankError

__all__ = [
    "StabilityBound", "RecoveryReport", "leading_order", "leading_order_search",
    "kappa", "recovery_coefficient", "check_support_condition", "gamma_for_order",
    "gamma_leading_lb", "chebyshev_sample_size",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class StabilityBound:
    """Exponential envelope ``|h(i)| <= L rho^(i-1)``."""

    L: float
    rho: float

    def __post_init__(self):
        if not self.L > 0:
            raise ConfigError("L must be positive")
        if not 0 < self.rho < 1:
            raise ConfigError("rho must lie in (0, 1)")

    def envelope(self, i):
        return self.L * self.rho ** (np.asarray(i) - 1)


@dataclass(frozen=True)
class RecoveryReport:
    n: int
    upsilon: float
    lhs: float
    rhs: float
    holds: bool
    n_l: Optional[int] = None
    kappa: Optional[float] = None
    gamma_order: Optional[float] = None
    gamma_lower: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def _noise_floor(nu, sigma_y, N):
    return (sigma_y / nu) / math.sqrt(N)


def leading_order_search(bound: StabilityBound, nu: float, sigma_y: float, N: int,
                         q: int) -> int:
    """Direct search: number of ``i <= q`` whose envelope clears the noise floor."""
    if sigma_y == 0:
        return q
    i = np.arange(1, q + 1)
    return int(np.count_nonzero(bound.envelope(i) >= _noise_floor(nu, sigma_y, N)))


def leading_order(bound: StabilityBound, nu: float, sigma_y: float, N: int, q: int) -> int:
    """Largest ``i <= q`` with ``L rho^(i-1) >= (sigma_y / nu) / sqrt(N)``.

    Evaluated in closed form (logarithmic in N, saturating at q) and
    checked against the direct search; the search wins when floating-point
    rounding puts the two on opposite sides of an integer boundary.
    Returns ``q`` when ``sigma_y == 0`` and 0 when no index qualifies.
    """
    if not nu > 0:
        raise ConfigError("nu must be positive")
    if sigma_y < 0 or N < 1 or q < 1:
        raise ConfigError("need sigma_y >= 0, N >= 1, q >= 1")
    if sigma_y == 0:
        return q
    L, rho = bound.L, bound.rho
    val = (math.log(nu * L) + 0.5 * math.log(N) - math.log(sigma_y * rho)) / math.log(1 / rho)
    closed = max(0, min(math.floor(val), q))
    direct = leading_order_search(bound, nu, sigma_y, N, q)
    if direct != closed:
        log.debug("leading order: closed form %d, search %d", closed, direct)
    return direct


def kappa(nu: float, sigma_u: float) -> float:
    """Signal attenuation ``nu / sqrt(nu^2 + sigma_u^2)``."""
    if not nu > 0:
        raise ConfigError("nu must be positive")
    return nu / math.hypot(nu, sigma_u)


def _qr_leading(A_n: np.ndarray):
    Q, R = scipy.linalg.qr(A_n, mode="economic")
    d = np.abs(np.diag(R))
    scale = np.linalg.norm(A_n, 2)
    if d.size == 0 or np.any(d <= RANK_RTOL * scale):
        raise RankError("leading columns are rank deficient")
    return Q, R


def recovery_coefficient(A, W, n: int) -> float:
    """n-leading recovery coefficient ``1 - max_{i>n} ||W_n A_n^+ a_i||_1 / w_i``.

    ``A_n^+ a_i`` is computed as ``R^-1 Q^T a_i`` from a QR factorization of
    the first ``n`` columns.
    """
    A = np.asarray(A, dtype=float)
    q = A.shape[1]
    if not 1 <= n < q:
        raise ConfigError(f"need 1 <= n < q, got n={n}, q={q}")
    W = validate_weights(W, q)
    Q, R = _qr_leading(A[:, :n])
    Z = scipy.linalg.solve_triangular(R, Q.T @ A[:, n:])
    vals = np.sum(np.abs(W[:n, None] * Z), axis=0) / W[n:]
    return float(1.0 - np.max(vals))


def check_support_condition(p: RegressionProblem, n: int, bound: Optional[StabilityBound] = None,
                            nu: Optional[float] = None, sigma_y: Optional[float] = None,
                            mu: float = 2.0) -> RecoveryReport:
    """Evaluate the certificate ``||W^-1 A^T (b - P_n b)||_inf <= gamma * Upsilon_n / 2``.

    When it holds, the minimizer is supported on the first ``n`` taps.
    Passing ``bound``, ``nu`` and ``sigma_y`` also fills in the leading
    order, kappa and the two penalty rules.
    """
    A, b, W = p.A, p.b, p.W
    upsilon = recovery_coefficient(A, W, n)
    Q, _ = _qr_leading(A[:, :n])
    resid = b - Q @ (Q.T @ b)
    lhs = float(np.max(np.abs(A.T @ resid) / W))
    rhs = p.gamma * upsilon / 2.0
    extra = {}
    if bound is not None and nu is not None and sigma_y is not None:
        k = kappa(nu, p.sigma_u)
        n_l = leading_order(bound, nu, sigma_y, p.N, p.q)
        extra = dict(
            n_l=n_l, kappa=k,
            gamma_order=gamma_for_order(n, mu, bound, nu, k, p.N, W[n - 1]),
            gamma_lower=gamma_leading_lb(bound, sigma_y, k, W[max(n_l, 1) - 1]),
        )
    return RecoveryReport(n=n, upsilon=upsilon, lhs=lhs, rhs=rhs, holds=bool(lhs <= rhs),
                          **extra)


def gamma_for_order(n: int, mu: float, bound: StabilityBound, nu: float, kappa: float,
                    N: int, w_n: float = 1.0) -> float:
    """Penalty ``2 mu L rho^n nu kappa sqrt(N) / w_n`` targeting support in the first n taps."""
    if not mu > 1:
        raise ConfigError("mu must be > 1")
    if n < 1:
        raise ConfigError("n must be >= 1")
    return 2.0 * mu / w_n * bound.L * bound.rho ** n * nu * kappa * math.sqrt(N)


def gamma_leading_lb(bound: StabilityBound, sigma_y: float, kappa: float,
                     w_nl: float = 1.0) -> float:
    """Lower bound ``2 rho sigma_y kappa / w_nl``; choose gamma strictly above it."""
    return 2.0 / w_nl * bound.rho * sigma_y * kappa


def chebyshev_sample_size(var_bound: float, eps: float, beta: float) -> int:
    """Samples after which an empirical mean is within ``eps`` w.p. at least ``1 - beta``.

    ``ceil(var_bound / (beta eps^2))``, at least 1.  For means of ``u(k)^2``
    use ``var_bound = m4 - nu^4``.
    """
    if not eps > 0:
        raise ConfigError("eps must be positive")
    if not 0 < beta < 1:
        raise ConfigError("beta must lie in (0, 1)")
    if var_bound < 0:
        raise ConfigError("var_bound must be non-negative")
    val = var_bound / (beta * eps * eps)
    # absorb one-ulp rounding so exact quotients do not round up
    n = math.ceil(val * (1 - 4 * np.finfo(float).eps))
    return max(1, int(n))

"""Cyclic coordinate descent for the weighted elastic-net criterion.

Minimizes ``(1/gamma) ||b - A xt||^2 + ||W xt||_1`` over ``xt`` for a matrix
``A`` with unit-norm columns.  The sweep works on the Gram form: it keeps
``g = A^T (b - A xt)`` up to date instead of the residual, which makes a
coordinate update O(q) regardless of the number of rows.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numba import njit

from .design import RegressionProblem, cost_J1, unit_weights, validate_weights
from .exceptions import ConfigError, ConvergenceError

__all__ = [
    "Solution", "soft_threshold", "solve_weighted_lasso", "solve_lrr",
    "solve_path", "kkt_violation", "zero_threshold",
]

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 100_000
REFRESH_EVERY = 1000


def soft_threshold(v, t):
    """``sign(v) * max(|v| - t, 0)``; exactly 0.0 when ``|v| <= t``."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("threshold must be non-negative")
    v = np.asarray(v, dtype=float)
    out = np.where(np.abs(v) <= t, 0.0, v - np.sign(v) * t)
    return out[()] if out.ndim == 0 else out


@njit(cache=True)
def _kkt(g, x, w, gamma):
    worst = 0.0
    for i in range(x.size):
        s = 2.0 / gamma * g[i]
        if x[i] != 0.0:
            sg = 1.0 if x[i] > 0 else -1.0
            v = abs(-s + w[i] * sg)
        else:
            v = abs(s) - w[i]
            if v < 0.0:
                v = 0.0
        if v > worst:
            worst = v
    return worst


@njit(cache=True)
def _cd(G, c, w, gamma, x, tol, max_iter, refresh):
    q = x.size
    g = c - G @ x
    thresh = 0.5 * gamma * w
    kkt = np.inf
    for sweep in range(1, max_iter + 1):
        dmax = 0.0
        xmax = 0.0
        for i in range(q):
            gii = G[i, i]
            xi = x[i]
            z = g[i] + gii * xi
            if z > thresh[i]:
                new = (z - thresh[i]) / gii
            elif z < -thresh[i]:
                new = (z + thresh[i]) / gii
            else:
                new = 0.0
            d = new - xi
            if d != 0.0:
                x[i] = new
                row = G[i]
                for j in range(q):
                    g[j] -= row[j] * d
                if abs(d) > dmax:
                    dmax = abs(d)
            if abs(new) > xmax:
                xmax = abs(new)
        if sweep % refresh == 0:
            g = c - G @ x
        if dmax <= tol * max(1.0, xmax):
            g = c - G @ x
            kkt = _kkt(g, x, w, gamma)
            if kkt <= tol:
                return sweep, True, kkt
    g = c - G @ x
    return max_iter, False, _kkt(g, x, w, gamma)


def _run_cd(G, c, w, gamma, x0, tol, max_iter):
    if not gamma > 0:
        raise ConfigError("gamma must be positive")
    if tol <= 0 or max_iter < 1:
        raise ConfigError("need tol > 0 and max_iter >= 1")
    q = c.size
    x = np.zeros(q) if x0 is None else np.array(x0, dtype=float).ravel()
    if x.size != q:
        raise ConfigError(f"x0 has length {x.size}, expected {q}")
    G = np.ascontiguousarray(G, dtype=float)
    sweeps, ok, kkt = _cd(G, np.asarray(c, dtype=float), np.asarray(w, dtype=float),
                          float(gamma), x, float(tol), int(max_iter), REFRESH_EVERY)
    return x, int(sweeps), bool(ok), float(kkt)


def kkt_violation(A, b, x_tilde, W, gamma) -> float:
    """Largest stationarity residual of ``x_tilde``, evaluated from the explicit residual."""
    g = A.T @ (b - A @ x_tilde)
    return float(_kkt(np.asarray(g, dtype=float), np.asarray(x_tilde, dtype=float),
                      np.asarray(W, dtype=float), float(gamma)))


def zero_threshold(A, b, W) -> float:
    """Smallest gamma for which the minimizer is identically zero."""
    W = np.asarray(W, dtype=float)
    return float(2.0 * np.max(np.abs(A.T @ b) / W))


def solve_weighted_lasso(A, b, W=None, gamma=1.0, tol=DEFAULT_TOL,
                         max_iter=DEFAULT_MAX_ITER, x0=None):
    """Coordinate descent on ``(1/gamma)||b - A x||^2 + ||W x||_1``.

    Returns ``(x_tilde, info)`` where ``info`` has keys ``iterations``
    (sweeps), ``kkt_violation`` and ``objective``.  Raises
    :class:`ConvergenceError` if ``max_iter`` sweeps are not enough.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).ravel()
    q = A.shape[1]
    W = unit_weights(q) if W is None else validate_weights(W, q)
    norms = np.linalg.norm(A, axis=0)
    if np.max(np.abs(norms - 1.0)) > 1e-8:
        raise ValueError("columns of A must have unit Euclidean norm")
    x, sweeps, ok, _ = _run_cd(A.T @ A, A.T @ b, W, gamma, x0, tol, max_iter)
    kkt = kkt_violation(A, b, x, W, gamma)
    if not ok:
        raise ConvergenceError(f"no convergence in {max_iter} sweeps (KKT {kkt:.3g})",
                               x_tilde=x, kkt_violation=kkt, iterations=sweeps)
    r = b - A @ x
    obj = float(r @ r / gamma + np.sum(W * np.abs(x)))
    return x, {"iterations": sweeps, "kkt_violation": kkt, "objective": obj}


@dataclass(frozen=True, eq=False)
class Solution:
    """Minimizer of the criterion for one (sigma_u, gamma) pair.

    ``support`` holds 0-based indices, so "supported on the first n taps"
    means ``support.max() < n``.
    """

    x_tilde: np.ndarray
    x: np.ndarray
    support: np.ndarray
    objective: float
    iterations: int
    kkt_violation: float
    gamma: float
    tol: float

    @property
    def cardinality(self) -> int:
        return int(self.support.size)


def _problem_kkt(p: RegressionProblem, x_tilde, x) -> float:
    # A^T (b - A xt) = T (U^T (y - U x) - N sigma_u^2 x)
    g = p.T * (p.U.T @ (p.y - p.U @ x) - p.ridge * x)
    return float(_kkt(g, np.asarray(x_tilde, dtype=float), np.asarray(p.W, dtype=float),
                      float(p.gamma)))


def solve_lrr(p: RegressionProblem, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
              x0=None) -> Solution:
    """Solve the problem and map back to the original coordinates ``x = T xt``.

    ``x0`` is a warm start in normalized coordinates.
    """
    xt, sweeps, ok, _ = _run_cd(p.gram, p.corr, p.W, p.gamma, x0, tol, max_iter)
    x = p.T * xt
    kkt = _problem_kkt(p, xt, x)
    if not ok:
        raise ConvergenceError(f"no convergence in {max_iter} sweeps (KKT {kkt:.3g})",
                               x_tilde=xt, kkt_violation=kkt, iterations=sweeps)
    xt.setflags(write=False)
    x.setflags(write=False)
    return Solution(x_tilde=xt, x=x, support=np.flatnonzero(xt), objective=cost_J1(x, p),
                    iterations=sweeps, kkt_violation=kkt, gamma=p.gamma, tol=float(tol))


def solve_path(p_template: RegressionProblem, gammas: Sequence[float], tol=DEFAULT_TOL,
               max_iter=DEFAULT_MAX_ITER) -> list:
    """Warm-started solutions along a strictly descending sequence of gammas."""
    gammas = [float(g) for g in gammas]
    if not gammas:
        return []
    if any(g <= 0 for g in gammas) or any(b >= a for a, b in zip(gammas, gammas[1:])):
        raise ConfigError("gammas must be positive and strictly descending")
    out = []
    x0: Optional[np.ndarray] = None
    for g in gammas:
        try:
            sol = solve_lrr(p_template.with_gamma(g), tol=tol, max_iter=max_iter, x0=x0)
        except ConvergenceError as exc:
            log.warning("path aborted at gamma=%g: %s", g, exc)
            exc.partial = out
            raise
        out.append(sol)
        x0 = sol.x_tilde
    return out

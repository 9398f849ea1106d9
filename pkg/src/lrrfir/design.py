"""Regression problem assembly for the averaged, normalized criterion.

The identification cost in the original coordinates is::

    J1(x) = (1/gamma) ||y - U x||^2 + (N sigma_u^2 / gamma) ||x||^2 + ||W T^-1 x||_1

Stacking ``b = [y; 0]`` and ``A_bar = [U; sigma_u sqrt(N) I]`` and scaling
the columns of ``A_bar`` to unit norm (``A = A_bar T``) turns it into a
weighted lasso in ``x_tilde = T^-1 x``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .exceptions import ConfigError, RankError
from .sim import DataRecord

__all__ = [
    "RegressionProblem", "build_toeplitz", "assemble", "cost_J1",
    "cost_normalized", "unit_weights", "validate_weights", "column_rank",
]

RANK_RTOL = 1e-10


def unit_weights(q: int) -> np.ndarray:
    return np.ones(q)


def validate_weights(w, q: int | None = None) -> np.ndarray:
    """Check ``0 < w_1 <= ... <= w_q == 1`` and return ``w`` as a float array."""
    w = np.asarray(w, dtype=float).ravel()
    if q is not None and w.size != q:
        raise ConfigError(f"weight vector has length {w.size}, expected {q}")
    if w.size == 0:
        raise ConfigError("empty weight vector")
    if not np.all(w > 0):
        raise ConfigError("weights must be strictly positive")
    if np.any(np.diff(w) < 0):
        raise ConfigError("weights must be non-decreasing")
    if w[-1] != 1.0:
        raise ConfigError("largest (last) weight must be exactly 1")
    return w


def column_rank(M: np.ndarray, rtol: float = RANK_RTOL) -> int:
    """Numerical column rank from a pivoted QR factorization."""
    R = scipy.linalg.qr(M, mode="r", pivoting=True)[0]
    d = np.abs(np.diag(R))
    if d.size == 0 or d[0] == 0:
        return 0
    return int(np.sum(d > rtol * d[0]))


def build_toeplitz(u, N: int, q: int) -> np.ndarray:
    """N x q matrix with ``[U]_{k,i} = u(k + 1 - i)``.

    ``u`` holds samples ``u(2-q), ..., u(N)`` (length ``N + q - 1``); extra
    leading samples are ignored so that the last entry is always ``u(N)``.
    """
    u = np.asarray(u, dtype=float).ravel()
    need = N + q - 1
    if u.size < need:
        missing = need - u.size
        raise IndexError(
            f"input covers only {u.size} samples; u({2 - q})..u({2 - q + missing - 1}) "
            f"are missing for N={N}, q={q}")
    u = u[u.size - need:]
    return scipy.linalg.toeplitz(u[q - 1:], u[q - 1::-1])


@dataclass(frozen=True, eq=False)
class RegressionProblem:
    U: np.ndarray
    y: np.ndarray
    W: np.ndarray
    gamma: float
    sigma_u: float

    @property
    def N(self) -> int:
        return self.U.shape[0]

    @property
    def q(self) -> int:
        return self.U.shape[1]

    @property
    def ridge(self) -> float:
        """``N sigma_u^2``, the weight of the averaged input-noise term."""
        return self.N * self.sigma_u ** 2

    @cached_property
    def T(self) -> np.ndarray:
        sq = np.einsum("ij,ij->j", self.U, self.U) + self.ridge
        return 1.0 / np.sqrt(sq)

    @cached_property
    def b(self) -> np.ndarray:
        return np.concatenate([self.y, np.zeros(self.q)])

    @cached_property
    def A_bar(self) -> np.ndarray:
        return np.vstack([self.U, self.sigma_u * np.sqrt(self.N) * np.eye(self.q)])

    @cached_property
    def A(self) -> np.ndarray:
        return self.A_bar * self.T

    @cached_property
    def gram(self) -> np.ndarray:
        """``A^T A`` formed from ``U^T U`` without building ``A``."""
        G = self.U.T @ self.U
        G[np.diag_indices_from(G)] += self.ridge
        G *= self.T[:, None]
        G *= self.T[None, :]
        return G

    @cached_property
    def corr(self) -> np.ndarray:
        """``A^T b``."""
        return self.T * (self.U.T @ self.y)

    def with_gamma(self, gamma: float) -> "RegressionProblem":
        """Same data and weights, different penalty; shares the cached matrices."""
        if not gamma > 0:
            raise ConfigError("gamma must be positive")
        p = RegressionProblem(self.U, self.y, self.W, float(gamma), self.sigma_u)
        for name in ("T", "b", "A_bar", "A", "gram", "corr"):
            if name in self.__dict__:
                p.__dict__[name] = self.__dict__[name]
        return p

    def smooth_part(self, x) -> float:
        """``||y - U x||^2 + N sigma_u^2 ||x||^2``."""
        x = np.asarray(x, dtype=float)
        r = self.y - self.U @ x
        return float(r @ r + self.ridge * (x @ x))

    def penalty(self, x) -> float:
        """``||W T^-1 x||_1``."""
        return float(np.sum(self.W * np.abs(np.asarray(x) / self.T)))


def assemble(data: DataRecord, sigma_u: float, gamma: float, W=None) -> RegressionProblem:
    """Build the regression problem from the nominal inputs of ``data``.

    When only the applied input is known (real data), store it as ``u`` and
    let ``sigma_u`` describe how far it may be from the true input.
    """
    if not gamma > 0:
        raise ConfigError("gamma must be positive")
    if sigma_u < 0:
        raise ConfigError("sigma_u must be non-negative")
    U = build_toeplitz(data.u, data.N, data.q)
    W = unit_weights(data.q) if W is None else validate_weights(W, data.q)
    if sigma_u == 0:
        norms = np.linalg.norm(U, axis=0)
        if np.any(norms == 0):
            raise RankError(f"zero input column(s) {np.flatnonzero(norms == 0).tolist()}")
        r = column_rank(U)
        if r < data.q:
            raise RankError(f"U has rank {r} < q={data.q} and sigma_u = 0")
    U.setflags(write=False)
    return RegressionProblem(U=U, y=np.asarray(data.y, dtype=float), W=W,
                             gamma=float(gamma), sigma_u=float(sigma_u))


def cost_J1(x, p: RegressionProblem) -> float:
    """Criterion value in the original coordinates ``x``."""
    return (p.smooth_part(x) / p.gamma) + p.penalty(x)


def cost_normalized(x_tilde, p: RegressionProblem) -> float:
    """Same criterion in the normalized coordinates: ``(1/gamma)||b - A xt||^2 + ||W xt||_1``."""
    x_tilde = np.asarray(x_tilde, dtype=float)
    r = p.b - p.A @ x_tilde
    return float(r @ r / p.gamma + np.sum(p.W * np.abs(x_tilde)))

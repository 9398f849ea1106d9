"""Least-squares comparison estimators: plain LS and ridge (Tikhonov) LS."""
import numpy as np
import scipy.linalg

from .design import RANK_RTOL
from .exceptions import RankError

__all__ = ["solve_ls", "solve_tls"]


def _qr_solve(M, rhs):
    Q, R = scipy.linalg.qr(M, mode="economic")
    d = np.abs(np.diag(R))
    if d.size < M.shape[1] or np.any(d <= RANK_RTOL * np.max(d, initial=0.0)) or not d.any():
        raise RankError("regressor matrix is rank deficient")
    return scipy.linalg.solve_triangular(R, Q.T @ rhs)


def solve_ls(U, y):
    """argmin ||y - U x||^2 via QR."""
    return _qr_solve(np.asarray(U, dtype=float), np.asarray(y, dtype=float))


def solve_tls(U, y, sigma_u, N=None):
    """argmin ||y - U x||^2 + N sigma_u^2 ||x||^2, solved as a stacked LS problem.

    ``N`` defaults to the number of rows of ``U``.
    """
    U = np.asarray(U, dtype=float)
    y = np.asarray(y, dtype=float)
    if sigma_u < 0:
        raise ValueError("sigma_u must be non-negative")
    if sigma_u == 0:
        return solve_ls(U, y)
    N = U.shape[0] if N is None else N
    q = U.shape[1]
    M = np.vstack([U, sigma_u * np.sqrt(N) * np.eye(q)])
    return _qr_solve(M, np.concatenate([y, np.zeros(q)]))

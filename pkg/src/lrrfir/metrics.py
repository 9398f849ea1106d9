"""Validation indices: simulation fit and tail sparsity of an FIR estimate."""
import numpy as np

__all__ = ["fit", "tail_norms", "simulate_model_output"]


def fit(y, y_hat) -> float:
    """Best-fit percentage ``100 (1 - ||y - y_hat|| / ||y - mean(y)||)``."""
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    if y.shape != y_hat.shape or y.size < 2:
        raise ValueError("y and y_hat must have equal length >= 2")
    den = np.linalg.norm(y - y.mean())
    if den == 0:
        raise ZeroDivisionError("measured output is constant")
    return float(100.0 * (1.0 - np.linalg.norm(y - y_hat) / den))


def tail_norms(x, n_l: int):
    """``(TN0, TN1)``: count and l1 mass of the nonzero taps past index ``n_l``.

    The count is exact (``!= 0``); solvers here emit exact zeros.
    """
    x = np.asarray(x, dtype=float)
    if not 0 <= n_l <= x.size:
        raise ValueError(f"n_l={n_l} outside [0, {x.size}]")
    tail = x[n_l:]
    return int(np.count_nonzero(tail)), float(np.sum(np.abs(tail)))


def simulate_model_output(x, u, window=None):
    """FIR model output ``y_hat(k) = sum_i x_i u(k - i + 1)`` for ``k`` in ``window``.

    ``window`` indexes into ``u`` (0-based) and must start at ``q - 1`` or
    later; the default covers every sample with a full warm-up, which for a
    :class:`~lrrfir.sim.DataRecord` input is exactly ``k = 1 .. N``.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    q = x.size
    window = range(q - 1, u.size) if window is None else window
    if len(window) == 0:
        return np.zeros(0)
    if window.step != 1:
        raise ValueError("window must be contiguous")
    if window.start < q - 1:
        raise IndexError(f"window starts at {window.start}; needs {q - 1} warm-up samples")
    if window.stop > u.size:
        raise IndexError(f"window ends at {window.stop} beyond input length {u.size}")
    seg = u[window.start - (q - 1):window.stop]
    return np.convolve(seg, x, mode="valid")

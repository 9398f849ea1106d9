"""Synthetic identification experiments.

Signals are i.i.d. Gaussian, the plant is simulated by its difference
equation from zero initial conditions, and the retained window keeps the
``q - 1`` input samples that precede it so the Toeplitz regressor can be
built without truncation.

Time indexing of a :class:`DataRecord`: ``u[j]`` and ``u_tilde[j]`` hold
the sample at time ``k = j + 2 - q``, so ``u[q - 1]`` is ``u(1)`` and the
last entry is ``u(N)``.  ``y[j]`` holds ``y(j + 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.signal import lfilter

from .exceptions import ConfigError, EmptySignalError

__all__ = [
    "SystemModel", "SignalSpec", "DataRecord", "benchmark_system",
    "gen_iid", "derive_seed", "simulate_lti", "impulse_response",
    "make_dataset",
]


@dataclass(frozen=True)
class SystemModel:
    """Rational transfer function in descending powers of z, or FIR taps.

    ``fir_taps[0]`` is h(1), the output at the instant the pulse is applied
    (see :func:`impulse_response`).
    """

    numerator: Optional[tuple] = None
    denominator: Optional[tuple] = None
    fir_taps: Optional[tuple] = None

    def __post_init__(self):
        if self.fir_taps is not None:
            if self.numerator is not None or self.denominator is not None:
                raise ConfigError("give either fir_taps or numerator/denominator, not both")
            taps = tuple(float(v) for v in np.ravel(self.fir_taps))
            if len(taps) < 1:
                raise ConfigError("FIR model needs at least one tap")
            object.__setattr__(self, "fir_taps", taps)
            return
        if self.numerator is None or self.denominator is None:
            raise ConfigError("transfer-function model needs numerator and denominator")
        num = tuple(float(v) for v in np.ravel(self.numerator))
        den = tuple(float(v) for v in np.ravel(self.denominator))
        if len(den) == 0 or den[0] != 1.0:
            raise ConfigError(f"denominator must be monic, got leading coefficient {den[:1]}")
        if len(num) > len(den):
            raise ConfigError("denominator degree must be >= numerator degree")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    @classmethod
    def from_fir(cls, taps: Sequence[float]) -> "SystemModel":
        return cls(fir_taps=tuple(taps))

    @classmethod
    def from_tf(cls, numerator, denominator) -> "SystemModel":
        return cls(numerator=tuple(numerator), denominator=tuple(denominator))

    @property
    def is_fir(self) -> bool:
        return self.fir_taps is not None

    def filter_coefficients(self):
        """``(b, a)`` in powers of z^-1, as consumed by ``scipy.signal.lfilter``."""
        if self.is_fir:
            return np.asarray(self.fir_taps), np.array([1.0])
        den = np.asarray(self.denominator)
        num = np.asarray(self.numerator)
        b = np.zeros(den.size)
        b[den.size - num.size:] = num
        return b, den

    def to_dict(self) -> dict:
        if self.is_fir:
            return {"fir_taps": list(self.fir_taps)}
        return {"numerator": list(self.numerator), "denominator": list(self.denominator)}

    @classmethod
    def from_dict(cls, d: dict) -> "SystemModel":
        if "fir_taps" in d:
            return cls.from_fir(d["fir_taps"])
        return cls.from_tf(d["numerator"], d["denominator"])


def benchmark_system() -> SystemModel:
    """Fourth-order, lightly damped benchmark plant (z^3 + 0.5 z^2) / (z^4 - 2.2 z^3 + ...)."""
    return SystemModel.from_tf([1.0, 0.5, 0.0, 0.0], [1.0, -2.2, 2.42, -1.87, 0.7225])


@dataclass(frozen=True)
class SignalSpec:
    nu_sq: float = 1.0
    sigma_u: float = 0.0
    sigma_y: float = 0.0
    seed: "int | np.random.SeedSequence" = 0
    distribution: str = "gaussian"
    m4: Optional[float] = None

    def __post_init__(self):
        if not self.nu_sq > 0:
            raise ConfigError("input variance nu_sq must be positive")
        if self.sigma_u < 0 or self.sigma_y < 0:
            raise ConfigError("noise standard deviations must be non-negative")
        if self.distribution != "gaussian":
            raise ConfigError(f"unsupported distribution {self.distribution!r}")
        if self.m4 is None:
            object.__setattr__(self, "m4", 3.0 * self.nu_sq ** 2)
        elif self.m4 < self.nu_sq ** 2:
            raise ConfigError("fourth moment must be >= nu_sq**2")

    @property
    def nu(self) -> float:
        return float(np.sqrt(self.nu_sq))


@dataclass(frozen=True, eq=False)
class DataRecord:
    u: np.ndarray
    u_tilde: np.ndarray
    y: np.ndarray
    N: int
    q: int
    y_clean: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if not 1 <= self.q <= self.N:
            raise ConfigError(f"need 1 <= q <= N, got q={self.q}, N={self.N}")
        n_in = self.N + self.q - 1
        if len(self.u) != n_in or len(self.u_tilde) != n_in:
            raise ConfigError(f"input records must have N + q - 1 = {n_in} samples")
        if len(self.y) != self.N:
            raise ConfigError(f"output record must have N = {self.N} samples")
        for name in ("u", "u_tilde", "y", "y_clean"):
            v = getattr(self, name)
            if v is not None:
                v = np.asarray(v, dtype=float)
                v.setflags(write=False)
                object.__setattr__(self, name, v)

    @property
    def k(self) -> np.ndarray:
        """Time indices of the input samples, ``2 - q .. N``."""
        return np.arange(2 - self.q, self.N + 1)

    def window(self, N: int) -> "DataRecord":
        """The first ``N`` samples of the window, with the same pre-window."""
        if N > self.N:
            raise ConfigError(f"cannot take {N} samples from a record of {self.N}")
        m = N + self.q - 1
        yc = None if self.y_clean is None else self.y_clean[:N]
        return DataRecord(self.u[:m], self.u_tilde[:m], self.y[:N], N, self.q, yc)


def gen_iid(n: int, variance: float, seed=None) -> np.ndarray:
    """``n`` zero-mean Gaussian samples with the given variance.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts.
    """
    if n < 1:
        raise EmptySignalError("cannot generate an empty signal")
    if variance < 0:
        raise ValueError("variance must be non-negative")
    rng = np.random.default_rng(seed)
    return np.sqrt(variance) * rng.standard_normal(n)


def derive_seed(master: int, *keys: int) -> np.random.SeedSequence:
    """Child seed for the unit of work identified by ``keys``.

    The child is ``SeedSequence(master, spawn_key=keys)``: it depends only on
    the master seed and the integer keys (e.g. scenario, trial, stream), never
    on the order in which units are run.
    """
    return np.random.SeedSequence(int(master), spawn_key=tuple(int(k) for k in keys))


def simulate_lti(model: SystemModel, u) -> np.ndarray:
    """Output of ``model`` driven by ``u`` from zero initial state."""
    u = np.asarray(u, dtype=float)
    if u.size == 0:
        raise EmptySignalError("input is empty")
    b, a = model.filter_coefficients()
    return lfilter(b, a, u)


def impulse_response(model: SystemModel, q: int) -> np.ndarray:
    """h(1..q): response at times 1..q to a unit pulse applied at time 1."""
    if q < 1:
        raise ValueError("q must be >= 1")
    pulse = np.zeros(q)
    pulse[0] = 1.0
    return simulate_lti(model, pulse)


def make_dataset(model: SystemModel, spec: SignalSpec, N: int, q: int,
                 discard: int = 1000) -> DataRecord:
    """Simulate ``discard + N`` steps and keep the last ``N`` outputs.

    Three independent streams are drawn from ``spec.seed`` (nominal input,
    input perturbation, output noise), so changing a noise level leaves the
    nominal input unchanged.
    """
    if N < q:
        raise ConfigError(f"N={N} must be >= q={q}")
    if q < 1:
        raise ConfigError("q must be >= 1")
    pre = max(int(discard), q - 1)
    total = pre + N
    root = spec.seed if isinstance(spec.seed, np.random.SeedSequence) \
        else np.random.SeedSequence(spec.seed)
    # explicit child keys rather than root.spawn(), which is stateful
    s_u, s_du, s_dy = (np.random.SeedSequence(root.entropy, spawn_key=root.spawn_key + (i,))
                       for i in range(3))
    u = gen_iid(total, spec.nu_sq, s_u)
    du = gen_iid(total, spec.sigma_u ** 2, s_du)
    dy = gen_iid(N, spec.sigma_y ** 2, s_dy)
    u_tilde = u + du
    y_clean = simulate_lti(model, u_tilde)[pre:]
    start = pre - (q - 1)
    return DataRecord(u=u[start:], u_tilde=u_tilde[start:], y=y_clean + dy,
                      N=N, q=q, y_clean=y_clean)

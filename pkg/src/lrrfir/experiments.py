"""Studies built on the estimators: tradeoff grids, Monte Carlo tables, N-sweeps.

Every unit of work (scenario, trial, stream) draws from its own seed,
``derive_seed(master, scenario, trial, stream)`` with stream 0 for the
identification record and 1 for the validation record, so results do not
depend on execution order.
"""
from __future__ import annotations

import copy
import logging
from dataclasses import dataclass, field
from typing import Optional

import jsonschema
import numpy as np

from .baselines import solve_ls, solve_tls
from .design import assemble, unit_weights, validate_weights
from .exceptions import ConfigError, ConvergenceError
from .metrics import fit, simulate_model_output, tail_norms
from .sim import DataRecord, SignalSpec, SystemModel, benchmark_system, derive_seed, make_dataset
from .solver import solve_lrr
from .theory import (StabilityBound, check_support_condition, gamma_leading_lb, kappa,
                     leading_order)

__all__ = [
    "Scenario", "RunConfig", "GridResult", "MonteCarloResult", "SweepResult",
    "CONFIG_SCHEMA", "lrr_gamma", "run_tradeoff_grid", "run_monte_carlo", "run_n_sweep",
]

log = logging.getLogger(__name__)

METHODS = ("LRR", "LS", "TLS")

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_nonneg = {"type": "number", "minimum": 0}
_posint = {"type": "integer", "minimum": 1}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "system": {
            "type": "object",
            "oneOf": [
                {"required": ["fir_taps"], "properties": {
                    "fir_taps": {"type": "array", "items": _num, "minItems": 1}},
                 "additionalProperties": False},
                {"required": ["numerator", "denominator"], "properties": {
                    "numerator": {"type": "array", "items": _num, "minItems": 1},
                    "denominator": {"type": "array", "items": _num, "minItems": 1}},
                 "additionalProperties": False},
            ],
        },
        "signal": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"nu_sq": _pos, "sigma_u": _nonneg, "sigma_y": _nonneg,
                           "distribution": {"enum": ["gaussian"]}, "m4": _pos},
        },
        "scenarios": {
            "type": "array", "minItems": 1,
            "items": {"type": "object", "required": ["name", "sigma_u", "sigma_y"],
                      "additionalProperties": False,
                      "properties": {"name": {"type": "string"}, "sigma_u": _nonneg,
                                     "sigma_y": _nonneg}},
        },
        "N": _posint, "q": _posint, "discard": {"type": "integer", "minimum": 0},
        "N_v": _posint, "trials": _posint, "seed": {"type": "integer", "minimum": 0},
        "gammas": {"type": "array", "items": _pos},
        "sigma_u_grid": {"type": "array", "items": _nonneg},
        "weights": {"oneOf": [{"const": "unit"}, {"type": "array", "items": _pos}]},
        "tol": _pos, "max_iter": _posint,
        "bound": {"type": "object", "required": ["L", "rho"], "additionalProperties": False,
                  "properties": {"L": _pos, "rho": {"type": "number", "exclusiveMinimum": 0,
                                                    "exclusiveMaximum": 1}}},
        "gamma": {"oneOf": [{"type": "null"}, _pos]},
        "gamma_factor": {"type": "number", "exclusiveMinimum": 1},
        "mu": {"type": "number", "exclusiveMinimum": 1},
        "N_list": {"type": "array", "items": _posint},
        "validate_on_nominal": {"type": "boolean"},
        "out_dir": {"type": "string"},
        "svg": {"type": "boolean"},
        "store_solutions": {"type": "boolean"},
    },
}


@dataclass(frozen=True)
class Scenario:
    name: str
    sigma_u: float
    sigma_y: float


NOISE_SCENARIOS = (
    Scenario("1%", 0.01, 0.1),
    Scenario("3%", 0.03, 0.3),
    Scenario("5%", 0.05, 0.5),
)


@dataclass
class RunConfig:
    """Everything a study needs; loadable from and dumpable to JSON.

    ``gamma`` overrides the automatic penalty.  Otherwise LRR uses
    ``gamma_factor`` times the leading-support lower bound
    ``2 rho sigma_y kappa / w_nl`` (any factor > 1 satisfies the bound).
    """

    system: SystemModel = field(default_factory=benchmark_system)
    nu_sq: float = 1.0
    sigma_u: float = 0.03
    sigma_y: float = 0.3
    scenarios: tuple = NOISE_SCENARIOS
    N: int = 1000
    q: int = 500
    discard: int = 1000
    N_v: int = 2000
    trials: int = 20
    seed: int = 0
    gammas: tuple = ()
    sigma_u_grid: tuple = ()
    weights: object = "unit"
    tol: float = 1e-6
    max_iter: int = 100_000
    L: float = 6.0
    rho: float = 0.93
    gamma: Optional[float] = None
    gamma_factor: float = 4.0
    mu: float = 2.0
    N_list: tuple = (1000, 4000, 16000, 32000)
    validate_on_nominal: bool = False
    out_dir: str = "out"
    svg: bool = False
    store_solutions: bool = False

    def __post_init__(self):
        self.scenarios = tuple(s if isinstance(s, Scenario) else Scenario(**s)
                               for s in self.scenarios)
        self.gammas = tuple(float(g) for g in self.gammas)
        self.sigma_u_grid = tuple(float(s) for s in self.sigma_u_grid)
        self.N_list = tuple(int(n) for n in self.N_list)
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if any(b >= a for a, b in zip(self.gammas, self.gammas[1:])) or \
                any(g <= 0 for g in self.gammas):
            raise ConfigError("gammas must be positive and strictly descending")
        if not 1 <= self.q <= self.N:
            raise ConfigError("need 1 <= q <= N")
        if any(b <= a for a, b in zip(self.N_list, self.N_list[1:])):
            raise ConfigError("N_list must be strictly ascending")
        if self.N_list and min(self.N_list) < self.q:
            raise ConfigError("every N in N_list must be >= q")
        self.bound  # validates L, rho
        self.weight_vector()

    @property
    def bound(self) -> StabilityBound:
        return StabilityBound(self.L, self.rho)

    @property
    def nu(self) -> float:
        return float(np.sqrt(self.nu_sq))

    def weight_vector(self) -> np.ndarray:
        if isinstance(self.weights, str):
            if self.weights != "unit":
                raise ConfigError(f"unknown weight spec {self.weights!r}")
            return unit_weights(self.q)
        return validate_weights(self.weights, self.q)

    def signal(self, sigma_u=None, sigma_y=None, seed=0) -> SignalSpec:
        return SignalSpec(nu_sq=self.nu_sq,
                          sigma_u=self.sigma_u if sigma_u is None else sigma_u,
                          sigma_y=self.sigma_y if sigma_y is None else sigma_y,
                          seed=seed)

    def replace(self, **changes) -> "RunConfig":
        new = copy.copy(self)
        for k, v in changes.items():
            if not hasattr(new, k):
                raise ConfigError(f"unknown config key {k!r}")
            setattr(new, k, v)
        new.__post_init__()
        return new

    def to_dict(self) -> dict:
        return {
            "system": self.system.to_dict(),
            "signal": {"nu_sq": self.nu_sq, "sigma_u": self.sigma_u, "sigma_y": self.sigma_y,
                       "distribution": "gaussian"},
            "scenarios": [{"name": s.name, "sigma_u": s.sigma_u, "sigma_y": s.sigma_y}
                          for s in self.scenarios],
            "N": self.N, "q": self.q, "discard": self.discard, "N_v": self.N_v,
            "trials": self.trials, "seed": self.seed,
            "gammas": list(self.gammas), "sigma_u_grid": list(self.sigma_u_grid),
            "weights": self.weights if isinstance(self.weights, str) else list(self.weights),
            "tol": self.tol, "max_iter": self.max_iter,
            "bound": {"L": self.L, "rho": self.rho},
            "gamma": self.gamma, "gamma_factor": self.gamma_factor, "mu": self.mu,
            "N_list": list(self.N_list), "validate_on_nominal": self.validate_on_nominal,
            "out_dir": self.out_dir, "svg": self.svg, "store_solutions": self.store_solutions,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        try:
            jsonschema.validate(d, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"invalid config: {exc.message}") from exc
        d = dict(d)
        kw = {}
        if "system" in d:
            kw["system"] = SystemModel.from_dict(d.pop("system"))
        sig = d.pop("signal", {})
        for key in ("nu_sq", "sigma_u", "sigma_y"):
            if key in sig:
                kw[key] = sig[key]
        if "bound" in d:
            b = d.pop("bound")
            kw["L"], kw["rho"] = b["L"], b["rho"]
        if "scenarios" in d:
            kw["scenarios"] = tuple(Scenario(**s) for s in d.pop("scenarios"))
        for key in ("gammas", "sigma_u_grid", "N_list"):
            if key in d:
                kw[key] = tuple(d.pop(key))
        kw.update(d)
        return cls(**kw)


def lrr_gamma(cfg: RunConfig, sigma_u: float, sigma_y: float, n_l: int) -> float:
    """Penalty used for LRR estimates: the override, or the scaled lower bound."""
    if cfg.gamma is not None:
        return float(cfg.gamma)
    w = cfg.weight_vector()
    lb = gamma_leading_lb(cfg.bound, sigma_y, kappa(cfg.nu, sigma_u), w[max(n_l, 1) - 1])
    if lb <= 0:
        raise ConfigError("noise-free output gives a zero lower bound; set gamma explicitly")
    return cfg.gamma_factor * lb


# --- tradeoff grid ---------------------------------------------------------

@dataclass
class GridResult:
    gammas: np.ndarray
    sigma_us: np.ndarray
    E: np.ndarray
    C: np.ndarray
    failed: np.ndarray
    smooth: np.ndarray
    solutions: Optional[list] = None
    kind: str = "grid"

    def rows(self):
        for i, su in enumerate(self.sigma_us):
            for j, g in enumerate(self.gammas):
                yield {"sigma_u": float(su), "gamma": float(g),
                       "E": None if self.failed[i, j] else float(self.E[i, j]),
                       "C": None if self.failed[i, j] else int(self.C[i, j]),
                       "failed": bool(self.failed[i, j])}

    csv_columns = ("sigma_u", "gamma", "E", "C", "failed")

    def summary(self) -> dict:
        return {"n_failed": int(self.failed.sum()),
                "shape": [int(self.E.shape[0]), int(self.E.shape[1])]}


def run_tradeoff_grid(data: DataRecord, cfg: RunConfig) -> GridResult:
    """Error/complexity grid over ``sigma_u_grid`` x ``gammas``.

    Each row runs the descending gamma path with warm starts.  A cell whose
    solve fails is marked and the row continues from the failed iterate.
    """
    gammas = np.asarray(cfg.gammas, dtype=float)
    sigmas = np.asarray(cfg.sigma_u_grid or (cfg.sigma_u,), dtype=float)
    if gammas.size == 0:
        raise ConfigError("grid needs a non-empty gamma list")
    shape = (sigmas.size, gammas.size)
    E = np.full(shape, np.nan)
    C = np.full(shape, -1, dtype=int)
    S = np.full(shape, np.nan)
    failed = np.zeros(shape, dtype=bool)
    sols = [[None] * gammas.size for _ in sigmas] if cfg.store_solutions else None
    W = cfg.weight_vector()
    for i, su in enumerate(sigmas):
        p0 = assemble(data, float(su), float(gammas[0]), W)
        x0 = None
        for j, g in enumerate(gammas):
            p = p0.with_gamma(g)
            try:
                sol = solve_lrr(p, tol=cfg.tol, max_iter=cfg.max_iter, x0=x0)
            except ConvergenceError as exc:
                log.warning("grid cell sigma_u=%g gamma=%g failed: %s", su, g, exc)
                failed[i, j] = True
                x0 = exc.x_tilde
                continue
            r = data.y - p.U @ sol.x
            E[i, j] = float(r @ r)
            C[i, j] = sol.cardinality
            S[i, j] = p.smooth_part(sol.x)
            if sols is not None:
                sols[i][j] = sol
            x0 = sol.x_tilde
    return GridResult(gammas=gammas, sigma_us=sigmas, E=E, C=C, failed=failed, smooth=S,
                      solutions=sols)


# --- Monte Carlo -------------------------------------------------------------

MC_COLUMNS = ("trial", "method", "noise_level", "FIT", "TN0", "TN1", "n_l", "gamma",
              "iterations", "kkt_violation")
SWEEP_COLUMNS = ("trial", "N", "method", "FIT", "TN0", "TN1", "n_l", "gamma",
                 "iterations", "kkt_violation")


def _aggregate(rows, keys):
    groups = {}
    for r in rows:
        groups.setdefault(tuple(r[k] for k in keys), []).append(r)
    out = []
    for key, rs in groups.items():
        out.append({**dict(zip(keys, key)), "count": len(rs),
                    "FIT": float(np.mean([r["FIT"] for r in rs])),
                    "TN0": float(np.mean([r["TN0"] for r in rs])),
                    "TN1": float(np.mean([r["TN1"] for r in rs]))})
    return out


@dataclass
class MonteCarloResult:
    rows_: list
    aggregates: list
    recovery: list
    failures: list
    seeds: list
    kind: str = "montecarlo"
    csv_columns = MC_COLUMNS

    def rows(self):
        return iter(self.rows_)

    def summary(self) -> dict:
        return {"aggregates": self.aggregates, "failures": self.failures,
                "recovery_reports": self.recovery, "seeds": self.seeds}

    def mean(self, noise_level: str, method: str, metric: str) -> float:
        for a in self.aggregates:
            if a["noise_level"] == noise_level and a["method"] == method:
                return a[metric]
        raise KeyError((noise_level, method))


def _estimate_all(cfg, rec, val, sigma_u, sigma_y, W, n_l):
    """LRR, LS, TLS estimates on one record; returns (rows-without-keys, lrr problem)."""
    gamma = lrr_gamma(cfg, sigma_u, sigma_y, n_l)
    p = assemble(rec, sigma_u, gamma, W)
    u_val = val.u if cfg.validate_on_nominal else val.u_tilde
    out = []
    fails = []
    try:
        sol = solve_lrr(p, tol=cfg.tol, max_iter=cfg.max_iter)
        out.append(("LRR", sol.x, gamma, sol.iterations, sol.kkt_violation))
    except ConvergenceError as exc:
        log.warning("LRR failed: %s", exc)
        fails.append(("LRR", str(exc)))
    out.append(("LS", solve_ls(p.U, rec.y), None, None, None))
    out.append(("TLS", solve_tls(p.U, rec.y, sigma_u, rec.N), None, None, None))
    rows = []
    for method, x, g, it, kkt in out:
        tn0, tn1 = tail_norms(x, n_l)
        rows.append({"method": method, "FIT": fit(val.y, simulate_model_output(x, u_val)),
                     "TN0": tn0, "TN1": tn1, "n_l": n_l, "gamma": g, "iterations": it,
                     "kkt_violation": kkt})
    return rows, p, fails


def run_monte_carlo(cfg: RunConfig) -> MonteCarloResult:
    """LRR vs LS vs TLS over ``cfg.trials`` fresh datasets per noise scenario."""
    W = cfg.weight_vector()
    rows, recovery, failures, seeds = [], [], [], []
    for s_idx, sc in enumerate(cfg.scenarios):
        n_l = leading_order(cfg.bound, cfg.nu, sc.sigma_y, cfg.N, cfg.q)
        for t in range(cfg.trials):
            keys = [cfg.seed, s_idx, t]
            seeds.append({"noise_level": sc.name, "trial": t, "spawn_key": keys[1:]})
            rec = make_dataset(cfg.system, cfg.signal(sc.sigma_u, sc.sigma_y,
                                                      derive_seed(*keys, 0)),
                               cfg.N, cfg.q, cfg.discard)
            val = make_dataset(cfg.system, cfg.signal(sc.sigma_u, sc.sigma_y,
                                                      derive_seed(*keys, 1)),
                               cfg.N_v, cfg.q, cfg.discard)
            trial_rows, p, fails = _estimate_all(cfg, rec, val, sc.sigma_u, sc.sigma_y, W, n_l)
            for method, msg in fails:
                failures.append({"noise_level": sc.name, "trial": t, "method": method,
                                 "error": msg})
            for r in trial_rows:
                rows.append({"trial": t, "noise_level": sc.name, **r})
            if 1 <= n_l < cfg.q:
                rep = check_support_condition(p, n_l, cfg.bound, cfg.nu, sc.sigma_y, cfg.mu)
                recovery.append({"noise_level": sc.name, "trial": t, **rep.to_dict()})
    return MonteCarloResult(rows_=rows, aggregates=_aggregate(rows, ("noise_level", "method")),
                            recovery=recovery, failures=failures, seeds=seeds)


# --- N sweep -----------------------------------------------------------------

@dataclass
class SweepResult:
    rows_: list
    aggregates: list
    failures: list
    seeds: list
    kind: str = "nsweep"
    csv_columns = SWEEP_COLUMNS

    def rows(self):
        return iter(self.rows_)

    def summary(self) -> dict:
        return {"aggregates": self.aggregates, "failures": self.failures, "seeds": self.seeds}

    def series(self, method: str, metric: str, trial: Optional[int] = None):
        """``(N values, metric values)``; averaged over trials when ``trial`` is None."""
        Ns = sorted({r["N"] for r in self.rows_})
        vals = []
        for n in Ns:
            rs = [r[metric] for r in self.rows_ if r["N"] == n and r["method"] == method
                  and (trial is None or r["trial"] == trial)]
            vals.append(float(np.mean(rs)) if rs else float("nan"))
        return Ns, vals


def run_n_sweep(cfg: RunConfig, N_list=None) -> SweepResult:
    """Estimates from nested windows of one long record, for each N in ``N_list``.

    Each of ``cfg.trials`` repeats draws one record of length ``max(N_list)``
    and identifies from its first N samples, so larger N only appends data.
    """
    N_list = tuple(cfg.N_list if N_list is None else N_list)
    if not N_list or any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ConfigError("N_list must be non-empty and strictly ascending")
    if N_list[0] < cfg.q:
        raise ConfigError("every N must be >= q")
    W = cfg.weight_vector()
    rows, failures, seeds = [], [], []
    for t in range(cfg.trials):
        keys = [cfg.seed, 0, t]
        seeds.append({"trial": t, "spawn_key": keys[1:]})
        full = make_dataset(cfg.system, cfg.signal(seed=derive_seed(*keys, 0)),
                            N_list[-1], cfg.q, cfg.discard)
        val = make_dataset(cfg.system, cfg.signal(seed=derive_seed(*keys, 1)),
                           cfg.N_v, cfg.q, cfg.discard)
        for N in N_list:
            n_l = leading_order(cfg.bound, cfg.nu, cfg.sigma_y, N, cfg.q)
            trial_rows, _, fails = _estimate_all(cfg, full.window(N), val, cfg.sigma_u,
                                                 cfg.sigma_y, W, n_l)
            for method, msg in fails:
                failures.append({"trial": t, "N": N, "method": method, "error": msg})
            for r in trial_rows:
                rows.append({"trial": t, "N": N, **r})
    return SweepResult(rows_=rows, aggregates=_aggregate(rows, ("N", "method")),
                       failures=failures, seeds=seeds)

"""Sparse FIR identification with the weighted elastic-net criterion.

Estimates a low-order impulse response from noisy input/output data and
checks, empirically, that the estimate vanishes past the leading order.
"""
from .baselines import solve_ls, solve_tls
from .design import RegressionProblem, assemble, build_toeplitz, cost_J1, cost_normalized
from .experiments import (RunConfig, Scenario, run_monte_carlo, run_n_sweep,
                          run_tradeoff_grid)
from .exceptions import ConfigError, ConvergenceError, EmptySignalError, RankError
from .metrics import fit, simulate_model_output, tail_norms
from .sim import (DataRecord, SignalSpec, SystemModel, benchmark_system, derive_seed,
                  gen_iid,
                  impulse_response, make_dataset, simulate_lti)
from .solver import Solution, soft_threshold, solve_lrr, solve_path, solve_weighted_lasso
from .theory import (RecoveryReport, StabilityBound, chebyshev_sample_size,
                     check_support_condition, gamma_for_order, gamma_leading_lb, kappa,
                     leading_order, recovery_coefficient)

__version__ = "0.1.0"

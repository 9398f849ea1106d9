"""
Checking the support certificate on a single record
===================================================

For a fixed record we scan gamma and compare the certificate with the
support the solver actually returns.  Whenever the certificate holds the
support must sit inside the first n taps; the converse need not hold.
"""
import numpy as np

from lrrfir import (SignalSpec, SystemModel, assemble, check_support_condition,
                    derive_seed, make_dataset, solve_path)

truth = [0.0, 1.0, 0.6, -0.3, 0.1]
rec = make_dataset(SystemModel.from_fir(truth), SignalSpec(sigma_u=0.01, sigma_y=0.05,
                                                           seed=derive_seed(5, 0)),
                   N=4000, q=30)
n = 5
p = assemble(rec, 0.01, 1.0)
gammas = np.geomspace(200, 0.05, 25)
for g, sol in zip(gammas, solve_path(p, gammas)):
    rep = check_support_condition(p.with_gamma(g), n)
    inside = sol.support.size == 0 or sol.support.max() < n
    print("gamma=%8.3f  Upsilon=%.3f  lhs=%.3f  rhs=%.3f  holds=%-5s  support inside=%s"
          % (g, rep.upsilon, rep.lhs, rep.rhs, rep.holds, inside))

"""
Accuracy versus complexity over a (sigma_u, gamma) grid
========================================================

One identification record, four input-noise levels, a descending gamma
path per level (warm starts).  Each row traces a curve of ||x||_0 against
||y - U x||^2.
"""
import json

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from lrrfir import RunConfig, derive_seed, make_dataset, run_tradeoff_grid

cfg = RunConfig.from_dict(json.load(open("../configs/grid.json")))
rec = make_dataset(cfg.system, cfg.signal(seed=derive_seed(cfg.seed, 0, 0, 0)),
                   cfg.N, cfg.q, cfg.discard)
res = run_tradeoff_grid(rec, cfg)

fig, ax = plt.subplots()
for k, su in enumerate(res.sigma_us):
    ax.plot(res.C[k], res.E[k], "o-", ms=3, label="sigma_u = %g" % su)
ax.set_xlabel("||x||_0")
ax.set_ylabel("||y - U x||^2")
ax.set_yscale("log")
ax.legend()
fig.savefig("02_tradeoff.svg")
print("failed cells:", int(res.failed.sum()))

"""
Tail sparsity as the record grows
=================================

Nested windows N = 1000 .. 32000 of one long record per repeat.  The LRR
tail shrinks with N; the dense estimates keep every tail tap.
"""
import json

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from lrrfir import RunConfig, run_n_sweep

cfg = RunConfig.from_dict(json.load(open("../configs/nsweep.json")))
sw = run_n_sweep(cfg)

fig, (a1, a2) = plt.subplots(1, 2, figsize=(9, 3.5))
for m in ("LRR", "LS", "TLS"):
    Ns, tn0 = sw.series(m, "TN0")
    _, f = sw.series(m, "FIT")
    a1.plot(Ns, tn0, "o-", label=m)
    a2.plot(Ns, f, "o-", label=m)
    print(m, "TN0", [round(v, 2) for v in tn0], "FIT", [round(v, 2) for v in f])
for a in (a1, a2):
    a.set_xscale("log")
    a.set_xlabel("N")
a1.set_ylabel("mean TN0")
a2.set_ylabel("mean FIT [%]")
a1.legend()
fig.tight_layout()
fig.savefig("04_nsweep.svg")

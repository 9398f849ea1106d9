"""
The benchmark system and its impulse-response envelope
======================================================

Fourth-order system with a one-step delay.  We simulate a pulse, compare
with the envelope 6 * 0.93^(i-1) and look at the noise floor that sets the
leading order for N = 1000 samples.
"""
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from lrrfir import StabilityBound, benchmark_system, impulse_response, leading_order

h = impulse_response(benchmark_system(), 500)
bound = StabilityBound(6.0, 0.93)
i = np.arange(1, 501)
print("first taps:", np.round(h[:6], 4))
print("static gain (sum of 500 taps): %.3f" % h.sum())

for sy in (0.1, 0.3, 0.5):
    print("sigma_y=%.1f  n_l=%d" % (sy, leading_order(bound, 1.0, sy, 1000, 500)))

fig, ax = plt.subplots()
ax.semilogy(i, np.abs(h), label="|h(i)|")
ax.semilogy(i, bound.envelope(i), "--", label="L rho^(i-1)")
ax.axhline(0.3 / np.sqrt(1000), color="k", lw=0.8, label="noise floor, sigma_y=0.3")
ax.set_xlabel("i")
ax.legend()
fig.savefig("01_envelope.svg")

"""Particle simulation versus the homogenized closed form.

Runs a modest Brownian-dynamics experiment for eleven evenly spread patches
and compares the absorbed fraction with the analytic curve. Set
PATCHYRX_THREADS to use more cores; the numbers do not change.
"""

import time

from patchyrx import ChannelParams, SimConfig, fibonacci_layout, multi_patch_cir, simulate

params = ChannelParams.paper_defaults()
layout = fibonacci_layout(11, 0.05, params.r_R)
config = SimConfig(params, layout, dt=1e-5, t_end=1.0, realizations=40, seed=1, bin_width=0.05)

start = time.perf_counter()
stats = simulate(config)
print(f"{config.realizations} realizations x {params.N_sigma} molecules in {time.perf_counter() - start:.1f} s")
print(f"absorbed {stats.hit_counts.sum()}, degraded {stats.degraded_count}, still free {stats.survivors}\n")

checkpoints = [0.25, 0.5, 0.75, 1.0]
analytic = multi_patch_cir(checkpoints, layout, params).H_p
print(f"{'t [s]':>6} {'analytic':>9} {'simulated':>10} {'+/- 1 se':>9}")
for t, H in zip(checkpoints, analytic):
    print(f"{t:6.2f} {H:9.4f} {stats.cumulative_at(t):10.4f} {stats.cumulative_stderr(t):9.4f}")

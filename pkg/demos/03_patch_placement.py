"""Where the patches sit matters as much as how many there are.

Thirteen equal patches covering 10% of the receiver are placed evenly, at
random, and bunched in one region. Bunched patches shade each other and the
receiver collects noticeably fewer molecules.
"""

import math

from patchyrx import ChannelParams, fibonacci_layout, multi_patch_cir, random_layout
from patchyrx.experiments import fig3_region_layout

params = ChannelParams.paper_defaults()
N, A = 13, 0.1
region, cap = fig3_region_layout(N, A, params.r_R, theta=math.pi)
layouts = {"even": fibonacci_layout(N, A, params.r_R), "region": region}
layouts.update({f"random seed {s}": random_layout(N, A, params.r_R, seed=s) for s in (1, 2, 3)})

print(f"region cap angular radius: {cap:.3f} rad\n")
for name, layout in sorted(layouts.items(), key=lambda kv: -multi_patch_cir([0.5], kv[1], params).H_p[0]):
    r = multi_patch_cir([0.5, 2.0], layout, params)
    print(f"{name:15s} G_p={r.G_p:6.3f}  N_sigma*H_p(0.5 s)={params.N_sigma * r.H_p[0]:6.2f}  "
          f"N_sigma*H_p(2 s)={params.N_sigma * r.H_p[1]:6.2f}")

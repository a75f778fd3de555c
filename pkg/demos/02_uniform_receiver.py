"""Impulse response of a uniformly reactive receiver for a range of surface rates.

Larger rates w approach the perfectly absorbing sphere, whose first-passage
density is known in closed form; degradation scales everything by exp(-k_d t).
"""

import numpy as np

from patchyrx import (ChannelParams, asymptotic_fraction_uniform, cumulative_fraction_uniform,
                      hitting_rate_uniform)
from patchyrx.analytic import fully_absorbing_density

params = ChannelParams.paper_defaults()
t = np.array([0.05, 0.1, 0.25, 0.5, 1.0, 2.0])

print("hitting rate h_u(t) [1/s]")
print("w [um/s] " + "".join(f"{s:>11g}" for s in t))
for w in (0.1, 1.0, 10.0, 100.0, 1e6):
    print(f"{w:8g} " + "".join(f"{v:11.3e}" for v in hitting_rate_uniform(t, w, params)))

no_decay = ChannelParams.paper_defaults(k_d=0.0)
print("\nperfect absorber, no decay:", "".join(f"{v:11.3e}" for v in fully_absorbing_density(t, no_decay)))

print("\nabsorbed fraction: by 2 s versus eventually")
for w in (0.1, 1.0, 10.0, 100.0):
    H2 = cumulative_fraction_uniform(2.0, w, params)
    print(f"  w={w:6g}  H(2 s)={H2:.4f}  H(inf)={asymptotic_fraction_uniform(w, params):.4f}")

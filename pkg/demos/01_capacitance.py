"""How much of a sphere's absorbing power survives when only patches absorb?

A fully absorbing sphere of radius r_R has capacitance r_R. Covering just 5%
of it with small patches already recovers a large share, and spreading the
same area over more patches recovers more.
"""

import warnings

from patchyrx import capacitance, capacitance_full_sphere, effective_channel, fibonacci_layout

r_R, D, A = 10.0, 79.4, 0.05
print(f"full sphere: G = {capacitance_full_sphere(r_R):.3f} um\n")
print(f"{'N_p':>4} {'a [um]':>8} {'G_p [um]':>9} {'G_p/r_R':>8} {'w_e [um/s]':>11}")
for n in (1, 3, 5, 11, 21, 51, 101):
    with warnings.catch_warnings():
        # one 4.5 um patch is outside the expansion's comfort zone; we show it anyway
        warnings.simplefilter("ignore")
        layout = fibonacci_layout(n, A, r_R)
        ch = effective_channel(layout, D)
    print(f"{n:4d} {layout.radii[0]:8.4f} {ch.G_p:9.4f} {ch.G_p / r_R:8.3f} {ch.w_e:11.3f}")

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    share = capacitance(fibonacci_layout(101, A, r_R)) / r_R
print(f"\n101 patches on 5% of the surface carry {share:.0%} of the full-sphere current")

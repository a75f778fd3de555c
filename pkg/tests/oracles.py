"""Independent reference evaluations used only by the tests."""

import json
import math
from pathlib import Path

import mpmath as mp
from scipy.integrate import quad

from patchyrx.analytic import hitting_rate_uniform

REFERENCE = json.loads((Path(__file__).parent / "data" / "reference.json").read_text())


def literal_cumulative(t, w, params, dps=60):
    """Absorbed fraction from the textbook alpha/psi decomposition, in high precision.

    Valid for k_d > 0 and zeta(w) != 0 only; precision absorbs every cancellation.
    """
    with mp.workdps(dps):
        D, k, rR, r0 = (mp.mpf(v) for v in (params.D_sigma, params.k_d, params.r_R, params.r_0))
        t, w = mp.mpf(t), mp.mpf(w)
        eps = (r0 - rR) / mp.sqrt(4 * D)
        g = (w * rR + D) / (D * rR)
        z = g**2 * D - k
        beta = (r0 - rR) * mp.sqrt(k / D)
        u = eps / mp.sqrt(t)
        a1 = (mp.exp(-beta) * mp.erfc(u - mp.sqrt(k * t))
              - mp.exp(beta) * mp.erfc(u + mp.sqrt(k * t))) / (2 * mp.sqrt(k * D))
        psi1 = 2 * g * mp.exp(g * (r0 - rR) + z * t) * mp.erfc(u + g * mp.sqrt(D * t))
        psi2 = ((g**2 * mp.sqrt(D / k) - g) * mp.exp(-beta) * mp.erf(u - mp.sqrt(k * t))
                - (g**2 * mp.sqrt(D / k) + g)
                * (mp.exp(-beta) - mp.exp(beta) * mp.erfc(u + mp.sqrt(k * t))))
        a2 = (psi1 - psi2) / (2 * z) - g * mp.exp(-beta) / z
        return float(rR * w / r0 * (a1 - a2))


def literal_hitting_rate(t, w, params, dps=60):
    """Hitting rate evaluated term by term with arbitrary precision."""
    with mp.workdps(dps):
        D, k, rR, r0 = (mp.mpf(v) for v in (params.D_sigma, params.k_d, params.r_R, params.r_0))
        t, w = mp.mpf(t), mp.mpf(w)
        eps = (r0 - rR) / mp.sqrt(4 * D)
        g = (w * rR + D) / (D * rR)
        z = g**2 * D - k
        first = mp.exp(-eps**2 / t - k * t) / mp.sqrt(mp.pi * D * t)
        second = g * mp.exp(g * (r0 - rR) + z * t) * mp.erfc(eps / mp.sqrt(t) + g * mp.sqrt(D * t))
        return float(rR * w / r0 * (first - second))


def integrated_hitting_rate(t, w, params):
    """Adaptive quadrature of the hitting rate from 0 to t."""
    val, _ = quad(lambda u: hitting_rate_uniform(u, w, params), 0.0, t,
                  epsabs=1e-13, epsrel=1e-12, limit=500)
    return val


def fully_absorbing_fraction(t, params):
    """Absorbed fraction by time t for a perfectly absorbing sphere without degradation."""
    L = params.r_0 - params.r_R
    return params.r_R / params.r_0 * math.erfc(L / math.sqrt(4.0 * params.D_sigma * t))


def first_passage_density(t, params):
    L = params.r_0 - params.r_R
    D = params.D_sigma
    return params.r_R / params.r_0 * L / math.sqrt(4 * math.pi * D * t**3) * math.exp(-L**2 / (4 * D * t))


def zeta_root(params):
    """Reaction rate at which gamma(w)^2 D equals k_d."""
    return params.D_sigma * (math.sqrt(params.k_d / params.D_sigma) - 1.0 / params.r_R)

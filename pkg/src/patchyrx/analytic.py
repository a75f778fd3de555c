"""Closed-form channel impulse response of a spherical receiver.

For a receiver whose whole surface reacts with rate ``w`` and a transmitter at
distance ``r_0`` averaged over all directions, this module gives the expected
hitting rate ``h_u(t, w)``, the absorbed fraction ``H_u(t, w)`` and its limit
``H_u_inf(w)``. A patchy receiver is handled by substituting its effective
rate ``w_e``.

Every ``exp(A) * erfc(B)`` product is evaluated as ``erfcx(B) * exp(A - B**2)``;
the direct form overflows for rates above roughly 1e3 um/s. The absorbed
fraction is written in a form whose apparent pole at ``zeta(w) = 0`` cancels
analytically, so it is finite for every ``w >= 0`` and ``k_d >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, erfcx

from .capacitance import EffectiveChannel, effective_channel
from .geometry import ChannelParams, PatchLayout

SQRT_PI = math.sqrt(math.pi)
_SERIES_START = 8.0
_SERIES_TERMS = 16


@dataclass(frozen=True)
class DerivedCoefficients:
    epsilon: float
    gamma: float
    zeta: float
    beta: float

    @classmethod
    def of(cls, w: float, params: ChannelParams) -> "DerivedCoefficients":
        D, k_d = params.D_sigma, params.k_d
        gamma = (w * params.r_R + D) / (D * params.r_R)
        return cls(
            epsilon=(params.r_0 - params.r_R) / math.sqrt(4.0 * D),
            gamma=gamma,
            zeta=gamma**2 * D - k_d,
            beta=(params.r_0 - params.r_R) * math.sqrt(k_d / D),
        )


def erfcx_gap(x):
    """``1/sqrt(pi) - x * erfcx(x)`` for x >= 0, without cancellation at large x."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < _SERIES_START
    xs = x[small]
    out[small] = 1.0 / SQRT_PI - xs * erfcx(xs)
    xl = x[~small]
    inv = 1.0 / (xl * xl)
    # asymptotic series: sum_n (-1)^(n+1) (2n-1)!! / (2x^2)^n
    term = 0.5 * inv
    acc = term.copy()
    for n in range(2, _SERIES_TERMS + 1):
        term = -term * (2 * n - 1) * 0.5 * inv
        acc += term
    out[~small] = acc / SQRT_PI
    return out


def erfcx_divided_difference(y, h):
    """``(erfcx(y + h) - erfcx(y)) / h``, smooth through h = 0."""
    y, h = np.broadcast_arrays(np.asarray(y, dtype=float), np.asarray(h, dtype=float))
    mid = y + 0.5 * h
    near = np.abs(h) < 1e-3 * np.maximum(1.0, np.abs(mid))
    out = np.empty(y.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (erfcx(y + h) - erfcx(y)) / h
    out[~near] = direct[~near]
    m, hn = mid[near], h[near]
    f0 = erfcx(m)
    d1 = -2.0 * erfcx_gap(m)
    d2 = 2.0 * f0 + 2.0 * m * d1
    d3 = 4.0 * d1 + 2.0 * m * d2
    out[near] = d1 + d3 * hn * hn / 24.0
    return out


def _check(t, w):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise ValueError("time must be positive")
    if not w >= 0:
        raise ValueError(f"reaction rate must be non-negative, got {w}")
    return t


def _scalar_or_array(out, t_in):
    return float(out) if np.ndim(t_in) == 0 else out


def hitting_rate_uniform(t, w: float, params: ChannelParams):
    """Expected molecule hitting rate per released molecule, 1/s."""
    tt = _check(t, w)
    p = params
    D = p.D_sigma
    c = DerivedCoefficients.of(w, p)
    sqrt_t = np.sqrt(tt)
    lead = c.epsilon / sqrt_t
    x = lead + c.gamma * np.sqrt(D * tt)
    # 1/sqrt(pi D t) - gamma*erfcx(x), regrouped so both parts are positive
    bracket = (erfcx_gap(x) + lead * erfcx(x)) / np.sqrt(D * tt)
    decay = np.exp(-c.epsilon**2 / tt) * np.exp(-p.k_d * tt)
    out = p.r_R * w / p.r_0 * decay * bracket
    return _scalar_or_array(out, t)


def cumulative_fraction_uniform(t, w: float, params: ChannelParams):
    """Expected fraction of released molecules absorbed by time ``t``."""
    tt = _check(t, w)
    if w == 0:
        return _scalar_or_array(np.zeros_like(tt), t)
    p = params
    D, k_d = p.D_sigma, p.k_d
    c = DerivedCoefficients.of(w, p)
    q = math.sqrt(k_d / D)
    sqrt_t = np.sqrt(tt)
    lead = c.epsilon / sqrt_t
    root_kt = np.sqrt(k_d * tt)
    y_plus = lead + root_kt
    y_minus = lead - root_kt
    E0 = np.exp(-c.epsilon**2 / tt) * np.exp(-k_d * tt)
    # exp(+beta) erfc(y+) and exp(-beta) erfc(y-), scaled to avoid overflow
    Ep = erfcx(y_plus) * E0
    with np.errstate(over="ignore"):
        Em = np.where(y_minus >= 0.0,
                      erfcx(np.abs(y_minus)) * E0,
                      math.exp(-c.beta) * erfc(y_minus))
    # erfc argument of the reactive term is y+ shifted by (gamma - q) sqrt(D t)
    shift = (c.gamma - q) * np.sqrt(D * tt)
    dd = erfcx_divided_difference(y_plus, shift)
    bracket = Em - Ep - 2.0 * c.gamma * np.sqrt(D * tt) * E0 * dd
    out = p.r_R * w / (2.0 * p.r_0 * D * (c.gamma + q)) * bracket
    return _scalar_or_array(np.clip(out, 0.0, None), t)


def asymptotic_fraction_uniform(w: float, params: ChannelParams) -> float:
    """Fraction of released molecules eventually absorbed."""
    if not w >= 0:
        raise ValueError(f"reaction rate must be non-negative, got {w}")
    if w == 0:
        return 0.0
    p = params
    c = DerivedCoefficients.of(w, p)
    q = math.sqrt(p.k_d / p.D_sigma)
    # equals r_R w (gamma - q) e^-beta / (r_0 zeta) with the common factor cancelled
    return p.r_R * w * math.exp(-c.beta) / (p.r_0 * p.D_sigma * (c.gamma + q))


@dataclass(frozen=True)
class MultiPatchResponse:
    t: np.ndarray
    h_p: np.ndarray
    H_p: np.ndarray
    H_p_inf: float
    channel: EffectiveChannel

    @property
    def G_p(self) -> float:
        return self.channel.G_p

    @property
    def w_e(self) -> float:
        return self.channel.w_e


def multi_patch_cir(t, layout: PatchLayout, params: ChannelParams) -> MultiPatchResponse:
    """Hitting rate, absorbed fraction and its limit for a patchy receiver."""
    if not math.isclose(layout.r_R, params.r_R, rel_tol=1e-12):
        raise ValueError(f"layout r_R={layout.r_R} does not match params r_R={params.r_R}")
    ch = effective_channel(layout, params.D_sigma)
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    return MultiPatchResponse(
        t=tt,
        h_p=np.atleast_1d(hitting_rate_uniform(tt, ch.w_e, params)),
        H_p=np.atleast_1d(cumulative_fraction_uniform(tt, ch.w_e, params)),
        H_p_inf=asymptotic_fraction_uniform(ch.w_e, params),
        channel=ch,
    )


def fully_absorbing_density(t, params: ChannelParams):
    """First-passage density to a perfectly absorbing sphere, no degradation."""
    t = np.asarray(t, dtype=float)
    L = params.r_0 - params.r_R
    D = params.D_sigma
    return params.r_R / params.r_0 * L / np.sqrt(4.0 * math.pi * D * t**3) * np.exp(-L**2 / (4.0 * D * t))

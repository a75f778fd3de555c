"""Receiver capacitance, diffusion current and effective surface reaction rate.

The capacitance ``G`` of an absorbing body sets its steady diffusion current
``I = 4 pi D G C_0``. A fully absorbing sphere has ``G = r_R``. For a sphere
carrying small absorbing patches, ``G_p`` follows from matched asymptotic
expansions in the small parameter ``kappa = a_1 / r_R``. Remainder terms of
those expansions are dropped.

Homogenization replaces the patches by a uniform partially absorbing surface
with rate ``w_e`` chosen so that both surfaces carry the same current.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import PatchLayout

KAPPA_WARN = 0.3
COVERAGE_WARN = 0.2


class SingularGeometryError(ValueError):
    """Two patch centres coincide, so the pair interaction is undefined."""


class ExpansionOutOfRangeError(ValueError):
    """The truncated expansion gives a capacitance outside (0, r_R)."""


class ExpansionAccuracyWarning(UserWarning):
    """Patch sizes or coverage are large enough that the expansion degrades."""


@dataclass(frozen=True)
class CapacitanceExpansionTerms:
    kappa: float
    m: np.ndarray
    m_bar: float
    s: np.ndarray
    vartheta: float
    pairwise_F: np.ndarray


@dataclass(frozen=True)
class EffectiveChannel:
    G_p: float
    w_e: float


def pair_interaction(l_i, l_j) -> float:
    """Interaction between two patch centres given as unit vectors."""
    u = np.asarray(l_i, dtype=float)
    v = np.asarray(l_j, dtype=float)
    for w in (u, v):
        if abs(np.linalg.norm(w) - 1.0) > 1e-9:
            raise ValueError("pair_interaction expects unit vectors")
    d = float(np.linalg.norm(u - v))
    if d == 0.0:
        raise SingularGeometryError("coincident patch centres")
    return 1.0 / d + 0.5 * math.log(d) - 0.5 * math.log(2.0 + d)


def _pair_matrix(centers: np.ndarray) -> np.ndarray:
    n = len(centers)
    F = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            F[i, j] = F[j, i] = pair_interaction(centers[i], centers[j])
    return F


def _check_accuracy(kappa: float, coverage: float) -> None:
    if kappa > KAPPA_WARN or coverage > COVERAGE_WARN:
        warnings.warn(
            f"asymptotic capacitance is unreliable at kappa={kappa:.3g}, coverage={coverage:.3g}",
            ExpansionAccuracyWarning, stacklevel=3)


def _checked(G: float, r_R: float) -> float:
    if not (0.0 < G < r_R):
        raise ExpansionOutOfRangeError(
            f"expansion gives G_p={G:.6g} outside (0, r_R={r_R}); layout is beyond its validity")
    return G


def expansion_terms(layout: PatchLayout) -> CapacitanceExpansionTerms:
    r_R = layout.r_R
    a = layout.radii
    kappa = a[0] / r_R
    m = 2.0 * a / (r_R * kappa * math.pi)
    m_bar = float(m.mean())
    s = 0.5 * m * (np.log(4.0 * a / (r_R * kappa)) - 1.5)
    N = len(a)
    vartheta = float(np.sum(m**2) ** 2 / (N * m_bar) - np.sum(m**3))
    return CapacitanceExpansionTerms(kappa, m, m_bar, s, vartheta, _pair_matrix(layout.centers))


def capacitance_general(layout: PatchLayout) -> float:
    """Capacitance of a receiver with patches of arbitrary sizes and positions."""
    t = expansion_terms(layout)
    _check_accuracy(t.kappa, layout.coverage)
    N = len(layout)
    kappa, m = t.kappa, t.m
    Nm = N * t.m_bar
    log_half = math.log(kappa / 2.0)
    pair_sum = float(np.sum(np.triu(np.outer(m, m) * t.pairwise_F, k=1)))
    bracket = (1.0
               + kappa / (2.0 * Nm) * log_half * float(np.sum(m**2))
               + kappa / Nm * (float(np.dot(m, t.s)) + 2.0 * pair_sum)
               + (kappa * log_half) ** 2 * t.vartheta / (4.0 * Nm))
    inv_G = 2.0 / (Nm * kappa * layout.r_R) * bracket
    return _checked(float(1.0 / inv_G), layout.r_R)


def capacitance_identical(layout: PatchLayout) -> float:
    """Capacitance when every patch has the same radius."""
    a = layout.radii
    if not np.allclose(a, a[0], rtol=1e-12, atol=0.0):
        raise ValueError("capacitance_identical needs equal patch radii")
    N = len(layout)
    kappa = a[0] / layout.r_R
    _check_accuracy(kappa, layout.coverage)
    F = _pair_matrix(layout.centers)
    pair_sum = float(np.sum(np.triu(F, k=1)))
    bracket = 1.0 + kappa / math.pi * (math.log(2.0 * kappa) - 1.5 + 4.0 / N * pair_sum)
    inv_G = math.pi / (N * kappa * layout.r_R) * bracket
    return _checked(float(1.0 / inv_G), layout.r_R)


def capacitance_single(a: float, r_R: float) -> float:
    """Capacitance of a receiver with one patch, to second order in kappa."""
    if not (0.0 < a < r_R):
        raise ValueError(f"need 0 < a < r_R, got a={a}, r_R={r_R}")
    kappa = a / r_R
    _check_accuracy(kappa, a**2 / (4.0 * r_R**2))
    bracket = (1.0 + kappa / math.pi * (math.log(2.0 * kappa) - 1.5)
               - kappa**2 / math.pi**2 * (math.pi**2 + 21.0) / 36.0)
    inv_G = math.pi / (kappa * r_R) * bracket
    return _checked(float(1.0 / inv_G), r_R)


def capacitance_full_sphere(r_R: float) -> float:
    if not r_R > 0:
        raise ValueError("r_R must be positive")
    return float(r_R)


def capacitance(layout: PatchLayout) -> float:
    """Pick the most specific expansion for the layout's shape."""
    a = layout.radii
    if len(layout) == 1:
        return capacitance_single(float(a[0]), layout.r_R)
    if np.allclose(a, a[0], rtol=1e-12, atol=0.0):
        return capacitance_identical(layout)
    return capacitance_general(layout)


def diffusion_current(G: float, D_sigma: float, C_0: float = 1.0) -> float:
    """Steady molecule current into a body of capacitance ``G``."""
    if G < 0:
        raise ValueError("capacitance must be non-negative")
    return 4.0 * math.pi * D_sigma * G * C_0


def effective_rate(G_p: float, D_sigma: float, r_R: float) -> float:
    """Uniform surface reaction rate carrying the same current as capacitance ``G_p``."""
    if not G_p > 0:
        raise ValueError(f"G_p must be positive, got {G_p}")
    if not G_p < r_R:
        raise ValueError(f"G_p={G_p} >= r_R={r_R}: homogenization needs a partially absorbing receiver")
    return D_sigma * G_p / (r_R * (r_R - G_p))


def effective_channel(layout: PatchLayout, D_sigma: float) -> EffectiveChannel:
    G_p = capacitance(layout)
    return EffectiveChannel(G_p, effective_rate(G_p, D_sigma, layout.r_R))

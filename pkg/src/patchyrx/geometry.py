"""Receiver sphere, absorbing-patch layouts and transmitter placement.

A patch of disc radius ``a`` on a receiver of radius ``r_R`` is realized as a
spherical cap of angular radius ``arcsin(a / r_R)``. Coverage uses the flat-disc
convention ``sum(a_i**2) / (4 r_R**2)``, not the cap area.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
MAX_RANDOM_ATTEMPTS = 1_000_000
BOUNDARY_SLACK = 1e-12


class InfeasibleLayoutError(ValueError):
    """Raised when patches cannot be placed without overlapping."""


@dataclass(frozen=True)
class ChannelParams:
    """Physical constants of the link (lengths in um, times in s)."""

    D_sigma: float
    k_d: float
    r_R: float
    r_0: float
    N_sigma: int = 1000
    C_0: float = 1.0

    def __post_init__(self):
        if not self.D_sigma > 0:
            raise ValueError(f"D_sigma must be positive, got {self.D_sigma}")
        if not self.k_d >= 0:
            raise ValueError(f"k_d must be non-negative, got {self.k_d}")
        if not self.r_R > 0:
            raise ValueError(f"r_R must be positive, got {self.r_R}")
        if not self.r_0 > self.r_R:
            raise ValueError(f"r_0 ({self.r_0}) must exceed r_R ({self.r_R})")
        if self.N_sigma < 1 or int(self.N_sigma) != self.N_sigma:
            raise ValueError(f"N_sigma must be a positive integer, got {self.N_sigma}")
        if not self.C_0 > 0:
            raise ValueError(f"C_0 must be positive, got {self.C_0}")

    @classmethod
    def paper_defaults(cls, **overrides) -> "ChannelParams":
        """Parameter set of the reference numerical study."""
        values = dict(D_sigma=79.4, k_d=0.8, r_R=10.0, r_0=20.0, N_sigma=1000, C_0=1.0)
        values.update(overrides)
        return cls(**values)


def direction_from_angles(theta: float, phi: float) -> np.ndarray:
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


def angles_from_direction(u: Sequence[float]) -> tuple[float, float]:
    x, y, z = (float(c) for c in u)
    theta = math.atan2(math.hypot(x, y), z)
    phi = math.atan2(y, x) % (2.0 * math.pi)
    return theta, phi


def angular_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Great-circle angle between two unit vectors, accurate near 0 and pi."""
    return math.atan2(float(np.linalg.norm(np.cross(u, v))), float(np.dot(u, v)))


@dataclass(frozen=True)
class Patch:
    """Circular absorbing patch centred at polar/azimuthal angles (theta, phi)."""

    theta: float
    phi: float
    a: float
    r_R: float
    direction: np.ndarray = field(init=False, repr=False, compare=False)
    alpha: float = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.a < self.r_R):
            raise ValueError(f"patch radius must satisfy 0 < a < r_R, got a={self.a}, r_R={self.r_R}")
        u = direction_from_angles(self.theta, self.phi)
        u.setflags(write=False)
        object.__setattr__(self, "direction", u)
        object.__setattr__(self, "alpha", math.asin(self.a / self.r_R))


@dataclass(frozen=True)
class PatchLayout:
    """Ordered, pairwise non-overlapping set of patches on one receiver.

    Patch order matters: the first patch sets the expansion parameter used by
    the capacitance formulas.
    """

    r_R: float
    patches: tuple[Patch, ...]

    def __post_init__(self):
        object.__setattr__(self, "patches", tuple(self.patches))
        if not self.patches:
            raise ValueError("a layout needs at least one patch")
        for p in self.patches:
            if p.r_R != self.r_R:
                raise ValueError(f"patch built for r_R={p.r_R} placed on receiver r_R={self.r_R}")
        pair = first_overlap(self.patches)
        if pair is not None:
            i, j = pair
            raise InfeasibleLayoutError(f"patches {i} and {j} overlap")

    def __len__(self) -> int:
        return len(self.patches)

    @property
    def coverage(self) -> float:
        return sum(p.a**2 for p in self.patches) / (4.0 * self.r_R**2)

    @property
    def radii(self) -> np.ndarray:
        return np.array([p.a for p in self.patches])

    @property
    def centers(self) -> np.ndarray:
        """(N_p, 3) array of unit centre directions."""
        return np.array([p.direction for p in self.patches])

    @property
    def alphas(self) -> np.ndarray:
        return np.array([p.alpha for p in self.patches])

    def to_dict(self) -> dict:
        return {
            "r_R": self.r_R,
            "patches": [{"theta": p.theta, "phi": p.phi, "a": p.a} for p in self.patches],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PatchLayout":
        try:
            r_R = float(doc["r_R"])
            descriptors = [(float(p["theta"]), float(p["phi"]), float(p["a"])) for p in doc["patches"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed layout document: {exc!r}") from exc
        return explicit_layout(descriptors, r_R)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "PatchLayout":
        return cls.from_dict(json.loads(Path(path).read_text()))


def first_overlap(patches: Sequence[Patch]) -> tuple[int, int] | None:
    """Return the first (i, j) pair whose caps touch or overlap, else None."""
    for i in range(len(patches)):
        for j in range(i + 1, len(patches)):
            gap = angular_distance(patches[i].direction, patches[j].direction)
            if not gap > patches[i].alpha + patches[j].alpha:
                return i, j
    return None


def _equal_radius(N_p: int, A: float, r_R: float) -> float:
    if not (isinstance(N_p, (int, np.integer)) and N_p >= 1):
        raise ValueError(f"N_p must be a positive integer, got {N_p!r}")
    if not (0.0 < A < 1.0):
        raise ValueError(f"coverage A must lie in (0, 1), got {A}")
    if not r_R > 0:
        raise ValueError(f"r_R must be positive, got {r_R}")
    a = 2.0 * r_R * math.sqrt(A / N_p)
    if a >= r_R:
        raise InfeasibleLayoutError(
            f"{N_p} equal patches at coverage {A} need a={a:.4g} >= r_R={r_R}")
    return a


def _build(descriptors: Iterable[tuple[float, float, float]], r_R: float) -> PatchLayout:
    return PatchLayout(r_R, tuple(Patch(t, p, a, r_R) for t, p, a in descriptors))


def fibonacci_angles(N_p: int) -> list[tuple[float, float]]:
    """Polar/azimuthal angles of the odd-count Fibonacci lattice."""
    if N_p < 1 or N_p % 2 == 0:
        raise ValueError(f"Fibonacci lattice needs an odd N_p, got {N_p}")
    B = (N_p - 1) // 2
    out = []
    for i in range(1, N_p + 1):
        k = i - B - 1
        theta = math.pi / 2 - math.asin(2.0 * k / N_p)
        phi = (4.0 * math.pi * k / (1.0 + math.sqrt(5.0))) % (2.0 * math.pi)
        out.append((theta, phi))
    return out


def fibonacci_layout(N_p: int, A: float, r_R: float) -> PatchLayout:
    """Equal patches evenly spread over the receiver by a Fibonacci lattice."""
    if not isinstance(N_p, (int, np.integer)) or N_p < 1 or N_p % 2 == 0:
        raise ValueError(f"Fibonacci lattice needs an odd positive N_p, got {N_p!r}")
    a = _equal_radius(N_p, A, r_R)
    return _build(((t, p, a) for t, p in fibonacci_angles(N_p)), r_R)


def random_layout(N_p: int, A: float, r_R: float, seed: int | None = None,
                  max_attempts: int = MAX_RANDOM_ATTEMPTS) -> PatchLayout:
    """Equal patches with uniformly random, non-overlapping centres.

    Patches are placed one at a time; each candidate centre is drawn uniformly
    on the sphere and rejected if it touches an already placed cap.
    """
    a = _equal_radius(N_p, A, r_R)
    alpha = math.asin(a / r_R)
    cos_min = math.cos(2.0 * alpha)
    rng = np.random.default_rng(seed)
    centres: list[np.ndarray] = []
    attempts = 0
    while len(centres) < N_p:
        if attempts >= max_attempts:
            raise InfeasibleLayoutError(
                f"placed only {len(centres)} of {N_p} patches after {max_attempts} attempts")
        attempts += 1
        v = rng.standard_normal(3)
        v /= np.linalg.norm(v)
        # cheap cosine screen, then the exact angular test used by PatchLayout
        if any(np.dot(v, c) >= cos_min - 1e-12 and angular_distance(v, c) <= 2 * alpha
               for c in centres):
            continue
        centres.append(v)
    return _build(((*angles_from_direction(c), a) for c in centres), r_R)


def _cap_frame(theta_c: float, phi_c: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    c = direction_from_angles(theta_c, phi_c)
    e1 = np.array([math.cos(theta_c) * math.cos(phi_c), math.cos(theta_c) * math.sin(phi_c),
                   -math.sin(theta_c)])
    e2 = np.cross(c, e1)
    return c, e1, e2


def region_directions(N_p: int, cap_center_theta: float, cap_angular_radius: float,
                      cap_center_phi: float = 0.0) -> np.ndarray:
    """Sunflower (Fibonacci-spiral) points spread evenly inside a spherical cap.

    Point i sits at area fraction (2i - 1) / (2 N_p) of the cap with azimuth
    advancing by the golden angle; a single point goes to the cap centre.
    """
    c, e1, e2 = _cap_frame(cap_center_theta, cap_center_phi)
    if N_p == 1:
        return c[None, :].copy()
    i = np.arange(1, N_p + 1)
    frac = (2 * i - 1) / (2.0 * N_p)
    rho = np.arccos(1.0 - (1.0 - math.cos(cap_angular_radius)) * frac)
    psi = i * GOLDEN_ANGLE
    pts = (np.cos(rho)[:, None] * c
           + (np.sin(rho) * np.cos(psi))[:, None] * e1
           + (np.sin(rho) * np.sin(psi))[:, None] * e2)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def region_layout(N_p: int, A: float, r_R: float, cap_center_theta: float,
                  cap_angular_radius: float, cap_center_phi: float = 0.0) -> PatchLayout:
    """Equal patches spread evenly with centres inside a spherical cap."""
    a = _equal_radius(N_p, A, r_R)
    if not (0.0 < cap_angular_radius <= math.pi):
        raise ValueError(f"cap angular radius must lie in (0, pi], got {cap_angular_radius}")
    dirs = region_directions(N_p, cap_center_theta, cap_angular_radius, cap_center_phi)
    return _build(((*angles_from_direction(u), a) for u in dirs), r_R)


def min_region_radius(N_p: int, A: float, r_R: float, cap_center_theta: float = math.pi,
                      cap_center_phi: float = 0.0, tol: float = 1e-6) -> float:
    """Smallest cap radius for which ``region_layout`` produces a valid layout."""

    def feasible(R: float) -> bool:
        try:
            region_layout(N_p, A, r_R, cap_center_theta, R, cap_center_phi)
        except InfeasibleLayoutError:
            return False
        return True

    _equal_radius(N_p, A, r_R)
    grid = np.linspace(0.0, math.pi, 721)[1:]
    hi = next((R for R in grid if feasible(R)), None)
    if hi is None:
        raise InfeasibleLayoutError(f"no cap radius fits {N_p} patches at coverage {A}")
    lo = hi - (grid[1] - grid[0])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def explicit_layout(descriptors: Sequence[tuple[float, float, float]], r_R: float) -> PatchLayout:
    """Layout from explicit (theta, phi, a) triples, kept in the given order."""
    return _build(descriptors, r_R)


def point_in_patch(p: Sequence[float], patch: Patch, tol: float = 1e-9) -> bool:
    """True iff the unit vector ``p`` lies in the patch cap (boundary included)."""
    u = np.asarray(p, dtype=float)
    if u.shape != (3,) or abs(np.linalg.norm(u) - 1.0) > tol:
        raise ValueError("point_in_patch expects a unit 3-vector")
    # the slack absorbs rounding in the angle so boundary points count as inside
    return angular_distance(u, patch.direction) <= patch.alpha + BOUNDARY_SLACK


def uniform_tx_location(r_0: float, rng: np.random.Generator) -> np.ndarray:
    """Transmitter position drawn uniformly on the sphere of radius ``r_0``."""
    v = rng.standard_normal(3)
    return r_0 * v / np.linalg.norm(v)

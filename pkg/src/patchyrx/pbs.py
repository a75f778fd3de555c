"""Particle-based Brownian-dynamics simulation of a patchy absorbing receiver.

Each realization draws a transmitter position uniformly on the sphere of radius
``r_0`` and releases ``N_sigma`` molecules there. Every time step a surviving
molecule first degrades with probability ``1 - exp(-k_d dt)``, then takes an
isotropic Gaussian step. A step ending inside the receiver is traced back to
its first crossing of the sphere; the molecule is absorbed if that point lies
in a patch and otherwise returns to where the step started.

Molecules far from the receiver are advanced with aggregated steps: ``k``
consecutive Gaussian steps sum to one Gaussian of variance ``k`` times larger,
and ``k`` is chosen so the aggregated displacement stays many standard
deviations short of the receiver surface. Degradation is drawn up front as a
geometric number of survived steps, which is the same law as the per-step coin.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .geometry import ChannelParams, PatchLayout, uniform_tx_location

MODE_PATCHES = 0
MODE_FULL = 1
MODE_REFLECT = 2
_MODES = {"patches": MODE_PATCHES, "full": MODE_FULL, "reflect": MODE_REFLECT}

# aggregated steps only while the surface is this many step-sigmas away
SAFETY_SIGMAS = 8.0

THREADS_ENV = "PATCHYRX_THREADS"


@dataclass(frozen=True)
class SimConfig:
    params: ChannelParams
    layout: PatchLayout | None
    dt: float = 1e-5
    t_end: float = 1.0
    realizations: int = 200
    seed: int = 0
    bin_width: float = 0.01
    mode: str = "patches"
    aggregate_far_steps: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= self.dt:
            raise ValueError("t_end must be at least one time step")
        if not self.bin_width >= self.dt:
            raise ValueError("bin_width must be at least one time step")
        if self.realizations < 1:
            raise ValueError("need at least one realization")
        if self.mode not in _MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {sorted(_MODES)}")
        if self.mode == "patches":
            if self.layout is None:
                raise ValueError("mode 'patches' needs a layout")
            if not math.isclose(self.layout.r_R, self.params.r_R, rel_tol=1e-12):
                raise ValueError(
                    f"layout r_R={self.layout.r_R} does not match params r_R={self.params.r_R}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def n_bins(self) -> int:
        return int(math.ceil(self.n_steps * self.dt / self.bin_width - 1e-9))

    @classmethod
    def paper_scale(cls, params: ChannelParams, layout: PatchLayout | None, **kw) -> "SimConfig":
        """Step size and realization count of the reference study."""
        kw.setdefault("dt", 1e-6)
        kw.setdefault("realizations", 1000)
        return cls(params, layout, **kw)


@dataclass
class HittingStats:
    bin_edges: np.ndarray
    hit_counts: np.ndarray
    degraded_count: int
    survivors: int
    realizations: int
    N_sigma: int
    # per-realization absorbed counts per bin, kept for standard errors
    per_realization: np.ndarray = field(repr=False, default=None)

    @property
    def bin_width(self) -> float:
        return float(self.bin_edges[1] - self.bin_edges[0])

    @property
    def t_mid(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def total_released(self) -> int:
        return self.realizations * self.N_sigma

    def cumulative_fraction(self) -> np.ndarray:
        """Absorbed fraction by the right edge of each bin."""
        return np.cumsum(self.hit_counts) / self.total_released

    def cumulative_at(self, t: float) -> float:
        """Absorbed fraction over all bins ending at or before ``t``."""
        k = int(np.searchsorted(self.bin_edges[1:], t * (1 + 1e-12), side="right"))
        return float(self.hit_counts[:k].sum() / self.total_released)

    def cumulative_stderr(self, t: float) -> float:
        """Monte-Carlo standard error of ``cumulative_at(t)`` across realizations."""
        k = int(np.searchsorted(self.bin_edges[1:], t * (1 + 1e-12), side="right"))
        per = self.per_realization[:, :k].sum(axis=1) / self.N_sigma
        return float(per.std(ddof=1) / math.sqrt(self.realizations)) if self.realizations > 1 else math.inf

    def check_conservation(self) -> bool:
        return int(self.hit_counts.sum()) + self.degraded_count + self.survivors == self.total_released


@njit(cache=True, nogil=True)
def first_crossing(x0, y0, z0, x1, y1, z1, r_R):
    """Parameter in [0, 1] of the first crossing of the sphere by a segment, or -1."""
    vx = x1 - x0
    vy = y1 - y0
    vz = z1 - z0
    a = vx * vx + vy * vy + vz * vz
    b = 2.0 * (x0 * vx + y0 * vy + z0 * vz)
    c = x0 * x0 + y0 * y0 + z0 * z0 - r_R * r_R
    if a == 0.0:
        return -1.0
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return -1.0
    if b >= 0.0:
        # heading away from the centre: no entry for a start on or outside the sphere
        return -1.0
    # smaller root in cancellation-free form
    lam = 2.0 * c / (-b + math.sqrt(disc))
    if lam < 0.0:
        lam = 0.0
    if lam > 1.0:
        return -1.0
    return lam


@njit(cache=True, nogil=True)
def _run_realization(stream_seed, tx, n_mol, n_steps, dt, D, k_d, r_R,
                     centers, cos_alpha, mode, bin_width, n_bins, aggregate, counts):
    """Simulate one realization, adding absorptions into ``counts``.

    Returns (degraded, survivors).
    """
    np.random.seed(stream_seed)
    sigma = math.sqrt(2.0 * D * dt)
    p_deg = 1.0 - math.exp(-k_d * dt)
    r2 = r_R * r_R
    n_patches = centers.shape[0]
    degraded = 0
    survivors = 0
    far = SAFETY_SIGMAS * sigma
    for _ in range(n_mol):
        if p_deg > 0.0:
            # index of the step at whose start the molecule degrades
            death = np.random.geometric(p_deg) - 1
        else:
            death = n_steps
        stop = n_steps if death >= n_steps else death
        x = tx[0]
        y = tx[1]
        z = tx[2]
        i = 0
        absorbed = False
        while i < stop:
            if aggregate:
                gap = math.sqrt(x * x + y * y + z * z) - r_R
                if gap > 2.0 * far:
                    q = gap / far
                    k = int(q * q)
                    if k > stop - i:
                        k = stop - i
                    if k > 1:
                        s = sigma * math.sqrt(k)
                        x += s * np.random.standard_normal()
                        y += s * np.random.standard_normal()
                        z += s * np.random.standard_normal()
                        i += k
                        continue
            nx = x + sigma * np.random.standard_normal()
            ny = y + sigma * np.random.standard_normal()
            nz = z + sigma * np.random.standard_normal()
            if nx * nx + ny * ny + nz * nz < r2:
                if mode == MODE_REFLECT:
                    hit = False
                elif mode == MODE_FULL:
                    hit = True
                else:
                    lam = first_crossing(x, y, z, nx, ny, nz, r_R)
                    if lam < 0.0:
                        lam = 0.0
                    hx = x + lam * (nx - x)
                    hy = y + lam * (ny - y)
                    hz = z + lam * (nz - z)
                    hn = math.sqrt(hx * hx + hy * hy + hz * hz)
                    hit = False
                    for j in range(n_patches):
                        dot = (hx * centers[j, 0] + hy * centers[j, 1] + hz * centers[j, 2]) / hn
                        if dot >= cos_alpha[j]:
                            hit = True
                            break
                if hit:
                    b = int((i + 0.5) * dt / bin_width)
                    if b >= n_bins:
                        b = n_bins - 1
                    counts[b] += 1
                    absorbed = True
                    break
                # failed absorption: back to the start of the step
            else:
                x = nx
                y = ny
                z = nz
            i += 1
        if not absorbed:
            if death < n_steps:
                degraded += 1
            else:
                survivors += 1
    return degraded, survivors


def realization_streams(seed: int, index: int, r_0: float) -> tuple[np.ndarray, int]:
    """Transmitter position and kernel seed for one realization.

    Both derive only from ``(seed, index)`` so scheduling cannot change them.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    tx = uniform_tx_location(r_0, rng)
    kernel_seed = int(rng.integers(0, 2**32 - 1))
    return tx, kernel_seed


def default_workers() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def simulate(config: SimConfig, workers: int | None = None) -> HittingStats:
    """Run all realizations and merge their hit histograms."""
    p = config.params
    mode = _MODES[config.mode]
    if config.layout is not None and mode == MODE_PATCHES:
        centers = np.ascontiguousarray(config.layout.centers, dtype=np.float64)
        cos_alpha = np.cos(config.layout.alphas)
    else:
        centers = np.zeros((0, 3))
        cos_alpha = np.zeros(0)
    n_steps, n_bins = config.n_steps, config.n_bins
    per = np.zeros((config.realizations, n_bins), dtype=np.int64)
    fates = np.zeros((config.realizations, 2), dtype=np.int64)

    def run(index: int) -> None:
        tx, kseed = realization_streams(config.seed, index, p.r_0)
        fates[index] = _run_realization(
            kseed, tx, int(p.N_sigma), n_steps, config.dt, p.D_sigma, p.k_d, p.r_R,
            centers, cos_alpha, mode, config.bin_width, n_bins, config.aggregate_far_steps,
            per[index])

    workers = workers or default_workers()
    if workers == 1:
        for index in range(config.realizations):
            run(index)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(config.realizations)))

    edges = np.arange(n_bins + 1) * config.bin_width
    return HittingStats(
        bin_edges=edges,
        hit_counts=per.sum(axis=0),
        degraded_count=int(fates[:, 0].sum()),
        survivors=int(fates[:, 1].sum()),
        realizations=config.realizations,
        N_sigma=int(p.N_sigma),
        per_realization=per,
    )


def empirical_hitting_rate(stats: HittingStats) -> tuple[np.ndarray, np.ndarray]:
    """Per-bin absorption rate per realization, comparable to ``N_sigma * h_p``."""
    rate = stats.hit_counts / (stats.realizations * stats.bin_width)
    return stats.t_mid, rate


def hitting_rate_stderr(stats: HittingStats) -> np.ndarray:
    """Standard error of the per-bin rate across realizations."""
    if stats.realizations < 2:
        return np.full(len(stats.hit_counts), np.inf)
    per = stats.per_realization / stats.bin_width
    return per.std(axis=0, ddof=1) / math.sqrt(stats.realizations)


def absorbed_location_check(step_start, step_end, r_R: float) -> np.ndarray | None:
    """Unit direction of the first point where a step segment meets the sphere."""
    p0 = np.asarray(step_start, dtype=float)
    p1 = np.asarray(step_end, dtype=float)
    lam = first_crossing(p0[0], p0[1], p0[2], p1[0], p1[1], p1[2], float(r_R))
    if lam < 0.0:
        return None
    hit = p0 + lam * (p1 - p0)
    return hit / np.linalg.norm(hit)

"""Desk-scale reproduction of the reference figures.

Each ``run_fig*`` function computes analytic curves, optionally overlays a
particle simulation, writes CSV (and SVG) files, and returns the outcome of
the figure's trend checks. Presets are plain dicts that round-trip through
JSON; a preset plus its seed fully determines every output file.
"""

from __future__ import annotations

import copy
import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analytic import multi_patch_cir
from .capacitance import effective_channel
from .geometry import (ChannelParams, InfeasibleLayoutError, PatchLayout, explicit_layout,
                       fibonacci_layout, min_region_radius, random_layout, region_layout)
from .pbs import SimConfig, empirical_hitting_rate, hitting_rate_stderr, simulate
from .svg import render_svg

CSV_SCHEMA_VERSION = 1

PAPER_REGION_THETA = (2.812, 3.471)
PAPER_REGION_RADIUS = (PAPER_REGION_THETA[1] - PAPER_REGION_THETA[0]) / 2

PAPER_PARAMS = {"D_sigma": 79.4, "k_d": 0.8, "r_R": 10.0, "r_0": 20.0, "N_sigma": 1000, "C_0": 1.0}

HETEROGENEOUS_AREAS = (0.01, 0.02, 0.03, 0.04)
HETEROGENEOUS_ANGLES = ((math.pi / 2, math.pi), (math.pi / 2, math.pi / 2),
                        (math.pi / 2, 0.0), (math.pi / 2, 3 * math.pi / 2))

DEFAULT_SIM = {"enabled": True, "dt": 1e-5, "t_end": 1.0, "realizations": 200, "seed": 2024,
               "bin_width": 0.02, "checkpoints": [0.25, 0.5, 1.0], "tolerance": 0.10}

PRESETS = {
    "fig2": {
        "name": "fig2",
        "A": 0.05,
        "N_p_list": [1, 3, 5, 7, 9, 11],
        "params": PAPER_PARAMS,
        "time_grid": {"start": 0.005, "end": 2.0, "steps": 400, "log": False},
        "checkpoint": 2.0,
        "sim": dict(DEFAULT_SIM, N_p=11),
        "svg": True,
    },
    "fig3": {
        "name": "fig3",
        "A": 0.1,
        "N_p": 13,
        "params": PAPER_PARAMS,
        "time_grid": {"start": 0.005, "end": 2.0, "steps": 400, "log": False},
        "checkpoint": 0.5,
        "random_seeds": [1, 2, 3, 4, 5],
        "region": {"theta": math.pi, "radius": PAPER_REGION_RADIUS, "grow_to_fit": True},
        "heterogeneous": {"areas": list(HETEROGENEOUS_AREAS),
                          "angles": [list(a) for a in HETEROGENEOUS_ANGLES]},
        "sim": dict(DEFAULT_SIM),
        "svg": True,
    },
    "fig4": {
        "name": "fig4",
        "A": 0.05,
        "N_p_list": [1, 3, 5, 7, 9, 11],
        "r_R_list": [5.0, 10.0],
        "D_list": [79.4, 158.8],
        "params": PAPER_PARAMS,
        "svg": True,
    },
}


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


@dataclass
class ExperimentResult:
    name: str
    checks: list[Check] = field(default_factory=list)
    files: dict[str, Path] = field(default_factory=dict)
    tables: dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load_preset(name: str, path: str | Path | None = None, seed: int | None = None,
                paper_scale: bool = False) -> dict:
    """Built-in preset ``name`` with overrides from a JSON file and the CLI."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}")
    preset = copy.deepcopy(PRESETS[name])
    if path is not None:
        preset = _merge(preset, json.loads(Path(path).read_text()))
    if "sim" in preset:
        if seed is not None:
            preset["sim"]["seed"] = int(seed)
        if paper_scale:
            preset["sim"]["dt"] = 1e-6
            preset["sim"]["realizations"] = 1000
    return preset


def params_from(preset: dict, **overrides) -> ChannelParams:
    values = dict(preset.get("params", PAPER_PARAMS))
    values.update(overrides)
    return ChannelParams(**values)


def time_grid(start: float, end: float, steps: int, log: bool = False) -> np.ndarray:
    if not (0 < start < end) or steps < 2:
        raise ValueError("time grid needs 0 < start < end and at least two steps")
    return np.geomspace(start, end, steps) if log else np.linspace(start, end, steps)


def format_csv(header: list[str], rows, comments: list[str] = ()) -> str:
    """CSV text with '.' decimals, LF endings, header first and trailing comments."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    for c in comments:
        buf.write(f"# {c}\n")
    return buf.getvalue()


def _cell(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.12g}"


def _write(out_dir: Path | None, result: ExperimentResult, fname: str, text: str) -> None:
    result.tables[fname] = text
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / fname
        path.write_text(text, newline="\n")
        result.files[fname] = path


def _analytic_quiet(t, layout: PatchLayout, params: ChannelParams):
    # large single patches trigger accuracy warnings; the figures use them on purpose
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return multi_patch_cir(t, layout, params)


def _pbs_agreement(result: ExperimentResult, label: str, layout: PatchLayout,
                   params: ChannelParams, sim: dict, out_dir: Path | None, prefix: str) -> None:
    cfg = SimConfig(params, layout, dt=sim["dt"], t_end=sim["t_end"],
                    realizations=sim["realizations"], seed=sim["seed"], bin_width=sim["bin_width"])
    stats = simulate(cfg)
    t_mid, rate = empirical_hitting_rate(stats)
    se = hitting_rate_stderr(stats)
    cum = stats.cumulative_fraction()
    _write(out_dir, result, f"{prefix}_pbs.csv", format_csv(
        ["t_mid", "empirical_rate", "empirical_cumulative", "rate_stderr"],
        zip(t_mid, rate, cum, se),
        [f"degraded={stats.degraded_count} survivors={stats.survivors}",
         f"layout={label} realizations={stats.realizations} dt={cfg.dt} seed={cfg.seed}",
         f"schema=simulate/v{CSV_SCHEMA_VERSION}"]))
    checkpoints = sim["checkpoints"]
    analytic = _analytic_quiet(checkpoints, layout, params)
    rows = []
    for t, H in zip(checkpoints, analytic.H_p):
        emp = stats.cumulative_at(t)
        rel = emp / H - 1.0
        rows.append((label, t, H, emp, stats.cumulative_stderr(t), rel))
        result.checks.append(Check(
            f"{label} PBS vs analytic at t={t:g} s", abs(rel) <= sim["tolerance"],
            f"analytic={H:.5g} empirical={emp:.5g} rel_err={rel:+.3%} (tol {sim['tolerance']:.0%})"))
    _write(out_dir, result, f"{prefix}_check.csv", format_csv(
        ["layout", "t", "analytic_H", "empirical_H", "empirical_stderr", "rel_err"], rows,
        [f"schema=check/v{CSV_SCHEMA_VERSION}"]))


def run_fig2(N_p_list=(1, 3, 5, 7, 9, 11), A: float = 0.05, *, preset: dict | None = None,
             out_dir: str | Path | None = None, simulate_overlay: bool = True) -> ExperimentResult:
    """Analytic CIR for evenly spread equal patches at fixed total coverage."""
    pre = _merge(PRESETS["fig2"], preset or {})
    pre["N_p_list"], pre["A"] = list(N_p_list), A
    out = Path(out_dir) if out_dir is not None else None
    params = params_from(pre)
    t = time_grid(**pre["time_grid"])
    res = ExperimentResult("fig2")
    N_s = params.N_sigma
    curves = {}
    for N_p in pre["N_p_list"]:
        layout = fibonacci_layout(N_p, A, params.r_R)
        curves[N_p] = (layout, _analytic_quiet(t, layout, params))
    cols = [f"N_p={n}" for n in curves]
    _write(out, res, "fig2_rate.csv", format_csv(
        ["t", *cols], zip(t, *(N_s * r.h_p for _, r in curves.values())),
        [f"quantity=N_sigma*h_p A={A}", f"schema=fig2/v{CSV_SCHEMA_VERSION}"]))
    _write(out, res, "fig2_cumulative.csv", format_csv(
        ["t", *cols], zip(t, *(N_s * r.H_p for _, r in curves.values())),
        [f"quantity=N_sigma*H_p A={A}", f"schema=fig2/v{CSV_SCHEMA_VERSION}"]))
    tc = pre["checkpoint"]
    at_tc = [(n, N_s * _analytic_quiet([tc], lay, params).H_p[0]) for n, (lay, _) in curves.items()]
    _write(out, res, "fig2_channels.csv", format_csv(
        ["N_p", "G_p", "w_e", "H_p_inf", f"Nsigma_H_p({tc:g}s)"],
        [(n, r.G_p, r.w_e, r.H_p_inf, v) for (n, (_, r)), (_, v) in zip(curves.items(), at_tc)],
        [f"schema=fig2/v{CSV_SCHEMA_VERSION}"]))
    vals = [v for _, v in at_tc]
    res.checks.append(Check(
        f"N_sigma*H_p({tc:g} s) strictly increasing in N_p",
        all(b > a for a, b in zip(vals, vals[1:])),
        ", ".join(f"{n}:{v:.4g}" for n, v in at_tc)))
    sim = pre.get("sim", {})
    if simulate_overlay and sim.get("enabled", False):
        N_sim = sim.get("N_p", max(curves))
        layout = curves[N_sim][0] if N_sim in curves else fibonacci_layout(N_sim, A, params.r_R)
        _pbs_agreement(res, f"fibonacci N_p={N_sim}", layout, params, sim, out, "fig2")
    if pre.get("svg") and out is not None:
        for kind, ylab in (("rate", "N_sigma h_p(t) [1/s]"), ("cumulative", "N_sigma H_p(t)")):
            _write(out, res, f"fig2_{kind}.svg", render_svg(res.tables[f"fig2_{kind}.csv"], {
                "title": f"Evenly spread patches, A={A}", "x_label": "t [s]", "y_label": ylab}))
    return res


def heterogeneous_layout(r_R: float = 10.0, areas=HETEROGENEOUS_AREAS,
                         angles=HETEROGENEOUS_ANGLES) -> PatchLayout:
    """Four unequal patches on the equator; ``areas`` are per-patch coverage ratios."""
    return explicit_layout([(th, ph, 2.0 * r_R * math.sqrt(A_i))
                            for A_i, (th, ph) in zip(areas, angles)], r_R)


def fig3_region_layout(N_p: int, A: float, r_R: float, theta: float = math.pi,
                       radius: float = PAPER_REGION_RADIUS, grow_to_fit: bool = True
                       ) -> tuple[PatchLayout, float]:
    """Clustered layout around ``theta``; the cap grows to the smallest feasible one if needed."""
    try:
        return region_layout(N_p, A, r_R, theta, radius), radius
    except InfeasibleLayoutError:
        if not grow_to_fit:
            raise
    R = min_region_radius(N_p, A, r_R, theta)
    return region_layout(N_p, A, r_R, theta, R), R


def run_fig3(A: float = 0.1, N_p: int = 13, *, preset: dict | None = None,
             out_dir: str | Path | None = None, simulate_overlay: bool = True) -> ExperimentResult:
    """Even, random and clustered patch placements plus the unequal four-patch case."""
    pre = _merge(PRESETS["fig3"], preset or {})
    out = Path(out_dir) if out_dir is not None else None
    params = params_from(pre)
    t = time_grid(**pre["time_grid"])
    res = ExperimentResult("fig3")
    reg = pre["region"]
    region, R = fig3_region_layout(N_p, A, params.r_R, reg["theta"], reg["radius"],
                                   reg.get("grow_to_fit", True))
    layouts = {"even": fibonacci_layout(N_p, A, params.r_R)}
    for s in pre["random_seeds"]:
        layouts[f"random_s{s}"] = random_layout(N_p, A, params.r_R, seed=s)
    layouts["region"] = region
    het = pre["heterogeneous"]
    layouts["heterogeneous"] = heterogeneous_layout(params.r_R, het["areas"],
                                                    [tuple(a) for a in het["angles"]])
    curves = {k: _analytic_quiet(t, lay, params) for k, lay in layouts.items()}
    N_s = params.N_sigma
    notes = [f"region cap radius={R:.6g} rad (requested {reg['radius']:.6g})",
             f"schema=fig3/v{CSV_SCHEMA_VERSION}"]
    _write(out, res, "fig3_rate.csv", format_csv(
        ["t", *curves], zip(t, *(N_s * r.h_p for r in curves.values())),
        ["quantity=N_sigma*h_p", *notes]))
    _write(out, res, "fig3_cumulative.csv", format_csv(
        ["t", *curves], zip(t, *(N_s * r.H_p for r in curves.values())),
        ["quantity=N_sigma*H_p", *notes]))
    tc = pre["checkpoint"]
    at = {k: _analytic_quiet([tc], lay, params) for k, lay in layouts.items()}
    _write(out, res, "fig3_channels.csv", format_csv(
        ["layout", "G_p", "w_e", "H_p_inf", f"h_p({tc:g}s)", f"H_p({tc:g}s)"],
        [(k, r.G_p, r.w_e, r.H_p_inf, r.h_p[0], r.H_p[0]) for k, r in at.items()], notes))
    even, region_H = at["even"].H_p[0], at["region"].H_p[0]
    for s in pre["random_seeds"]:
        rnd = at[f"random_s{s}"].H_p[0]
        res.checks.append(Check(
            f"H_p({tc:g} s) even > random(seed {s}) > region", even > rnd > region_H,
            f"even={even:.5g} random={rnd:.5g} region={region_H:.5g}"))
    sim = pre.get("sim", {})
    if simulate_overlay and sim.get("enabled", False):
        _pbs_agreement(res, "heterogeneous", layouts["heterogeneous"], params, sim, out, "fig3")
    if pre.get("svg") and out is not None:
        for kind, ylab in (("rate", "N_sigma h_p(t) [1/s]"), ("cumulative", "N_sigma H_p(t)")):
            _write(out, res, f"fig3_{kind}.svg", render_svg(res.tables[f"fig3_{kind}.csv"], {
                "title": f"Patch placement, A={A}, N_p={N_p}", "x_label": "t [s]",
                "y_label": ylab}))
    return res


def run_fig4(N_p_list=(1, 3, 5, 7, 9, 11), r_R_list=(5.0, 10.0), D_list=(79.4, 158.8),
             A: float = 0.05, *, preset: dict | None = None,
             out_dir: str | Path | None = None) -> ExperimentResult:
    """Effective reaction rate across patch count, receiver size and diffusivity."""
    pre = _merge(PRESETS["fig4"], preset or {})
    out = Path(out_dir) if out_dir is not None else None
    res = ExperimentResult("fig4")
    table = {}
    for r_R in r_R_list:
        for D in D_list:
            for N_p in N_p_list:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    ch = effective_channel(fibonacci_layout(N_p, A, r_R), D)
                table[(N_p, r_R, D)] = ch
    _write(out, res, "fig4_we.csv", format_csv(
        ["N_p", "r_R", "D_sigma", "G_p", "w_e"],
        [(n, r, d, ch.G_p, ch.w_e) for (n, r, d), ch in table.items()],
        [f"A={A}", f"schema=fig4/v{CSV_SCHEMA_VERSION}"]))
    combos = [(r, d) for r in r_R_list for d in D_list]
    _write(out, res, "fig4_plot.csv", format_csv(
        ["N_p", *(f"r_R={r:g} D={d:g}" for r, d in combos)],
        [(n, *(table[(n, r, d)].w_e for r, d in combos)) for n in N_p_list],
        [f"quantity=w_e A={A}", f"schema=fig4/v{CSV_SCHEMA_VERSION}"]))
    for r, d in combos:
        we = [table[(n, r, d)].w_e for n in N_p_list]
        res.checks.append(Check(f"w_e increasing in N_p (r_R={r:g}, D={d:g})",
                                all(b > a for a, b in zip(we, we[1:])),
                                ", ".join(f"{v:.4g}" for v in we)))
    r_sorted = sorted(r_R_list)
    for d in D_list:
        for n in N_p_list:
            we = [table[(n, r, d)].w_e for r in r_sorted]
            res.checks.append(Check(f"w_e larger for smaller r_R (N_p={n}, D={d:g})",
                                    all(a > b for a, b in zip(we, we[1:])),
                                    ", ".join(f"r_R={r:g}:{v:.4g}" for r, v in zip(r_sorted, we))))
    D_sorted = sorted(D_list)
    for r in r_R_list:
        for n in N_p_list:
            we = [table[(n, r, d)].w_e for d in D_sorted]
            res.checks.append(Check(f"w_e increasing in D (N_p={n}, r_R={r:g})",
                                    all(b > a for a, b in zip(we, we[1:])),
                                    ", ".join(f"D={d:g}:{v:.4g}" for d, v in zip(D_sorted, we))))
    if pre.get("svg") and out is not None:
        _write(out, res, "fig4_we.svg", render_svg(res.tables["fig4_plot.csv"], {
            "title": f"Effective reaction rate, A={A}", "x_label": "N_p",
            "y_label": "w_e [um/s]"}))
    return res


def run_preset(preset: dict, out_dir: str | Path | None = None,
               simulate_overlay: bool = True) -> ExperimentResult:
    name = preset["name"]
    if name == "fig2":
        return run_fig2(preset["N_p_list"], preset["A"], preset=preset, out_dir=out_dir,
                        simulate_overlay=simulate_overlay)
    if name == "fig3":
        return run_fig3(preset["A"], preset["N_p"], preset=preset, out_dir=out_dir,
                        simulate_overlay=simulate_overlay)
    if name == "fig4":
        return run_fig4(preset["N_p_list"], preset["r_R_list"], preset["D_list"], preset["A"],
                        preset=preset, out_dir=out_dir)
    raise ValueError(f"unknown preset {name!r}")

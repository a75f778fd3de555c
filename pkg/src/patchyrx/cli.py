"""Command-line entry point ``patchy-rx``."""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from . import experiments as ex
from .analytic import multi_patch_cir
from .capacitance import capacitance_full_sphere, diffusion_current, effective_channel
from .geometry import ChannelParams, PatchLayout
from .pbs import SimConfig, empirical_hitting_rate, hitting_rate_stderr, simulate


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="layout JSON (capacitance/analytic/simulate) "
                                               "or preset JSON (fig2/fig3/fig4)")
    p.add_argument("--out", type=Path, help="output directory; default prints CSV to stdout")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--paper-scale", action="store_true",
                   help="dt=1e-6 s and 1000 realizations instead of the desk-scale defaults")


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--D", type=float, default=79.4, help="diffusion coefficient, um^2/s")
    p.add_argument("--kd", type=float, default=0.8, help="degradation rate, 1/s")
    p.add_argument("--r0", type=float, default=20.0, help="transmitter distance, um")
    p.add_argument("--rR", type=float, default=None, help="receiver radius (defaults to the layout's)")
    p.add_argument("--Nsigma", type=int, default=1000, help="molecules per release")
    p.add_argument("--C0", type=float, default=1.0, help="far-field concentration")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="patchy-rx", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacitance", help="G_p, w_e and I_p for a layout")
    _add_common(p)
    p.add_argument("--D", type=float, default=79.4)
    p.add_argument("--C0", type=float, default=1.0)

    p = sub.add_parser("analytic", help="closed-form CIR on a time grid")
    _add_common(p)
    _add_params(p)
    p.add_argument("--t-start", type=float, default=0.01)
    p.add_argument("--t-end", type=float, default=2.0)
    p.add_argument("--t-steps", type=int, default=200)
    grid = p.add_mutually_exclusive_group()
    grid.add_argument("--log", dest="log", action="store_true", help="log-spaced time grid")
    grid.add_argument("--linear", dest="log", action="store_false", help="linear time grid (default)")

    p = sub.add_parser("simulate", help="particle-based simulation")
    _add_common(p)
    _add_params(p)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--realizations", type=int, default=None)
    p.add_argument("--bin-width", type=float, default=0.01)
    p.add_argument("--mode", choices=["patches", "full", "reflect"], default="patches")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default PATCHYRX_THREADS)")

    for name, text in (("fig2", "patch count sweep"), ("fig3", "patch placement comparison"),
                       ("fig4", "effective rate table")):
        p = sub.add_parser(name, help=text)
        _add_common(p)
        p.add_argument("--no-sim", action="store_true", help="skip the particle-simulation overlay")
    return parser


def _layout(args) -> PatchLayout:
    if args.config is None:
        raise ValueError("--config <layout.json> is required")
    return PatchLayout.load(args.config)


def _params(args, layout: PatchLayout) -> ChannelParams:
    r_R = layout.r_R if args.rR is None else args.rR
    return ChannelParams(D_sigma=args.D, k_d=args.kd, r_R=r_R, r_0=args.r0,
                         N_sigma=args.Nsigma, C_0=args.C0)


def _emit(args, fname: str, text: str) -> None:
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / fname).write_text(text, newline="\n")


def cmd_capacitance(args) -> int:
    layout = _layout(args)
    ch = effective_channel(layout, args.D)
    I_p = diffusion_current(ch.G_p, args.D, args.C0)
    I_a = diffusion_current(capacitance_full_sphere(layout.r_R), args.D, args.C0)
    _emit(args, "capacitance.csv", ex.format_csv(
        ["G_p", "w_e", "I_p"], [(ch.G_p, ch.w_e, I_p)], [f"I_a={I_a:.12g}"]))
    return 0


def cmd_analytic(args) -> int:
    layout = _layout(args)
    params = _params(args, layout)
    t = ex.time_grid(args.t_start, args.t_end, args.t_steps, args.log)
    r = multi_patch_cir(t, layout, params)
    N = params.N_sigma
    _emit(args, "analytic.csv", ex.format_csv(
        ["t", "h_p", "Nsigma_h_p", "H_p", "Nsigma_H_p"],
        zip(t, r.h_p, N * r.h_p, r.H_p, N * r.H_p),
        [f"G_p={r.G_p:.12g} w_e={r.w_e:.12g} H_p_inf={r.H_p_inf:.12g}"]))
    return 0


def cmd_simulate(args) -> int:
    layout = _layout(args) if args.mode == "patches" or args.config is not None else None
    if layout is not None:
        params = _params(args, layout)
    else:
        params = ChannelParams(D_sigma=args.D, k_d=args.kd, r_R=args.rR or 10.0, r_0=args.r0,
                               N_sigma=args.Nsigma, C_0=args.C0)
    dt = args.dt if args.dt is not None else (1e-6 if args.paper_scale else 1e-5)
    realizations = args.realizations or (1000 if args.paper_scale else 200)
    cfg = SimConfig(params, layout, dt=dt, t_end=args.t_end, realizations=realizations,
                    seed=args.seed if args.seed is not None else 0, bin_width=args.bin_width,
                    mode=args.mode)
    stats = simulate(cfg, workers=args.threads)
    t_mid, rate = empirical_hitting_rate(stats)
    _emit(args, "simulate.csv", ex.format_csv(
        ["t_mid", "empirical_rate", "empirical_cumulative", "rate_stderr"],
        zip(t_mid, rate, stats.cumulative_fraction(), hitting_rate_stderr(stats)),
        [f"degraded={stats.degraded_count} survivors={stats.survivors}",
         f"realizations={stats.realizations} N_sigma={stats.N_sigma} dt={cfg.dt} seed={cfg.seed}",
         f"schema=simulate/v{ex.CSV_SCHEMA_VERSION}"]))
    return 0


def cmd_figure(args) -> int:
    preset = ex.load_preset(args.command, args.config, seed=args.seed, paper_scale=args.paper_scale)
    out = args.out if args.out is not None else Path(".")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = ex.run_preset(preset, out, simulate_overlay=not args.no_sim)
    for c in res.checks:
        print(c.line())
    for name, path in sorted(res.files.items()):
        print(f"wrote {path}")
    return 0 if res.passed else 1


COMMANDS = {"capacitance": cmd_capacitance, "analytic": cmd_analytic, "simulate": cmd_simulate,
            "fig2": cmd_figure, "fig3": cmd_figure, "fig4": cmd_figure}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

    bragg-backflow simulate   [--config F] [--out D] [--oracle] [--set k=v ...]
    bragg-backflow design     [--alpha-min A --alpha-max B --alpha-steps N | --alphas a,b,...]
    bragg-backflow imaging    [--sigma-min S --sigma-max S --sigma-steps N | --sigmas s,...]
    bragg-backflow validate   [--quick]
    bragg-backflow oracle-run [--no-bragg]

Exit codes: 0 success, 1 validation failure, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import imaging, oracle, svg
from .config import ConfigError, bundled_config
from .design import F, classical_guard, design_report, hierarchy_check, optimal_A2
from .interference import backflow_windows, central_values, local_extrema, write_csv
from .scenario import Scenario, load_scenario
from .validate import run_checks
from .wavepacket import x_minus

log = logging.getLogger("bragg_backflow")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _f(v):
    return format(float(v), ".17g")


def _scenario(args) -> Scenario:
    path = args.config if args.config is not None else bundled_config()
    return load_scenario(path, args.set)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _float_list(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _guards(scn: Scenario):
    guards = classical_guard(scn.params, scn.regime, ratio=scn.guard_ratio, profile=scn.initial_profile)
    if scn.params.sigma_r > 0:
        guards += hierarchy_check(scn.params, scn.alpha, margin=scn.hierarchy_margin)
    return guards


# ------------------------------------------------------------------ simulate


def cmd_simulate(args):
    scn = _scenario(args)
    out = _outdir(args)
    sc = scn.scales
    um = sc.a_x * 1e6
    bragg = scn.bragg
    prof = scn.field_profile()
    write_csv(prof, out / "profile.csv", sc.x_unit, sc.t_unit)

    rel = (prof.x - prof.center) * um
    svg.line_plot(
        out / "flux.svg",
        [svg.Series(rel, prof.current / sc.t_unit, "J (1/s)")],
        title="Current after the Bragg pulse",
        xlabel="x - x_c (um)",
        ylabel="J (1/s)",
        hline=0.0,
    )
    xm, ym = local_extrema(prof.x, prof.rho, "min")
    near = np.abs(xm - prof.center) < 3.0 * bragg.wavelength
    svg.line_plot(
        out / "density.svg",
        [svg.Series(rel, prof.rho / sc.a_x, "density (1/m)"),
         svg.Series(rel, prof.rho_crit / sc.a_x, "critical density (1/m)", dashed=True)],
        title="Density and critical density",
        xlabel="x - x_c (um)",
        ylabel="density (1/m)",
        markers=[((x - prof.center) * um, y / sc.a_x, "min") for x, y in zip(xm[near], ym[near])],
    )

    windows = backflow_windows(prof)
    cv = central_values(prof, scn.wavepacket, bragg, scn.center_window)
    guards = _guards(scn)
    lines = [
        "scenario",
        f"  regime            = {scn.regime.value}",
        f"  a_x               = {sc.a_x * 1e6:.6g} um",
        f"  v1                = {sc.v1 * 1e3:.6g} mm/s",
        f"  k1 a_x            = {scn.k1:.6g}",
        f"  alpha             = {scn.alpha:.6g}",
        f"  A1, A2            = {bragg.A1:.6g}, {bragg.A2:.6g}",
        f"  population moved  = {bragg.population_transfer:.6g}",
        f"  fringe spacing    = {bragg.wavelength * um:.6g} um",
        f"  expansion time    = {scn.params.expansion_time_t:.6g} s (b = {scn.wavepacket.scaling.b:.6g})",
        f"  x_minus - x_c     = {(x_minus(scn.wavepacket) - prof.center) * um:.6g} um",
        "central values",
        f"  rho_min/rho_max   = {cv.rho_min_norm:.6g}",
        f"  rho_crit/rho_max  = {cv.rho_crit_norm:.6g}",
        f"  grad theta spread = {cv.grad_theta_spread / sc.a_x:.6g} 1/m over +-{scn.center_window:g} widths",
    ]
    if windows:
        lines.append(f"backflow windows: {len(windows)}")
        for w in windows:
            if abs(w.center - prof.center) < 5.0 * bragg.wavelength:
                lines.append(
                    f"  [{(w.start - prof.center) * um:9.3f}, {(w.end - prof.center) * um:9.3f}] um  "
                    f"min J = {w.depth / sc.t_unit:.6g} 1/s"
                )
    else:
        lines.append("no backflow windows")
    lines.append("guards")
    for g in guards:
        lines.append(f"  [{'PASS' if g.passed else 'FAIL'}] {g.name}: margin {g.margin:.4g}  {g.detail}")
        if not g.passed:
            log.warning("guard %s failed (%s)", g.name, g.detail)

    if args.oracle:
        spec = scn.protocol_spec()
        res = oracle.run_protocol(spec)
        cmp = oracle.compare_with_analytic(res, scn.wavepacket, bragg)
        lines += [
            "oracle cross-check",
            f"  grid points       = {spec.n_points}",
            f"  density L_inf     = {cmp.density_linf:.3e} of max rho",
            f"  current L_inf     = {cmp.current_linf:.3e} of max |J|",
        ]
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return EXIT_OK


# ------------------------------------------------------------------ design


def cmd_design(args):
    scn = _scenario(args)
    out = _outdir(args)
    if args.alphas:
        alphas = _float_list(args.alphas)
    else:
        alphas = list(np.geomspace(args.alpha_min, args.alpha_max, args.alpha_steps))
    if not alphas or min(alphas) <= 0:
        raise ConfigError("alpha values must be positive")
    base = classical_guard(scn.params, scn.regime, ratio=scn.guard_ratio, profile=scn.initial_profile)
    header = ["alpha", "A2_opt", "A1", "F_min", "population_transfer",
              "hierarchy_lower_margin", "hierarchy_upper_margin"] + [f"{g.name}_margin" for g in base]
    with open(out / "design_sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for a in alphas:
            A2 = optimal_A2(a)
            if scn.params.sigma_r > 0:
                h = hierarchy_check(scn.params, a, margin=scn.hierarchy_margin)
                hm = [h[0].margin, h[1].margin]
            else:
                hm = [math.nan, math.nan]
            w.writerow([_f(a), _f(A2), _f(math.sqrt(1 - A2 * A2)), _f(F(a, A2)), _f(A2 * A2)]
                       + [_f(m) for m in hm] + [_f(g.margin) for g in base])
    rep = design_report(scn.alpha)
    rep.guards.extend(_guards(scn))
    (out / "design_report.txt").write_text(rep.as_text())
    (out / "design.kv").write_text(rep.as_keyvalue())
    print(rep.as_text(), end="")
    print(f"wrote {len(alphas)} rows to {out / 'design_sweep.csv'}")
    return EXIT_OK


# ------------------------------------------------------------------ imaging


def cmd_imaging(args):
    scn = _scenario(args)
    out = _outdir(args)
    a_x = scn.scales.a_x
    if args.sigmas:
        sig = _float_list(args.sigmas)
    else:
        sig = list(np.linspace(args.sigma_min, args.sigma_max, args.sigma_steps))
    if min(sig) < 0:
        raise ConfigError("sigma values must be >= 0")
    with open(out / "detectability.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(imaging.DETECTABILITY_COLUMNS)
        for s in sig:
            w.writerow(imaging.detectability(scn.bragg, scn.alpha, s / a_x).csv_row(a_x))
    rep = imaging.detectability(scn.bragg, scn.alpha, scn.sigma_r)
    (out / "detectability.txt").write_text(rep.as_keyvalue(a_x))
    star = rep.sigma_r_critical * a_x
    print(rep.as_keyvalue(a_x), end="")
    if math.isinf(star):
        print("critical resolution: always detectable")
    elif star == 0:
        print("critical resolution: never detectable")
    else:
        print(f"critical resolution sigma_r* = {star * 1e6:.4f} um")
    return EXIT_OK


# ------------------------------------------------------------------ validate


def cmd_validate(args):
    scn = _scenario(args)
    checks = run_checks(scn, quick=args.quick)
    failed = 0
    for c in checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name} ({c.seconds:.2f} s): {c.detail}")
        failed += not c.passed
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


# ------------------------------------------------------------------ oracle-run


def cmd_oracle_run(args):
    scn = _scenario(args)
    out = _outdir(args)
    spec = scn.protocol_spec(with_bragg=not args.no_bragg)
    res = oracle.run_protocol(spec)
    stages = [("ground", res.ground), ("released", res.released), ("expanded", res.expanded)]
    if res.kicked is not None:
        stages.append(("kicked", res.kicked))
    for name, st in stages:
        oracle.write_snapshot(st, out / f"snapshot_{name}.csv")
    final = stages[-1][1]
    oracle.save_checkpoint(final, out / "final.ckpt")
    lines = [
        f"grid: {spec.n_points} points on [{final.grid.x_min:.6g}, {final.grid.x_max:.6g}] a_x, dt = {spec.dt:g}",
        f"release centre (a_x) = {spec.release_center:.6g}",
        f"norm drift           = {abs(res.expanded.norm - res.ground.norm):.3e}",
    ]
    if res.kicked is not None:
        cmp = oracle.compare_with_analytic(res, scn.wavepacket, scn.bragg)
        lines += [
            f"density L_inf        = {cmp.density_linf:.3e}",
            f"current L_inf        = {cmp.current_linf:.3e}",
            f"continuity residual  = {oracle.continuity_residual(res.kicked):.3e}",
        ]
    J = oracle.measure_current(res.expanded)
    body = res.expanded.density > 0.05 * res.expanded.density.max()
    lines.append(f"pre-Bragg negative flux in packet body: {bool(np.any(J[body] < 0))}")
    (out / "oracle_report.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return EXIT_OK


# ------------------------------------------------------------------ main


def build_parser():
    p = argparse.ArgumentParser(prog="bragg-backflow", description=__doc__.split("\n")[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="scenario file (default: bundled li7.cfg)")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config value (repeatable)")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="analytic profile, plots and report")
    s.add_argument("--oracle", action="store_true", help="also run the split-step protocol and compare")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("design", parents=[common], help="optimal Bragg amplitude and guards versus alpha")
    s.add_argument("--alpha-min", type=float, default=0.01)
    s.add_argument("--alpha-max", type=float, default=100.0)
    s.add_argument("--alpha-steps", type=int, default=41)
    s.add_argument("--alphas", default=None, help="comma separated alpha values")
    s.set_defaults(func=cmd_design)

    s = sub.add_parser("imaging", parents=[common], help="detectability versus imaging resolution")
    s.add_argument("--sigma-min", type=float, default=0.0, help="metres")
    s.add_argument("--sigma-max", type=float, default=20e-6, help="metres")
    s.add_argument("--sigma-steps", type=int, default=41)
    s.add_argument("--sigmas", default=None, help="comma separated resolutions in metres")
    s.set_defaults(func=cmd_imaging)

    s = sub.add_parser("validate", parents=[common], help="analytic-versus-oracle checks")
    s.add_argument("--quick", action="store_true", help="1024-point oracle grid")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("oracle-run", parents=[common], help="split-step protocol with snapshots")
    s.add_argument("--no-bragg", action="store_true", help="stop before the Bragg pulse")
    s.set_defaults(func=cmd_oracle_run)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

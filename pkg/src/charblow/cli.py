"""Command-line interface: simulate / trace / threshold / verify / duct.

Exit codes: 0 success, 1 check or assertion failure, 2 configuration error,
3 runtime (domain-exit / numerical) error. Outputs are plain CSV/JSON written
with 17 significant digits so identical configs reproduce byte-identical
files. CHARBLOW_THREADS caps the worker count for refinement studies.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import coords, duct as duct_mod, gradients as gr, riccati as rc, solver as sv
from .config import RunConfig, parse_config, render_config
from .errors import CharblowError, ConfigError, DomainExitError, NumericalError
from .pressure import Domain, make_gamma_law, make_isentropic_law, make_mhd_law
from .profiles import make_profile

FMT = ".17g"


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), FMT)
    return str(v)


def _profile_from(cfg_section_prefix, cfg):
    kind = getattr(cfg, "profile")
    if kind == "constant":
        return make_profile("constant", level=cfg.profile_level)
    if kind == "linear":
        return make_profile("linear", base=cfg.profile_base, slope=cfg.profile_slope)
    if kind == "sinusoidal":
        return make_profile("sinusoidal", base=cfg.profile_base, amp=cfg.profile_amp,
                            wavenumber=cfg.profile_wavenumber, phase=cfg.profile_phase)
    return make_profile("tanh", base=cfg.profile_base, amp=cfg.profile_amp,
                        center=cfg.profile_center, width=cfg.profile_width)


def law_from_config(cfg: RunConfig):
    m = cfg.model
    dom = Domain(v_min=m.v_min, v_max=m.v_max,
                 x_min=cfg.grid.x_lo - m.x_margin, x_max=cfg.grid.x_hi + m.x_margin)
    if m.type in ("isentropic", "psystem"):
        return make_isentropic_law(gamma=m.gamma, K=m.K, domain=dom)
    if m.type == "gamma":
        return make_gamma_law(gamma=m.gamma, K=m.K, entropy=_profile_from("model", m),
                              c_v=m.c_v, domain=dom)
    return make_mhd_law(_profile_from("model", m), domain=dom)


def chart_from_config(cfg: RunConfig):
    law = law_from_config(cfg)
    return coords.chart_for(law, h0=cfg.riccati.h0, cache_nodes=cfg.coords.cache_nodes)


def state_from_config(cfg: RunConfig, chart, n=None):
    g = cfg.grid
    n = n or g.n
    probe = sv.GridState(x_lo=g.x_lo, x_hi=g.x_hi, n=n, boundary=g.boundary,
                         h=np.ones(n), u=np.zeros(n))
    i = cfg.initial
    h, u = sv.initial_data(chart, probe.x, i.preset, p_star=i.p_star,
                           amplitude=i.amplitude, target_y0_min=i.target_y0_min,
                           periodic=probe.periodic, center=i.center, width=i.width,
                           wavenumber=i.wavenumber)
    return sv.make_grid_state(g.x_lo, g.x_hi, n, g.boundary, h, u)


def area_from_config(cfg: RunConfig):
    d = cfg.duct
    if d.area == "constant":
        return make_profile("constant", level=d.area_base)
    if d.area == "linear":
        return make_profile("linear", base=d.area_base, slope=d.area_slope)
    return make_profile("tanh", base=d.area_base, amp=d.area_amp,
                        center=d.area_center, width=d.area_width)


# ---------------------------------------------------------------------------
# output emission
# ---------------------------------------------------------------------------

def emit_outputs(result: sv.RunResult, cfg: RunConfig, outdir) -> list:
    """Write snapshots.csv, per-trace CSVs, blowup_report.json and config_echo.cfg."""
    out = Path(outdir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise CharblowError(f"cannot create output directory {out}: {e}") from e
    written = []
    chart = result.chart
    x = result.x
    periodic = result.boundary == "periodic"

    snap = out / "snapshots.csv"
    with snap.open("w") as f:
        f.write("t,x,v,u,h,p,c,alpha,beta,y,q,fwdRC,bwdRC\n")
        for k, t in enumerate(result.times):
            h = result.H[k]
            u = result.U[k]
            gf = gr.gradient_field(chart, x, h, u, t=t, periodic=periodic)
            v = chart.v_of_h(h, x)
            p = chart.p(h, x)
            for i in range(x.size):
                f.write(",".join([
                    _fmt(t), _fmt(x[i]), _fmt(v[i]), _fmt(u[i]), _fmt(h[i]), _fmt(p[i]),
                    _fmt(gf.c[i]), _fmt(gf.alpha[i]), _fmt(gf.beta[i]), _fmt(gf.y[i]),
                    _fmt(gf.q[i]), str(gf.fwd[i]), str(gf.bwd[i]),
                ]) + "\n")
    written.append(snap)

    for j, tr in enumerate(result.traces):
        path = out / f"trace_{j:02d}.csv"
        with path.open("w") as f:
            f.write("t,x,c,yq,a0,a1,a2,residual\n")
            res = tr.residual if tr.residual is not None else np.full(tr.t.size, np.nan)
            for i in range(tr.t.size):
                f.write(",".join(_fmt(val) for val in (
                    tr.t[i], tr.x[i], tr.c[i], tr.yq[i], tr.a0[i], tr.a1[i], tr.a2[i],
                    res[i])) + "\n")
        written.append(path)

    rep = out / "blowup_report.json"
    with rep.open("w") as f:
        json.dump(result.report.as_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    written.append(rep)

    echo = out / "config_echo.cfg"
    echo.write_text(render_config(cfg))
    written.append(echo)
    return written


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _max_workers():
    cap = os.environ.get("CHARBLOW_THREADS")
    if cap:
        try:
            return max(1, int(cap))
        except ValueError:
            pass
    return os.cpu_count() or 1


def cmd_simulate(cfg: RunConfig, outdir, quiet=False, refine=0):
    chart = chart_from_config(cfg)

    def one_run(n):
        state = state_from_config(cfg, chart, n=n)
        kbox = None
        if cfg.kbox.h_lo is not None:
            kbox = (cfg.kbox.h_lo, cfg.kbox.h_hi)
        return sv.run(chart, state, cfg.time.t_max, cfl=cfg.time.cfl,
                      blowup_cut=cfg.blowup.cut, history_stride=cfg.run.history_stride,
                      trace_seeds=cfg.run.trace_x0, trace_family=cfg.run.trace_family,
                      nu=cfg.riccati.nu, kbox=kbox)

    ns = [cfg.grid.n * (2**k) for k in range(refine + 1)]
    if len(ns) > 1:
        with ThreadPoolExecutor(max_workers=min(_max_workers(), len(ns))) as pool:
            results = list(pool.map(one_run, ns))
    else:
        results = [one_run(ns[0])]
    result = results[0]

    if cfg.blowup.confirm_refine or refine > 0:
        base = result.report.T_obs
        if len(results) > 1 and base is not None and results[1].report.T_obs is not None:
            shift = abs(results[1].report.T_obs - base) / base
            result.report.refinement_confirmed = bool(shift < 0.05)
        elif cfg.blowup.confirm_refine and base is not None:
            fine = one_run(cfg.grid.n * 2)
            if fine.report.T_obs is not None:
                shift = abs(fine.report.T_obs - base) / base
                result.report.refinement_confirmed = bool(shift < 0.05)

    written = emit_outputs(result, cfg, outdir)
    if not quiet:
        for n, res in zip(ns, results):
            print(f"n={n}: steps to t={res.final.t:{FMT}}, "
                  f"T_obs={res.report.T_obs}, y0_min={res.report.y0_min:{FMT}}")
        for p in written:
            print(f"wrote {p}")
    return 0


def cmd_trace(cfg: RunConfig, outdir, quiet=False):
    chart = chart_from_config(cfg)
    state = state_from_config(cfg, chart)
    result = sv.run(chart, state, cfg.time.t_max, cfl=cfg.time.cfl,
                    blowup_cut=cfg.blowup.cut, history_stride=cfg.run.history_stride,
                    nu=cfg.riccati.nu, trace_critical=False)
    seeds = cfg.run.trace_x0 or (0.5 * (cfg.grid.x_lo + cfg.grid.x_hi),)
    result.traces = [
        sv.trace_characteristic(result, x0, family=cfg.run.trace_family) for x0 in seeds
    ]
    written = emit_outputs(result, cfg, outdir)
    if not quiet:
        for tr in result.traces:
            rmax = float(np.max(np.abs(tr.residual))) if tr.residual is not None else float("nan")
            print(f"trace x0={tr.x0:{FMT}} ({tr.family}): {tr.t.size} samples, "
                  f"max |residual| = {rmax:{FMT}}")
        for p in written:
            print(f"wrote {p}")
    return 0


def cmd_threshold(cfg: RunConfig, outdir, quiet=False):
    chart = chart_from_config(cfg)
    if cfg.kbox.h_lo is not None:
        kbox = (cfg.kbox.h_lo, cfg.kbox.h_hi)
    else:
        # default compact range: stationary profile values, inflated 20%
        x = np.linspace(cfg.grid.x_lo, cfg.grid.x_hi, 513)
        h_star = sv.stationary_profile(chart, cfg.initial.p_star, x)
        lo, hi = float(np.min(h_star)), float(np.max(h_star))
        pad = 0.2 * (hi - lo) + 0.05 * hi
        kbox = (lo - pad, hi + pad)
    bounds = rc.coefficient_bounds(chart, kbox, (cfg.grid.x_lo, cfg.grid.x_hi))
    N = rc.threshold(bounds, cfg.riccati.nu)
    payload = {"N": N, "nu": cfg.riccati.nu, **bounds.as_dict(),
               "h_lo": kbox[0], "h_hi": kbox[1], "h0": chart.h0}
    text = json.dumps(payload, indent=2, sort_keys=True)
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "threshold.json").write_text(text + "\n")
    if not quiet:
        print(text)
    return 0


def _verify_checks(cfg: RunConfig):
    """The identity suite; yields (name, max_error, tolerance)."""
    rng = np.random.default_rng(cfg.run.seed)
    chart = chart_from_config(cfg)
    law = chart.law
    n_pts = 1000
    x = rng.uniform(cfg.grid.x_lo, cfg.grid.x_hi, n_pts)
    v = rng.uniform(0.5, 2.0, n_pts)
    h = chart.h_of_v(v, x)
    rec = law.evaluate(v, x, check=False)

    # chart coupling identity: c (p_mu/c)_h = c_mu - c_h p_mu / c
    lhs = chart.c(h, x) * chart.dpc_dh(h, x)
    hx = chart.dh_dx(v, x)
    c_mu = (rec.c_v / rec.c) * hx + rec.c_x
    rhs = c_mu - chart.c_h(h, x) * chart.p_mu(h, x) / chart.c(h, x)
    yield "chart_coupling_identity", float(np.max(np.abs(lhs - rhs))), 1e-8

    # same quantity from the (v, x) record only
    rhs_vx = 0.5 * rec.c * (rec.p_xv * rec.p_v - rec.p_x * rec.p_vv) / rec.p_v**2
    yield "volume_chart_identity", float(np.max(np.abs(lhs - rhs_vx))), 1e-8

    # smooth-media R/C consistency under p_x = 0
    _, _, diff = gr.rc_consistency_check(law, v, x)
    yield "rc_consistency", float(np.max(diff)), 1e-8

    # isentropic degeneration on the matching homogeneous law
    iso = make_isentropic_law(gamma=2.0, K=cfg.model.K)
    iso_chart = coords.chart_for(iso)
    hh = np.linspace(1.0, 4.0, 400)
    co = rc.coefficients(iso_chart, hh, np.zeros_like(hh))
    degen = max(float(np.max(np.abs(co.a0))), float(np.max(np.abs(co.a1))),
                float(np.max(np.abs(iso_chart.I(hh, 0.0)))))
    yield "homogeneous_degeneration", degen, 1e-12

    # closed forms vs the generic quadrature cache (when a closed chart exists)
    generic = coords.chart_for(law, h0=chart.h0, cache_nodes=257,
                               mu_range=(cfg.grid.x_lo - 0.5, cfg.grid.x_hi + 0.5),
                               force_generic=True)
    hs = rng.uniform(generic.h_lo + 0.25 * (generic.h_hi - generic.h_lo),
                     generic.h_hi - 0.05 * (generic.h_hi - generic.h_lo), 200)
    mus = rng.uniform(cfg.grid.x_lo, cfg.grid.x_hi, 200)
    co_g = rc.coefficients(generic, hs, mus)
    co_c = rc.coefficients(chart, hs, mus)
    scale = max(1e-30, float(np.max(np.abs(co_c.a0))), float(np.max(np.abs(co_c.a1))))
    err = max(
        float(np.max(np.abs(co_g.a0 - co_c.a0))),
        float(np.max(np.abs(co_g.a1 - co_c.a1))),
        float(np.max(np.abs(co_g.a2 - co_c.a2))),
        float(np.max(np.abs(generic.I(hs, mus) - chart.I(hs, mus)))),
    )
    yield "generic_vs_closed_chart", err / max(scale, 1.0), 1e-7

    # duct metric identities on a short linear-nozzle run
    params = duct_mod.DuctParams(gamma=cfg.duct.gamma, K=cfg.duct.K, c_v=cfg.duct.c_v)
    area = make_profile("linear", base=1.0, slope=0.05)
    xs = np.linspace(-6.0, 6.0, 200)
    st = duct_mod.duct_stationary_state(params, area, xs, p_star=1.0)
    st.u = 0.02 * np.exp(-(st.x**2) / (2.0 * 0.5**2))
    res = duct_mod.run_duct(params, area, st, t_max=0.3, cfl=0.5)
    mres = duct_mod.metric_identities_residual(res)
    yield "duct_metric_identities", max(mres.values()), 1e-4


def cmd_verify(cfg: RunConfig, outdir, quiet=False):
    report = {}
    passed = True
    try:
        for name, err, tol in _verify_checks(cfg):
            ok = err <= tol
            passed = passed and ok
            report[name] = {"max_error": err, "tolerance": tol, "pass": bool(ok)}
            if not quiet:
                print(f"{'PASS' if ok else 'FAIL'} {name}: max error {err:.3e} (tol {tol:.1e})")
    except CharblowError as e:
        report["exception"] = {"error": str(e), "pass": False}
        passed = False
        if not quiet:
            print(f"FAIL {type(e).__name__}: {e}")
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "verify_report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0 if passed else 1


def cmd_duct(cfg: RunConfig, outdir, quiet=False):
    params = duct_mod.DuctParams(gamma=cfg.duct.gamma, K=cfg.duct.K, c_v=cfg.duct.c_v)
    area = area_from_config(cfg)
    n = cfg.grid.n
    xs = np.linspace(cfg.grid.x_lo, cfg.grid.x_hi, n)
    st = duct_mod.duct_stationary_state(params, area, xs, p_star=cfg.initial.p_star,
                                        xt0=cfg.duct.xt0)
    st.u = cfg.initial.amplitude * np.exp(
        -((st.x - cfg.initial.center) ** 2) / (2.0 * cfg.initial.width**2))
    result = duct_mod.run_duct(params, area, st, cfg.time.t_max, cfl=cfg.time.cfl,
                               history_stride=cfg.run.history_stride)
    mres = duct_mod.metric_identities_residual(result)
    trace = duct_mod.trace_duct(result, 0.5 * (cfg.grid.x_lo + cfg.grid.x_hi))
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {"metric_residuals": mres,
               "alpha_residual_max": float(np.max(np.abs(trace.residual)))
               if trace.residual is not None else None,
               "t_final": float(result.final.t)}
    (out / "duct_report.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    with (out / "duct_trace.csv").open("w") as f:
        f.write("t,x,c,alpha,rhs,residual\n")
        res = trace.residual if trace.residual is not None else np.full(trace.t.size, np.nan)
        for i in range(trace.t.size):
            f.write(",".join(_fmt(v) for v in (
                trace.t[i], trace.x[i], trace.c[i], trace.value[i], trace.rhs[i], res[i]))
                + "\n")
    (out / "config_echo.cfg").write_text(render_config(cfg))
    if not quiet:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="charblow",
                                 description="gradient dynamics and blowup for 1-D nonlinear waves")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("simulate", "trace", "threshold", "verify", "duct"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to config file")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--quiet", action="store_true")
        if name == "simulate":
            p.add_argument("--refine", type=int, default=0, metavar="K",
                           help="also run at 2^1..2^K times the base resolution")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(Path(args.config).read_text())
    except ConfigError as e:
        for issue in e.issues:
            print(f"config error: {issue}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    outdir = args.out or cfg.output.dir
    try:
        if args.command == "simulate":
            return cmd_simulate(cfg, outdir, quiet=args.quiet, refine=args.refine)
        if args.command == "trace":
            return cmd_trace(cfg, outdir, quiet=args.quiet)
        if args.command == "threshold":
            return cmd_threshold(cfg, outdir, quiet=args.quiet)
        if args.command == "verify":
            return cmd_verify(cfg, outdir, quiet=args.quiet)
        return cmd_duct(cfg, outdir, quiet=args.quiet)
    except (DomainExitError, NumericalError) as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return 3
    except CharblowError as e:
        print(f"check failure: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

"""Finite-difference solver for h_t + c u_x = 0, u_t + c h_x + p_mu = 0.

The scheme advances the equivalent (p, u) form

    p_t + c^2(p, x) u_x = 0,      u_t + p_x = 0,

with a two-stage Richtmyer (Lax-Wendroff type) predictor-corrector. Writing
the u-equation with the total pressure derivative makes stationary states
(p constant, u = 0) exact fixed points of the discrete update, so entropy
variation does not generate spurious velocity drift.

Also provides characteristic tracing with y/q and coefficient sampling, and
gradient-blowup detection with a resolution-confirmation convention.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from . import gradients as gr
from . import riccati as rc
from .errors import DomainExitError, GridError, ModelError, NumericalError
from .numerics import deriv_nonuniform, gradient_4th, interp_cubic

__all__ = [
    "GridState",
    "make_grid_state",
    "step",
    "run",
    "RunResult",
    "BlowupReport",
    "CharacteristicTrace",
    "trace_characteristic",
    "detect_blowup",
    "rc_transition_audit",
    "stationary_profile",
    "initial_data",
]


@dataclass
class GridState:
    """Uniform-grid snapshot of (h, u) at one time level."""

    x_lo: float
    x_hi: float
    n: int
    boundary: str  # "periodic" | "outflow"
    h: np.ndarray
    u: np.ndarray
    t: float = 0.0
    x: np.ndarray = None  # filled in __post_init__; shared across steps

    def __post_init__(self):
        if self.n < 16:
            raise GridError(f"need at least 16 nodes, got {self.n}")
        if not self.x_hi > self.x_lo:
            raise GridError("x_hi must exceed x_lo")
        if self.boundary not in ("periodic", "outflow"):
            raise ModelError(f"unknown boundary mode {self.boundary!r}")
        if self.x is None:
            self.x = self.x_lo + self.dx * np.arange(self.n)

    @property
    def periodic(self) -> bool:
        return self.boundary == "periodic"

    @property
    def dx(self) -> float:
        if self.periodic:
            return (self.x_hi - self.x_lo) / self.n
        return (self.x_hi - self.x_lo) / (self.n - 1)


def make_grid_state(x_lo, x_hi, n, boundary, h, u, t=0.0) -> GridState:
    h = np.array(h, dtype=float)
    u = np.array(u, dtype=float)
    if h.shape != (n,) or u.shape != (n,):
        raise GridError("h and u must be length-n arrays")
    return GridState(x_lo=float(x_lo), x_hi=float(x_hi), n=int(n),
                     boundary=boundary, h=h, u=u, t=float(t))


def _check_state(chart, state: GridState, h, u, t):
    if not (np.all(np.isfinite(h)) and np.all(np.isfinite(u))):
        bad = int(np.argmax(~(np.isfinite(h) & np.isfinite(u))))
        raise NumericalError(f"non-finite state at node {bad}, t={t:.6g}")
    v = chart.v_of_h(h, state.x)
    dom = chart.law.domain
    outside = (v < dom.v_min) | (v > dom.v_max) | (h <= 0.0)
    if np.any(outside):
        bad = int(np.argmax(outside))
        raise DomainExitError(
            f"solution left the validity domain at node {bad} (v={v[bad]:.6g}), t={t:.6g}",
            node=bad, t=t,
        )


_IF_CACHE: list = []


def _interface_x(x, dx, periodic):
    """Midpoint coordinates, cached per grid array so chart memos stay warm."""
    for key, per, arr in _IF_CACHE:
        if key is x and per == periodic:
            return arr
    if periodic:
        arr = x + 0.5 * dx
    else:
        arr = np.concatenate([x[:1] - 0.5 * dx, x + 0.5 * dx])
    _IF_CACHE.append((x, periodic, arr))
    if len(_IF_CACHE) > 16:
        _IF_CACHE.pop(0)
    return arr


def step(chart, state: GridState, cfl: float, dt_cap: Optional[float] = None):
    """One predictor-corrector step; returns (new_state, dt)."""
    if not (0.0 < cfl <= 0.9):
        raise ModelError(f"cfl must lie in (0, 0.9], got {cfl:g}")
    x = state.x
    dx = state.dx
    h, u = state.h, state.u
    p = chart.p(h, x)
    c = chart.c(h, x)
    dt = cfl * dx / float(np.max(c))
    if dt_cap is not None:
        dt = min(dt, dt_cap)
    lam = dt / dx

    # non-finite intermediates are caught below; silence their propagation
    with np.errstate(invalid="ignore", over="ignore"):
        if state.periodic:
            p_r = np.roll(p, -1)
            u_r = np.roll(u, -1)
            h_r = np.roll(h, -1)
            x_if = _interface_x(x, dx, True)
            pbar = 0.5 * (p + p_r)
            h_if = chart.h_of_p(pbar, x_if, guess=0.5 * (h + h_r))
            c_if = chart.c(h_if, x_if)
            p_half = pbar - 0.5 * lam * c_if**2 * (u_r - u)
            u_half = 0.5 * (u + u_r) - 0.5 * lam * (p_r - p)
            p_half_m = np.roll(p_half, 1)
            u_half_m = np.roll(u_half, 1)
            p_ctr = 0.5 * (p_half + p_half_m)
            h_ctr = chart.h_of_p(p_ctr, x, guess=h)
            c_ctr = chart.c(h_ctr, x)
            p_new = p - lam * c_ctr**2 * (u_half - u_half_m)
            u_new = u - lam * (p_half - p_half_m)
        else:
            p_e = np.concatenate([p[:1], p, p[-1:]])
            u_e = np.concatenate([u[:1], u, u[-1:]])
            h_e = np.concatenate([h[:1], h, h[-1:]])
            x_if = _interface_x(x, dx, False)
            pbar = 0.5 * (p_e[:-1] + p_e[1:])
            h_if = chart.h_of_p(pbar, x_if, guess=0.5 * (h_e[:-1] + h_e[1:]))
            c_if = chart.c(h_if, x_if)
            p_half = pbar - 0.5 * lam * c_if**2 * (u_e[1:] - u_e[:-1])
            u_half = 0.5 * (u_e[:-1] + u_e[1:]) - 0.5 * lam * (p_e[1:] - p_e[:-1])
            p_ctr = 0.5 * (p_half[1:] + p_half[:-1])
            h_ctr = chart.h_of_p(p_ctr, x, guess=h)
            c_ctr = chart.c(h_ctr, x)
            p_new = p - lam * c_ctr**2 * (u_half[1:] - u_half[:-1])
            u_new = u - lam * (p_half[1:] - p_half[:-1])

    if np.any(~np.isfinite(p_new)) or np.any(p_new <= 0.0):
        bad = int(np.argmax(~np.isfinite(p_new) | (p_new <= 0.0)))
        raise NumericalError(f"pressure update failed at node {bad}, t={state.t + dt:.6g}")
    h_new = chart.h_of_p(p_new, x, guess=h)
    t_new = state.t + dt
    new = replace(state, h=h_new, u=u_new, t=t_new)
    _check_state(chart, new, h_new, u_new, t_new)
    return new, dt


@dataclass
class BlowupReport:
    """Threshold, predicted lifespan and observed blowup summary of one run."""

    N: float
    nu: float
    y0_min: float
    q0_min: float
    T_pred: Optional[float]
    T_obs: Optional[float]
    refinement_confirmed: Optional[bool]
    sup_a2: Optional[float] = None  # along the critical characteristic
    inf_a2: Optional[float] = None
    h0: float = 0.0
    bounds: Optional[dict] = None

    def as_dict(self):
        return {
            "N": self.N, "nu": self.nu, "y0_min": self.y0_min, "q0_min": self.q0_min,
            "T_pred": self.T_pred, "T_obs": self.T_obs,
            "refinement_confirmed": self.refinement_confirmed,
            "sup_a2": self.sup_a2, "inf_a2": self.inf_a2, "h0": self.h0,
        }


@dataclass
class CharacteristicTrace:
    """Samples along one characteristic: position, wavespeed, y or q, coefficients."""

    family: str  # "forward" | "backward"
    x0: float
    t: np.ndarray
    x: np.ndarray
    c: np.ndarray
    yq: np.ndarray
    a0: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    residual: Optional[np.ndarray]
    interp_order: int = 3
    truncated: Optional[str] = None
    ab: Optional[np.ndarray] = None          # alpha (forward) or beta (backward)
    ab_rhs: Optional[np.ndarray] = None
    ab_residual: Optional[np.ndarray] = None

    def path_consistency(self) -> float:
        """max |dx/dt -+ c| over the samples (O(dt^2) for a consistent path).

        Positions are stored unwrapped, so the derivative is well defined on
        periodic domains too.
        """
        if self.t.size < 5:
            return float("nan")
        sgn = 1.0 if self.family == "forward" else -1.0
        dxdt = deriv_nonuniform(self.t, self.x)
        return float(np.max(np.abs(dxdt - sgn * self.c)))


@dataclass
class RunResult:
    chart: object
    x: np.ndarray
    boundary: str
    times: np.ndarray          # stored history levels
    H: np.ndarray              # (levels, n)
    U: np.ndarray
    monitor_t: np.ndarray
    monitor_ux: np.ndarray
    monitor_vx: np.ndarray
    traces: list
    report: BlowupReport
    final: GridState
    h_min: float
    h_max: float

    @property
    def monitor_gmax(self):
        return np.maximum(self.monitor_ux, self.monitor_vx)


def detect_blowup(times, gmax, cut):
    """First time max(|u_x|, |v_x|) exceeds the cut, or None."""
    times = np.asarray(times, dtype=float)
    gmax = np.asarray(gmax, dtype=float)
    idx = np.nonzero(gmax > cut)[0]
    if idx.size == 0:
        return None
    return float(times[idx[0]])


class _LiveTrace:
    """Characteristic advanced alongside the solver (one Heun substep per dt).

    Sampling interpolates the nodal h and gradient fields at the foot and
    evaluates the chart pointwise, so per-step cost is independent of n.
    """

    def __init__(self, chart, x0, family, periodic, x_lo, x_hi):
        self.chart = chart
        self.family = family
        self.sign = 1.0 if family == "forward" else -1.0
        self.x0 = float(x0)
        self.pos = float(x0)
        self.periodic = periodic
        self.x_lo, self.x_hi = x_lo, x_hi
        self.alive = True
        self.t, self.x, self.c, self.yq = [], [], [], []
        self.a0, self.a1, self.a2 = [], [], []

    def sample(self, t, light):
        if not self.alive:
            return
        xq = np.array([self.pos])
        interp = lambda f: float(interp_cubic(light["x_lo"], light["dx"], f, xq,
                                              self.periodic)[0])
        h_s = interp(light["h"])
        u_x = interp(light["u_x"])
        h_x = interp(light["h_x"])
        mu = self.pos
        if self.periodic:
            span = self.x_hi - self.x_lo
            mu = self.x_lo + (self.pos - self.x_lo) % span
        ch = self.chart
        c = float(ch.c(h_s, mu))
        p_mu = float(ch.p_mu(h_s, mu))
        I = float(ch.I(h_s, mu))
        alpha, beta = gr.alpha_beta(u_x, h_x, p_mu, c)
        y, q = gr.y_q(alpha, beta, c, I)
        co = rc.coefficients(ch, h_s, mu)
        self.t.append(t)
        self.x.append(self.pos)
        self.c.append(c)
        self.yq.append(float(y if self.family == "forward" else q))
        self.a0.append(float(co.a0))
        self.a1.append(float(co.a1))
        self.a2.append(float(co.a2))

    def advance(self, dt, light_old, light_new):
        if not self.alive:
            return
        xq = np.array([self.pos])
        c0 = float(interp_cubic(light_old["x_lo"], light_old["dx"], light_old["c"], xq,
                                self.periodic)[0])
        x_star = self.pos + self.sign * dt * c0
        c1 = float(interp_cubic(light_new["x_lo"], light_new["dx"], light_new["c"],
                                np.array([x_star]), self.periodic)[0])
        new_pos = self.pos + self.sign * 0.5 * dt * (c0 + c1)
        if not self.periodic and not (self.x_lo <= new_pos <= self.x_hi):
            self.alive = False
            return
        self.pos = new_pos

    def finish(self) -> CharacteristicTrace:
        t = np.asarray(self.t)
        yq = np.asarray(self.yq)
        a0 = np.asarray(self.a0)
        a1 = np.asarray(self.a1)
        a2 = np.asarray(self.a2)
        residual = None
        if t.size >= 5:
            sgn = 1.0 if self.family == "forward" else -1.0
            residual = deriv_nonuniform(t, yq) - (a0 + sgn * a1 * yq - a2 * yq**2)
        return CharacteristicTrace(
            family=self.family, x0=self.x0, t=t, x=np.asarray(self.x),
            c=np.asarray(self.c), yq=yq, a0=a0, a1=a1, a2=a2, residual=residual,
            truncated=None if self.alive else "path left the domain",
        )


def _trace_fields(chart, state_x, x_lo, dx, h, u, periodic, with_ab=False):
    """Nodal fields a live trace samples from."""
    c = chart.c(h, state_x)
    u_x = gradient_4th(u, dx, periodic)
    h_x = gradient_4th(h, dx, periodic)
    p_mu = chart.p_mu(h, state_x)
    I = chart.I(h, state_x)
    alpha, beta = gr.alpha_beta(u_x, h_x, p_mu, c)
    y, q = gr.y_q(alpha, beta, c, I)
    co = rc.coefficients(chart, h, state_x)
    fields = {"x_lo": x_lo, "dx": dx, "c": c, "y": y, "q": q,
              "a0": co.a0, "a1": co.a1, "a2": co.a2}
    if with_ab:
        rhs_a, rhs_b = gr.alpha_beta_rhs(chart, h, state_x, alpha, beta)
        fields.update({"alpha": alpha, "beta": beta, "rhs_a": rhs_a, "rhs_b": rhs_b})
    return fields


def run(chart, state: GridState, t_max, cfl=0.5, blowup_cut=1e4, history_stride=1,
        trace_seeds=(), trace_family="forward", nu=0.01, kbox=None,
        trace_critical=True, max_steps=5_000_000) -> RunResult:
    """Integrate to t_max or gradient blowup, collecting diagnostics.

    ``kbox`` optionally fixes the (h_lo, h_hi) range used for the threshold
    bounds; by default the observed solution range (inflated 2%) is used.
    """
    x = state.x
    dx = state.dx
    periodic = state.periodic

    g0 = gr.gradient_field(chart, x, state.h, state.u, t=state.t, periodic=periodic)
    y0_min = float(np.min(g0.y))
    q0_min = float(np.min(g0.q))

    seeds = [_LiveTrace(chart, s, trace_family, periodic, state.x_lo, state.x_hi)
             for s in trace_seeds]
    critical = None
    if trace_critical and y0_min < 0.0:
        x_crit = float(x[int(np.argmin(g0.y))])
        critical = _LiveTrace(chart, x_crit, "forward", periodic, state.x_lo, state.x_hi)
        seeds.append(critical)

    times = [state.t]
    H = [state.h.copy()]
    U = [state.u.copy()]
    mon_t = [state.t]
    mon_ux = [float(np.max(np.abs(g0.u_x)))]
    mon_vx = [float(np.max(np.abs(g0.v_x)))]
    h_min = float(np.min(state.h))
    h_max = float(np.max(state.h))

    def light_fields(st, u_x=None):
        if u_x is None:
            u_x = gradient_4th(st.u, dx, periodic)
        return {"x_lo": st.x_lo, "dx": dx, "c": chart.c(st.h, x), "h": st.h,
                "u_x": u_x, "h_x": gradient_4th(st.h, dx, periodic)}

    light = light_fields(state, u_x=g0.u_x)
    for tr in seeds:
        tr.sample(state.t, light)

    T_obs = None
    n_steps = 0
    while state.t < t_max - 1e-14 and n_steps < max_steps:
        dt_cap = t_max - state.t
        state_new, dt = step(chart, state, cfl, dt_cap=dt_cap)
        n_steps += 1

        u_x = gradient_4th(state_new.u, dx, periodic)
        v = chart.v_of_h(state_new.h, x)
        v_x = gradient_4th(v, dx, periodic)
        mon_t.append(state_new.t)
        mon_ux.append(float(np.max(np.abs(u_x))))
        mon_vx.append(float(np.max(np.abs(v_x))))
        h_min = min(h_min, float(np.min(state_new.h)))
        h_max = max(h_max, float(np.max(state_new.h)))

        if seeds:
            light_new = light_fields(state_new, u_x=u_x)
            for tr in seeds:
                tr.advance(dt, light, light_new)
                tr.sample(state_new.t, light_new)
            light = light_new

        if n_steps % history_stride == 0 or state_new.t >= t_max - 1e-14:
            times.append(state_new.t)
            H.append(state_new.h.copy())
            U.append(state_new.u.copy())

        state = state_new
        if max(mon_ux[-1], mon_vx[-1]) > blowup_cut:
            T_obs = state.t
            if times[-1] != state.t:
                times.append(state.t)
                H.append(state.h.copy())
                U.append(state.u.copy())
            break

    # threshold over the compact range the solution actually occupied
    if kbox is None:
        pad = 0.02 * (h_max - h_min) + 1e-12
        kbox = (h_min - pad, h_max + pad)
    bounds = rc.coefficient_bounds(chart, kbox, (state.x_lo, state.x_hi))
    N = rc.threshold(bounds, nu)
    T_pred = None
    worst0 = min(y0_min, q0_min)
    if worst0 < N and nu > 0.0:
        T_pred = rc.lifespan_bound(worst0, N, bounds.inf_a2, nu)

    sup_a2 = inf_a2 = None
    if critical is not None and len(critical.a2) > 0:
        sup_a2 = float(np.max(critical.a2))
        inf_a2 = float(np.min(critical.a2))

    report = BlowupReport(N=N, nu=nu, y0_min=y0_min, q0_min=q0_min, T_pred=T_pred,
                          T_obs=T_obs, refinement_confirmed=None, sup_a2=sup_a2,
                          inf_a2=inf_a2, h0=chart.h0, bounds=bounds.as_dict())
    return RunResult(
        chart=chart, x=x, boundary=state.boundary, times=np.asarray(times),
        H=np.asarray(H), U=np.asarray(U), monitor_t=np.asarray(mon_t),
        monitor_ux=np.asarray(mon_ux), monitor_vx=np.asarray(mon_vx),
        traces=[tr.finish() for tr in seeds], report=report, final=state,
        h_min=h_min, h_max=h_max,
    )


def trace_characteristic(result: RunResult, x0, family="forward") -> CharacteristicTrace:
    """Trace a characteristic through a stored run history.

    Path integration is classical RK4 on dx/dt = +-c with cubic interpolation
    of c in space and linear interpolation in time between stored levels;
    y (forward) or q (backward) and the Riccati coefficients are sampled at
    every stored level.
    """
    chart = result.chart
    x = result.x
    x_lo = float(x[0])
    dx = x[1] - x[0]
    periodic = result.boundary == "periodic"
    x_hi_dom = x_lo + dx * x.size if periodic else float(x[-1])
    sgn = 1.0 if family == "forward" else -1.0
    times = result.times
    if times.size < 2:
        raise GridError("history too short to trace")

    fields = [
        _trace_fields(chart, x, x_lo, dx, result.H[k], result.U[k], periodic, with_ab=True)
        for k in range(times.size)
    ]
    key = "y" if family == "forward" else "q"
    ab_key, ab_rhs_key = ("alpha", "rhs_a") if family == "forward" else ("beta", "rhs_b")

    def c_at(pos, k, theta):
        vals0 = interp_cubic(x_lo, dx, fields[k]["c"], np.array([pos]), periodic)[0]
        vals1 = interp_cubic(x_lo, dx, fields[k + 1]["c"], np.array([pos]), periodic)[0]
        return (1.0 - theta) * vals0 + theta * vals1

    pos = float(x0)
    ts, xs, cs, yqs, a0s, a1s, a2s = [], [], [], [], [], [], []
    abs_, ab_rhss = [], []
    truncated = None

    def sample(k):
        f = fields[k]
        xq = np.array([pos])
        ts.append(times[k])
        xs.append(pos)
        cs.append(float(interp_cubic(x_lo, dx, f["c"], xq, periodic)[0]))
        yqs.append(float(interp_cubic(x_lo, dx, f[key], xq, periodic)[0]))
        a0s.append(float(interp_cubic(x_lo, dx, f["a0"], xq, periodic)[0]))
        a1s.append(float(interp_cubic(x_lo, dx, f["a1"], xq, periodic)[0]))
        a2s.append(float(interp_cubic(x_lo, dx, f["a2"], xq, periodic)[0]))
        abs_.append(float(interp_cubic(x_lo, dx, f[ab_key], xq, periodic)[0]))
        ab_rhss.append(float(interp_cubic(x_lo, dx, f[ab_rhs_key], xq, periodic)[0]))

    sample(0)
    for k in range(times.size - 1):
        dt = times[k + 1] - times[k]
        k1 = sgn * c_at(pos, k, 0.0)
        k2 = sgn * c_at(pos + 0.5 * dt * k1, k, 0.5)
        k3 = sgn * c_at(pos + 0.5 * dt * k2, k, 0.5)
        k4 = sgn * c_at(pos + dt * k3, k, 1.0)
        new_pos = pos + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not periodic and not (x_lo <= new_pos <= x_hi_dom):
            truncated = "path left the domain"
            break
        pos = new_pos
        sample(k + 1)

    t = np.asarray(ts)
    yq = np.asarray(yqs)
    a0 = np.asarray(a0s)
    a1 = np.asarray(a1s)
    a2 = np.asarray(a2s)
    ab = np.asarray(abs_)
    ab_rhs = np.asarray(ab_rhss)
    residual = ab_res = None
    if t.size >= 5:
        residual = deriv_nonuniform(t, yq) - (a0 + sgn * a1 * yq - a2 * yq**2)
        ab_res = deriv_nonuniform(t, ab) - ab_rhs
    return CharacteristicTrace(family=family, x0=float(x0), t=t, x=np.asarray(xs),
                               c=np.asarray(cs), yq=yq, a0=a0, a1=a1, a2=a2,
                               residual=residual, truncated=truncated,
                               ab=ab, ab_rhs=ab_rhs, ab_residual=ab_res)


def rc_transition_audit(result: RunResult, min_alpha=1e-3):
    """Check observed backward R/C flips against the transition criterion.

    For each stored level pair and each node where beta changes sign along
    the backward characteristic, the sign of the observed change must match
    sign(alpha * (p_mu/c)_h). Flips with |alpha| below ``min_alpha`` are
    skipped as noise. Returns (n_transitions, n_violations).
    """
    chart = result.chart
    x = result.x
    dx = x[1] - x[0]
    periodic = result.boundary == "periodic"
    n_trans = 0
    n_bad = 0
    for k in range(result.times.size - 1):
        dt = result.times[k + 1] - result.times[k]
        h0, u0 = result.H[k], result.U[k]
        h1, u1 = result.H[k + 1], result.U[k + 1]
        c0 = chart.c(h0, x)
        g0 = gr.gradient_field(chart, x, h0, u0, periodic=periodic)
        g1 = gr.gradient_field(chart, x, h1, u1, periodic=periodic)
        feet = x + c0 * dt  # backward characteristic arriving at x at t_{k+1}
        beta_foot = interp_cubic(x[0], dx, g0.beta, feet, periodic)
        alpha_foot = interp_cubic(x[0], dx, g0.alpha, feet, periodic)
        delta = g1.beta - beta_foot
        crossing = (np.sign(g1.beta) * np.sign(beta_foot) < 0) & (
            np.abs(alpha_foot) > min_alpha
        )
        if not np.any(crossing):
            continue
        dpc = chart.dpc_dh(h1, x)
        predicted = np.sign(alpha_foot * dpc)
        n_trans += int(np.sum(crossing))
        n_bad += int(np.sum(crossing & (np.sign(delta) != predicted)))
    return n_trans, n_bad


def stationary_profile(chart, p_star, x):
    """h-profile with p(h(x), x) = p_star everywhere (u = 0 stationary state)."""
    x = np.asarray(x, dtype=float)
    return chart.h_of_p(np.full_like(x, float(p_star)), x)


_SHAPES = {
    "sine": lambda x, prm: np.sin(prm.get("wavenumber", 1.0) * (x - prm.get("center", 0.0))),
    "gaussian": lambda x, prm: np.exp(-((x - prm.get("center", 0.0)) ** 2)
                                      / (2.0 * prm.get("width", 1.0) ** 2)),
    "tanh": lambda x, prm: np.tanh((x - prm.get("center", 0.0)) / prm.get("width", 1.0)),
}


def initial_data(chart, x, preset, p_star=1.0, amplitude=0.0, target_y0_min=None,
                 periodic=True, **shape_params):
    """Initial (h, u): a stationary base plus a velocity perturbation preset.

    With ``target_y0_min`` the amplitude is solved by 1-D root finding so the
    initial min of y hits the target exactly.
    """
    x = np.asarray(x, dtype=float)
    h = stationary_profile(chart, p_star, x)
    if preset == "stationary":
        return h, np.zeros_like(x)
    if preset not in _SHAPES:
        raise ModelError(f"unknown initial-data preset {preset!r}")
    shape = _SHAPES[preset](x, shape_params)

    def y_min(amp):
        g = gr.gradient_field(chart, x, h, amp * shape, periodic=periodic)
        return float(np.min(g.y))

    if target_y0_min is not None:
        target = float(target_y0_min)
        if target >= 0.0:
            raise ModelError("target_y0_min must be negative (compressive data)")
        a_hi = 1.0
        for _ in range(60):
            if y_min(a_hi) < target:
                break
            a_hi *= 2.0
        else:
            raise ModelError("could not bracket the target amplitude")
        amplitude = brentq(lambda a: y_min(a) - target, 0.0, a_hi, xtol=1e-12, rtol=1e-12)
    return h, amplitude * shape

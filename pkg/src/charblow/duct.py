"""Compressible flow in a variable-area duct, in Lagrangian (z, u, m) variables.

The Eulerian duct system maps to

    z_t + K_c z^nu u_x = 0,
    u_t + m c a^{-(g-1)/2} z_x + 2 (a p / m) m_x - g p a_x = 0,
    m_t = 0,

with z a rescaled volume variable, m = exp(S / 2 c_v), and the duct area
a(x, t) carried along particle paths (a_t = u a', a_x = vhat a'). Here

    vhat = K_v z^{-2/(g-1)},   p = K_p a^{-g} m^2 z^{2g/(g-1)},
    c = K_c a^{-(g-1)/2} m z^{(g+1)/(g-1)},

and the three constants are pinned by the defining relations (they satisfy
K_c = (2g/(g-1)) K_p = ((g-1)/2)/K_v).

Gradient dynamics: with

    alpha = u_x + E m z_x + ((g-1)/g) E m_x z,   E = a^{-(g-1)/2},
    beta  = u_x - E m z_x - ((g-1)/g) E m_x z,

the verified characteristic equations are

    alpha' = k1 (k2 (3 alpha + beta) + (alpha beta - alpha^2))
             + (k3s + k3a)(alpha - beta) + A,
    beta`  = -k1 (k2 (3 beta + alpha) - (alpha beta - beta^2))
             + (k3s - k3a)(alpha - beta) + A,

with k3s = (3/8)(g-1)^2 m z a^{-(g+1)/2} a' (the (g-1)^2 normalization, and
the m_x coupling k2 with a g(g+1) denominator, are the readings under which
the characteristic residual of a simulated duct run converges at 2nd order;
the alternatives fail that test). The geometry term A enters both equations
with the same sign; the u a'/a drag k3a is the antisymmetric piece.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import GridError, ModelError, NumericalError
from .numerics import deriv_nonuniform, gradient_4th, interp_cubic
from .profiles import ConstantProfile, Profile

__all__ = [
    "DuctParams",
    "zm_transform",
    "zm_inverse",
    "DuctCoefficients",
    "duct_coeffs",
    "duct_alpha_beta",
    "DuctState",
    "duct_stationary_state",
    "duct_step",
    "run_duct",
    "DuctRunResult",
    "metric_identities_residual",
    "trace_duct",
]


@dataclass(frozen=True)
class DuctParams:
    """Gas constants and derived chart constants for the duct system."""

    gamma: float
    K: float = 1.0
    c_v: float = 1.0

    def __post_init__(self):
        if self.gamma <= 1.0:
            raise ModelError(f"gamma must exceed 1, got {self.gamma:g}")
        if self.K <= 0.0:
            raise ModelError("K must be positive")

    @property
    def K_v(self) -> float:
        g = self.gamma
        return (2.0 * math.sqrt(self.K * g) / (g - 1.0)) ** (2.0 / (g - 1.0))

    @property
    def K_p(self) -> float:
        return self.K * self.K_v ** (-self.gamma)

    @property
    def K_c(self) -> float:
        g = self.gamma
        return math.sqrt(self.K * g) * self.K_v ** (-(g + 1.0) / 2.0)

    # chart maps ------------------------------------------------------
    def z_of_vhat(self, vhat):
        g = self.gamma
        return (2.0 * math.sqrt(self.K * g) / (g - 1.0)) * np.asarray(vhat, float) ** (
            -(g - 1.0) / 2.0
        )

    def vhat_of_z(self, z):
        g = self.gamma
        return self.K_v * np.asarray(z, float) ** (-2.0 / (g - 1.0))

    def m_of_S(self, S):
        return np.exp(np.asarray(S, float) / (2.0 * self.c_v))

    def p(self, z, m, a):
        g = self.gamma
        return self.K_p * np.asarray(a, float) ** (-g) * np.asarray(m, float) ** 2 * np.asarray(
            z, float
        ) ** (2.0 * g / (g - 1.0))

    def c(self, z, m, a):
        g = self.gamma
        return (self.K_c * np.asarray(a, float) ** (-(g - 1.0) / 2.0)
                * np.asarray(m, float) * np.asarray(z, float) ** ((g + 1.0) / (g - 1.0)))

    def z_of_p(self, p, m, a):
        g = self.gamma
        return (np.asarray(p, float) * np.asarray(a, float) ** g
                / (self.K_p * np.asarray(m, float) ** 2)) ** ((g - 1.0) / (2.0 * g))


def zm_transform(params: DuctParams, vhat, S=0.0):
    """(vhat, S) -> (z, m)."""
    vhat = np.asarray(vhat, dtype=float)
    if np.any(vhat <= 0.0):
        raise ModelError("vhat must be positive")
    return params.z_of_vhat(vhat), params.m_of_S(S)


def zm_inverse(params: DuctParams, z, m):
    """(z, m) -> (vhat, S)."""
    z = np.asarray(z, dtype=float)
    S = 2.0 * params.c_v * np.log(np.asarray(m, float))
    return params.vhat_of_z(z), S


@dataclass
class DuctCoefficients:
    """Coefficient set of the duct gradient dynamics at a node."""

    k1: np.ndarray
    k2: np.ndarray
    k3_sym: np.ndarray   # (3/8)(g-1)^2 m z a^{-(g+1)/2} a'
    k3_anti: np.ndarray  # -((g-1)/4) u a'/a
    A: np.ndarray

    @property
    def k3(self):
        """Combined drag coefficient as it appears in the alpha equation."""
        return self.k3_sym + self.k3_anti


def duct_coeffs(params: DuctParams, z, m, m_x, u, a, a_d1, a_d2) -> DuctCoefficients:
    """Evaluate k1, k2, k3 (both pieces) and A at given node values."""
    g = params.gamma
    z = np.asarray(z, dtype=float)
    a = np.asarray(a, dtype=float)
    E = a ** (-(g - 1.0) / 2.0)
    k1 = (g + 1.0) / (2.0 * (g - 1.0)) * params.K_c * z ** (2.0 / (g - 1.0))
    k2 = (g - 1.0) / (g * (g + 1.0)) * np.asarray(m_x, float) * z * E
    k3_sym = 0.375 * (g - 1.0) ** 2 * np.asarray(m, float) * z * a ** (-(g + 1.0) / 2.0) * a_d1
    k3_anti = -(g - 1.0) / 4.0 * np.asarray(u, float) * a_d1 / a
    A = ((g - 1.0) ** 3 / (8.0 * params.K_c) * np.asarray(m, float) ** 2
         * z ** ((2.0 * g - 4.0) / (g - 1.0)) * a ** (-g - 1.0)
         * (a * np.asarray(a_d2, float) - g * np.asarray(a_d1, float) ** 2))
    A = A + ((g - 1.0) ** 2 / (2.0 * g) * np.asarray(m, float) * np.asarray(m_x, float)
             * z**2 * a ** (-g) * a_d1)
    return DuctCoefficients(k1=k1, k2=k2, k3_sym=k3_sym, k3_anti=k3_anti, A=A)


def duct_alpha_beta(params: DuctParams, u_x, z_x, m_x, z, m, a, coeffs=None):
    """Gradient variables (alpha, beta) and, with coefficients, their RHS.

    Returns (alpha, beta) when ``coeffs`` is None, else
    (alpha, beta, alpha_rhs, beta_rhs).
    """
    g = params.gamma
    E = np.asarray(a, float) ** (-(g - 1.0) / 2.0)
    drift = E * np.asarray(m, float) * np.asarray(z_x, float) + (
        (g - 1.0) / g
    ) * E * np.asarray(m_x, float) * np.asarray(z, float)
    alpha = np.asarray(u_x, float) + drift
    beta = np.asarray(u_x, float) - drift
    if coeffs is None:
        return alpha, beta
    ab = alpha * beta
    rhs_a = (coeffs.k1 * (coeffs.k2 * (3.0 * alpha + beta) + (ab - alpha**2))
             + (coeffs.k3_sym + coeffs.k3_anti) * (alpha - beta) + coeffs.A)
    rhs_b = (-coeffs.k1 * (coeffs.k2 * (3.0 * beta + alpha) - (ab - beta**2))
             + (coeffs.k3_sym - coeffs.k3_anti) * (alpha - beta) + coeffs.A)
    return alpha, beta, rhs_a, rhs_b


@dataclass
class DuctState:
    """Lagrangian duct snapshot: (z, u) dynamic, m static, xt the particle position."""

    x_lo: float
    x_hi: float
    n: int
    z: np.ndarray
    u: np.ndarray
    m: np.ndarray
    xt: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        if self.n < 16:
            raise GridError(f"need at least 16 nodes, got {self.n}")

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_lo, self.x_hi, self.n)


def duct_stationary_state(params: DuctParams, area: Profile, x, p_star=1.0,
                          m_profile: Optional[Profile] = None, xt0=0.0) -> DuctState:
    """Stationary duct gas (u = 0, p = p_star) on a Lagrangian grid.

    The particle-position field solves dxt/dx = vhat(z(x)) with
    z(x) = z_of_p(p_star, m(x), a(xt)); integrated with RK4 per cell.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    m_prof = m_profile or ConstantProfile(level=1.0)

    def m_at(xx):
        return m_prof.value(xx)

    def slope(xx, xt):
        z = params.z_of_p(p_star, m_at(xx), area.value(xt))
        return params.vhat_of_z(z)

    xt = np.empty(n)
    xt[0] = xt0
    dx = x[1] - x[0]
    for i in range(n - 1):
        k1 = slope(x[i], xt[i])
        k2 = slope(x[i] + 0.5 * dx, xt[i] + 0.5 * dx * k1)
        k3 = slope(x[i] + 0.5 * dx, xt[i] + 0.5 * dx * k2)
        k4 = slope(x[i] + dx, xt[i] + dx * k3)
        xt[i + 1] = xt[i] + dx / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    m = m_at(x)
    z = params.z_of_p(p_star, m, area.value(xt))
    return DuctState(x_lo=float(x[0]), x_hi=float(x[-1]), n=n, z=z,
                     u=np.zeros(n), m=np.asarray(m, float) * np.ones(n), xt=xt)


def duct_step(params: DuctParams, area: Profile, state: DuctState, cfl: float,
              dt_cap: Optional[float] = None):
    """One Richtmyer predictor-corrector step of the duct system (outflow BCs).

    Advances the equivalent (p, u) form

        p_t + (2g/(g-1)) K_c p z^{2/(g-1)} u_x + g (p/a) a' u = 0,
        u_t + a p_x = 0,

    plus the particle positions xt_t = u that carry the duct geometry. With
    the pressure derivative taken as a whole, a stationary duct gas
    (p constant, u = 0) is an exact fixed point of the update.
    """
    g = params.gamma
    q_exp = 2.0 / (g - 1.0)
    q_coef = 2.0 * g / (g - 1.0) * params.K_c
    dx = state.dx
    z, u, m, xt = state.z, state.u, state.m, state.xt
    a = area.value(xt)
    p = params.p(z, m, a)
    c = params.c(z, m, a)
    dt = cfl * dx / float(np.max(c))
    if dt_cap is not None:
        dt = min(dt, dt_cap)
    lam = dt / dx

    def ext(f):
        return np.concatenate([f[:1], f, f[-1:]])

    u_e, m_e, xt_e, p_e = ext(u), ext(m), ext(xt), ext(p)
    pbar = 0.5 * (p_e[:-1] + p_e[1:])
    ubar = 0.5 * (u_e[:-1] + u_e[1:])
    mbar = 0.5 * (m_e[:-1] + m_e[1:])
    xtbar = 0.5 * (xt_e[:-1] + xt_e[1:])
    abar = area.value(xtbar)
    zbar = params.z_of_p(pbar, mbar, abar)
    p_half = (pbar - 0.5 * lam * q_coef * pbar * zbar**q_exp * (u_e[1:] - u_e[:-1])
              - 0.5 * dt * g * (pbar / abar) * area.d1(xtbar) * ubar)
    u_half = ubar - 0.5 * lam * abar * (p_e[1:] - p_e[:-1])
    xt_half = xtbar + 0.5 * dt * ubar

    p_ctr = 0.5 * (p_half[1:] + p_half[:-1])
    xt_ctr = 0.5 * (xt_half[1:] + xt_half[:-1])
    a_ctr = area.value(xt_ctr)
    u_ctr = 0.5 * (u_half[1:] + u_half[:-1])
    z_ctr = params.z_of_p(p_ctr, m, a_ctr)
    p_new = (p - lam * q_coef * p_ctr * z_ctr**q_exp * (u_half[1:] - u_half[:-1])
             - dt * g * (p_ctr / a_ctr) * area.d1(xt_ctr) * u_ctr)
    u_new = u - lam * a_ctr * (p_half[1:] - p_half[:-1])
    xt_new = xt + dt * u_ctr

    if not (np.all(np.isfinite(p_new)) and np.all(p_new > 0.0)):
        raise NumericalError(f"duct update failed at t={state.t + dt:.6g}")
    z_new = params.z_of_p(p_new, m, area.value(xt_new))
    return replace(state, z=z_new, u=u_new, xt=xt_new, t=state.t + dt), dt


@dataclass
class DuctRunResult:
    params: DuctParams
    area: Profile
    x: np.ndarray
    times: np.ndarray
    Z: np.ndarray
    U: np.ndarray
    XT: np.ndarray
    m: np.ndarray
    final: DuctState


def run_duct(params: DuctParams, area: Profile, state: DuctState, t_max, cfl=0.5,
             history_stride=1, max_steps=2_000_000) -> DuctRunResult:
    times = [state.t]
    Z = [state.z.copy()]
    U = [state.u.copy()]
    XT = [state.xt.copy()]
    n_steps = 0
    while state.t < t_max - 1e-14 and n_steps < max_steps:
        state, _ = duct_step(params, area, state, cfl, dt_cap=t_max - state.t)
        n_steps += 1
        if n_steps % history_stride == 0 or state.t >= t_max - 1e-14:
            times.append(state.t)
            Z.append(state.z.copy())
            U.append(state.u.copy())
            XT.append(state.xt.copy())
    return DuctRunResult(params=params, area=area, x=state.x, times=np.asarray(times),
                         Z=np.asarray(Z), U=np.asarray(U), XT=np.asarray(XT),
                         m=state.m.copy(), final=state)


def metric_identities_residual(result: DuctRunResult, interior=4):
    """Max residuals of the Lagrangian duct-geometry identities.

    Checks a_t = u a', a_x = vhat a', (a')_t = u a'', (a')_x = vhat a'' by
    finite differences of the stored history; all four are O(dx^2) on smooth
    runs. Returns a dict of the four maxima over interior nodes/levels.
    """
    times = result.times
    if times.size < 3:
        raise GridError("need at least 3 stored levels for time residuals")
    x = result.x
    dx = x[1] - x[0]
    sl = slice(interior, -interior if interior else None)
    A = result.area.value(result.XT)
    AD = result.area.d1(result.XT)
    vhat = result.params.vhat_of_z(result.Z)

    # time direction: non-uniform central differences on interior levels
    t = times
    res_at = 0.0
    res_adt = 0.0
    for k in range(1, times.size - 1):
        dt_m = t[k] - t[k - 1]
        dt_p = t[k + 1] - t[k]
        w_m = -dt_p / (dt_m * (dt_m + dt_p))
        w_0 = (dt_p - dt_m) / (dt_m * dt_p)
        w_p = dt_m / (dt_p * (dt_m + dt_p))
        a_t = w_m * A[k - 1] + w_0 * A[k] + w_p * A[k + 1]
        ad_t = w_m * AD[k - 1] + w_0 * AD[k] + w_p * AD[k + 1]
        u = result.U[k]
        res_at = max(res_at, float(np.max(np.abs((a_t - u * AD[k])[sl]))))
        add = result.area.d2(result.XT[k])
        res_adt = max(res_adt, float(np.max(np.abs((ad_t - u * add)[sl]))))

    res_ax = 0.0
    res_adx = 0.0
    for k in range(times.size):
        a_x = gradient_4th(A[k], dx, periodic=False)
        ad_x = gradient_4th(AD[k], dx, periodic=False)
        add = result.area.d2(result.XT[k])
        res_ax = max(res_ax, float(np.max(np.abs((a_x - vhat[k] * AD[k])[sl]))))
        res_adx = max(res_adx, float(np.max(np.abs((ad_x - vhat[k] * add)[sl]))))
    return {"a_t": res_at, "a_x": res_ax, "ad_t": res_adt, "ad_x": res_adx}


def _duct_fields(result: DuctRunResult, k):
    """Nodal c, alpha, beta, and RHS pieces at stored level k."""
    params, area = result.params, result.area
    x = result.x
    dx = x[1] - x[0]
    z, u, m, xt = result.Z[k], result.U[k], result.m, result.XT[k]
    a = area.value(xt)
    c = params.c(z, m, a)
    z_x = gradient_4th(z, dx, periodic=False)
    u_x = gradient_4th(u, dx, periodic=False)
    m_x = gradient_4th(m, dx, periodic=False)
    co = duct_coeffs(params, z, m, m_x, u, a, area.d1(xt), area.d2(xt))
    alpha, beta, rhs_a, rhs_b = duct_alpha_beta(params, u_x, z_x, m_x, z, m, a, coeffs=co)
    return {"c": c, "alpha": alpha, "beta": beta, "rhs_a": rhs_a, "rhs_b": rhs_b}


@dataclass
class DuctTrace:
    family: str
    x0: float
    t: np.ndarray
    x: np.ndarray
    c: np.ndarray
    value: np.ndarray      # alpha (forward) or beta (backward)
    rhs: np.ndarray
    residual: Optional[np.ndarray]
    truncated: Optional[str] = None


def trace_duct(result: DuctRunResult, x0, family="forward") -> DuctTrace:
    """Trace a duct characteristic and measure the alpha'/beta` residual."""
    x = result.x
    x_lo = float(x[0])
    dx = x[1] - x[0]
    sgn = 1.0 if family == "forward" else -1.0
    key, rhs_key = ("alpha", "rhs_a") if family == "forward" else ("beta", "rhs_b")
    times = result.times
    fields = [_duct_fields(result, k) for k in range(times.size)]

    def c_at(pos, k, theta):
        v0 = interp_cubic(x_lo, dx, fields[k]["c"], np.array([pos]), False)[0]
        v1 = interp_cubic(x_lo, dx, fields[k + 1]["c"], np.array([pos]), False)[0]
        return (1.0 - theta) * v0 + theta * v1

    pos = float(x0)
    ts, xs, cs, vals, rhss = [], [], [], [], []
    truncated = None

    def sample(k):
        f = fields[k]
        xq = np.array([pos])
        ts.append(times[k])
        xs.append(pos)
        cs.append(float(interp_cubic(x_lo, dx, f["c"], xq, False)[0]))
        vals.append(float(interp_cubic(x_lo, dx, f[key], xq, False)[0]))
        rhss.append(float(interp_cubic(x_lo, dx, f[rhs_key], xq, False)[0]))

    sample(0)
    for k in range(times.size - 1):
        dt = times[k + 1] - times[k]
        k1 = sgn * c_at(pos, k, 0.0)
        k2 = sgn * c_at(pos + 0.5 * dt * k1, k, 0.5)
        k3 = sgn * c_at(pos + 0.5 * dt * k2, k, 0.5)
        k4 = sgn * c_at(pos + dt * k3, k, 1.0)
        new_pos = pos + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not (x_lo <= new_pos <= float(x[-1])):
            truncated = "path left the domain"
            break
        pos = new_pos
        sample(k + 1)

    t = np.asarray(ts)
    val = np.asarray(vals)
    rhs = np.asarray(rhss)
    residual = deriv_nonuniform(t, val) - rhs if t.size >= 5 else None
    return DuctTrace(family=family, x0=float(x0), t=t, x=np.asarray(xs),
                     c=np.asarray(cs), value=val, rhs=rhs, residual=residual,
                     truncated=truncated)

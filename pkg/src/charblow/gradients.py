"""Gradient variables alpha, beta, y, q and the R/C wave classification.

alpha and beta are the directional pressure derivatives along the opposite
characteristics, normalized by -c^2; they generalize the Riemann-invariant
gradients of the isentropic system:

    alpha = u_x + h_x + p_mu / c,   beta = u_x - h_x - p_mu / c.

y = sqrt(c) alpha - I and q = sqrt(c) beta + I absorb the integrating factor
so that each satisfies a scalar Riccati equation along its own characteristic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError
from .numerics import gradient_4th

__all__ = [
    "alpha_beta",
    "y_q",
    "recover_gradients",
    "classify",
    "GradientField",
    "gradient_field",
    "alpha_beta_rhs",
    "directional_residuals",
    "rc_transition_sign",
    "rc_consistency_check",
]


def alpha_beta(u_x, h_x, p_mu, c):
    """Directional gradient variables from raw gradients and chart data."""
    drift = h_x + np.asarray(p_mu) / np.asarray(c)
    u_x = np.asarray(u_x, dtype=float)
    return u_x + drift, u_x - drift


def y_q(alpha, beta, c, I):
    """Integrating-factor gradient variables."""
    sq = np.sqrt(np.asarray(c, dtype=float))
    return sq * alpha - I, sq * beta + I


def recover_gradients(y, q, c, I, p_mu):
    """Invert (y, q) back to (u_x, h_x); exact algebraic inverse."""
    sq = np.sqrt(np.asarray(c, dtype=float))
    alpha = (np.asarray(y) + I) / sq
    beta = (np.asarray(q) - I) / sq
    u_x = 0.5 * (alpha + beta)
    h_x = 0.5 * (alpha - beta) - np.asarray(p_mu) / np.asarray(c)
    return u_x, h_x


def classify(alpha, beta):
    """R/C labels for the forward and backward families.

    'R' for a positive gradient variable, 'C' for negative, 'N' at exactly
    zero (the neutral set the strict inequalities leave out).
    """
    def lab(g):
        g = np.asarray(g)
        return np.where(g > 0.0, "R", np.where(g < 0.0, "C", "N"))

    return lab(alpha), lab(beta)


@dataclass
class GradientField:
    """Per-node gradient diagnostics of one solution snapshot."""

    x: np.ndarray
    t: float
    u_x: np.ndarray
    h_x: np.ndarray
    v_x: np.ndarray
    c: np.ndarray
    p_mu: np.ndarray
    I: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    y: np.ndarray
    q: np.ndarray
    fwd: np.ndarray
    bwd: np.ndarray


def gradient_field(chart, x, h, u, t=0.0, periodic=True) -> GradientField:
    """Gradient diagnostics of a snapshot (h, u) on a uniform grid.

    Spatial derivatives use 4th-order central differences (2nd-order one-sided
    at outflow boundaries) so the diagnostic out-converges the 2nd-order
    solver fields.
    """
    x = np.asarray(x, dtype=float)
    if x.size < 5:
        raise GridError("gradient_field needs at least 5 nodes")
    dx = x[1] - x[0]
    u_x = gradient_4th(u, dx, periodic)
    h_x = gradient_4th(h, dx, periodic)
    v = chart.v_of_h(h, x)
    v_x = gradient_4th(v, dx, periodic)
    c = chart.c(h, x)
    p_mu = chart.p_mu(h, x)
    I = chart.I(h, x)
    alpha, beta = alpha_beta(u_x, h_x, p_mu, c)
    y, q = y_q(alpha, beta, c, I)
    fwd, bwd = classify(alpha, beta)
    return GradientField(x=x, t=t, u_x=u_x, h_x=h_x, v_x=v_x, c=c, p_mu=p_mu, I=I,
                         alpha=alpha, beta=beta, y=y, q=q, fwd=fwd, bwd=bwd)


def alpha_beta_rhs(chart, h, mu, alpha, beta):
    """Right-hand sides of the coupled alpha/beta dynamics.

    alpha' (along dx/dt = +c) and beta` (along dx/dt = -c):

        alpha' = -(c/2)(p_mu/c)_h (3 alpha + beta) + (c_h/2)(alpha beta - alpha^2)
        beta`  = +(c/2)(p_mu/c)_h (alpha + 3 beta) + (c_h/2)(alpha beta - beta^2)
    """
    half_c_dpc = 0.5 * chart.c(h, mu) * chart.dpc_dh(h, mu)
    half_ch = 0.5 * chart.c_h(h, mu)
    ab = alpha * beta
    rhs_a = -half_c_dpc * (3.0 * alpha + beta) + half_ch * (ab - alpha**2)
    rhs_b = half_c_dpc * (alpha + 3.0 * beta) + half_ch * (ab - beta**2)
    return rhs_a, rhs_b


def directional_residuals(chart, x, h, u, periodic=True):
    """Max interior residuals of p' + c u' and p` - c u`.

    Spatial derivatives are 4th-order finite differences of the nodal p, h
    fields; time derivatives come from the evolution equations
    h_t = -c u_x and u_t = -(c h_x + p_mu). For smooth exact fields both
    residuals vanish; on solver output they converge at the field accuracy.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 7:
        raise GridError("directional_residuals needs at least 7 nodes")
    dx = x[1] - x[0]
    c = chart.c(h, x)
    p_mu = chart.p_mu(h, x)
    p = chart.p(h, x)
    u_x = gradient_4th(u, dx, periodic)
    h_x = gradient_4th(h, dx, periodic)
    p_x = gradient_4th(p, dx, periodic)
    p_t = -(c**2) * u_x             # p_t = p_h h_t = -c^2 u_x
    u_t = -(c * h_x + p_mu)
    fwd = p_t + c * p_x + c * (u_t + c * u_x)
    bwd = (p_t - c * p_x) - c * (u_t - c * u_x)
    if periodic:
        interior = slice(None)
    else:
        interior = slice(2, -2)
    return float(np.max(np.abs(fwd[interior]))), float(np.max(np.abs(bwd[interior])))


def rc_transition_sign(alpha, dpc_dh):
    """Sign of beta` at a backward-neutral point (beta = 0).

    The backward character can only flip in the direction this sign allows:
    sign(beta`) = sign(alpha * (p_mu/c)_h).
    """
    return np.sign(np.asarray(alpha) * np.asarray(dpc_dh))


def rc_consistency_check(law, v, x):
    """Both sides of the smooth-media R/C consistency identity.

    Along a curve with p_x = 0 (so v_x = -p_x/p_v), the transition criterion
    (p_x/p_v)_v agrees with (2/c) c_x. Returns (lhs, rhs, |difference|).
    """
    rec = law.evaluate(v, x, check=False)
    lhs = (rec.p_xv * rec.p_v - rec.p_x * rec.p_vv) / rec.p_v**2
    v_x = -rec.p_x / rec.p_v
    c_x_total = rec.c_v * v_x + rec.c_x
    rhs = 2.0 / rec.c * c_x_total
    return lhs, rhs, np.abs(lhs - rhs)

"""Riccati coefficients, phase-line analysis, blowup threshold and lifespan.

Along its own characteristic each gradient variable obeys

    y' = a0 + a1 y - a2 y^2,      q` = a0 - a1 q - a2 q^2,

with coefficients depending only on the solution values (not its gradients):

    a0 = -c I_mu + (1/2) sqrt(c) (p_mu/c)_h p_mu - c (p_mu/c)_h I
         - (c_h / (2 sqrt(c))) I^2
    a1 = -(2 sqrt(c) I)_h
    a2 = c_h / (2 sqrt(c)) > 0.

The sufficient blowup condition compares initial data against a uniform lower
bound N of the real roots of psi_pm^nu(xi) = a0 +- a1 xi - (1 - nu) a2 xi^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import HyperbolicityError, IntegrationError, NotApplicableError

__all__ = [
    "RiccatiCoefficients",
    "coefficients",
    "PhaseLine",
    "phase_roots",
    "psi",
    "KBounds",
    "coefficient_bounds",
    "threshold",
    "lifespan_bound",
    "ReferenceTrajectory",
    "integrate_reference",
]

BLOWUP_VALUE = 1e8


@dataclass(frozen=True)
class RiccatiCoefficients:
    """Coefficient triple at one or many chart points (h, mu), with the h0 used."""

    a0: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    h: np.ndarray
    mu: np.ndarray
    h0: float


def coefficients(chart, h, mu) -> RiccatiCoefficients:
    """Evaluate (a0, a1, a2) at (h, mu) through a chart."""
    h = np.asarray(h, dtype=float)
    mu = np.asarray(mu, dtype=float)
    c = chart.c(h, mu)
    c_h = chart.c_h(h, mu)
    if np.any(c_h <= 0.0):
        raise HyperbolicityError("c_h <= 0: genuine nonlinearity fails at a requested point")
    sq = np.sqrt(c)
    dpc = chart.dpc_dh(h, mu)
    I = chart.I(h, mu)
    I_mu = chart.I_mu(h, mu)
    p_mu = chart.p_mu(h, mu)
    a2 = c_h / (2.0 * sq)
    a1 = -2.0 * a2 * I - c * dpc
    a0 = -c * I_mu + 0.5 * sq * dpc * p_mu - c * dpc * I - a2 * I**2
    return RiccatiCoefficients(a0=a0, a1=a1, a2=a2, h=h, mu=mu, h0=chart.h0)


@dataclass(frozen=True)
class PhaseLine:
    """Equilibria of xi' = psi_pm^nu(xi) for frozen coefficients."""

    nu: float
    branch: int  # +1 for the forward (y) branch, -1 for the backward (q) branch
    a0: float
    a1: float
    a2: float
    discriminant: float
    roots: Optional[tuple]  # (xi1, xi2) with xi1 <= xi2, or None

    @property
    def has_real_roots(self) -> bool:
        return self.roots is not None


def psi(xi, a0, a1, a2, nu=0.0, branch=+1):
    """psi_pm^nu(xi) = a0 +- a1 xi - (1 - nu) a2 xi^2."""
    xi = np.asarray(xi, dtype=float)
    return a0 + branch * a1 * xi - (1.0 - nu) * a2 * xi**2


def phase_roots(a0, a1, a2, nu=0.0, branch=+1) -> PhaseLine:
    """Real roots of psi_pm^nu, ordered xi1 <= xi2; None when complex."""
    if not (0.0 <= nu < 1.0):
        raise ValueError(f"nu must lie in [0, 1), got {nu:g}")
    if a2 <= 0.0:
        raise HyperbolicityError("phase analysis requires a2 > 0")
    disc = a1**2 + 4.0 * (1.0 - nu) * a0 * a2
    if disc < 0.0:
        roots = None
    else:
        s = math.sqrt(disc)
        denom = 2.0 * (1.0 - nu) * a2
        r1 = (branch * a1 - s) / denom
        r2 = (branch * a1 + s) / denom
        roots = (min(r1, r2), max(r1, r2))
    return PhaseLine(nu=nu, branch=branch, a0=a0, a1=a1, a2=a2,
                     discriminant=disc, roots=roots)


@dataclass(frozen=True)
class KBounds:
    """Coefficient bounds over the compact solution range."""

    sup_a1: float
    sup_a0_plus: float
    sup_a2: float
    inf_a2: float

    def as_dict(self):
        return {"sup_a1": self.sup_a1, "sup_a0_plus": self.sup_a0_plus,
                "sup_a2": self.sup_a2, "inf_a2": self.inf_a2}


def coefficient_bounds(chart, h_range, mu_range, n=(201, 201)) -> KBounds:
    """Sampled sup/inf of the coefficients over an (h, mu) box."""
    hs = np.linspace(h_range[0], h_range[1], n[0])
    mus = np.linspace(mu_range[0], mu_range[1], n[1])
    H, MU = np.meshgrid(hs, mus, indexing="ij")
    co = coefficients(chart, H, MU)
    return KBounds(
        sup_a1=float(np.max(np.abs(co.a1))),
        sup_a0_plus=float(np.max(np.maximum(co.a0, 0.0))),
        sup_a2=float(np.max(co.a2)),
        inf_a2=float(np.min(co.a2)),
    )


def threshold(bounds: KBounds, nu: float) -> float:
    """Uniform lower bound N <= 0 of the real roots of psi_pm^nu over the box.

    N = -(sup|a1| + sqrt(sup a1^2 + 4 (1-nu) sup a0+ sup a2)) / (2 (1-nu) inf a2);
    zero when sup|a1| = sup a0+ = 0 (no root constrains the data). Initial data
    with y or q below N somewhere forces gradient blowup in finite time.
    """
    if not (0.0 <= nu < 1.0):
        raise ValueError(f"nu must lie in [0, 1), got {nu:g}")
    if bounds.inf_a2 <= 0.0:
        raise HyperbolicityError("threshold requires inf a2 > 0")
    disc = bounds.sup_a1**2 + 4.0 * (1.0 - nu) * bounds.sup_a0_plus * bounds.sup_a2
    return -(bounds.sup_a1 + math.sqrt(disc)) / (2.0 * (1.0 - nu) * bounds.inf_a2)


def lifespan_bound(y0: float, threshold_N: float, a2_floor: float, nu: float) -> float:
    """Upper bound on the blowup time for data with min y0 < N.

    Along the critical characteristic 1/y(t) >= 1/y0 + nu * int a2 dt, so the
    bound is T = -1 / (nu * a2_floor * y0) provided a2 >= a2_floor on the path.
    """
    if y0 >= threshold_N:
        raise NotApplicableError(
            f"y0 = {y0:g} does not lie below the threshold N = {threshold_N:g}"
        )
    if a2_floor <= 0.0:
        raise HyperbolicityError("lifespan bound requires a positive a2 floor")
    if nu <= 0.0 or nu >= 1.0:
        raise ValueError("lifespan bound requires nu in (0, 1)")
    return -1.0 / (nu * a2_floor * y0)


@dataclass
class ReferenceTrajectory:
    t: np.ndarray
    y: np.ndarray
    blowup_time: Optional[float]
    status: str


def integrate_reference(coeff_fn: Callable, branch: int, y0: float, t_final: float,
                        rtol=1e-9, atol=1e-12, blowup_cut=BLOWUP_VALUE) -> ReferenceTrajectory:
    """Integrate xi' = a0(t) +- a1(t) xi - a2(t) xi^2 along a coefficient history.

    ``coeff_fn(t)`` returns (a0, a1, a2). Integration is adaptive RK45; a
    blowup event fires when |xi| exceeds ``blowup_cut`` and the event time is
    reported as the blowup time.
    """

    def rhs(t, state):
        a0, a1, a2 = coeff_fn(t)
        xi = state[0]
        return [a0 + branch * a1 * xi - a2 * xi**2]

    def blow(t, state):
        return abs(state[0]) - blowup_cut

    blow.terminal = True
    blow.direction = 1

    sol = solve_ivp(rhs, (0.0, t_final), [float(y0)], method="RK45",
                    rtol=rtol, atol=atol, events=blow, dense_output=False,
                    max_step=t_final)
    if sol.status == -1:
        raise IntegrationError(f"reference integration failed: {sol.message}")
    blowup_time = None
    if sol.t_events[0].size:
        blowup_time = float(sol.t_events[0][0])
    return ReferenceTrajectory(t=sol.t, y=sol.y[0], blowup_time=blowup_time,
                               status="blowup" if blowup_time is not None else "complete")

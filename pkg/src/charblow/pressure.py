"""Pressure-law models p(v, x) with the derivative set the gradient machinery needs.

Every law reports, at a point (v, x) of its validity domain:

    p, p_v, p_vv, p_x, p_xv, p_xx, c = sqrt(-p_v), c_v, c_x

where the x-derivatives are taken at fixed v (the material coordinate enters
explicitly through entropy or field profiles). Hyperbolicity requires p_v < 0
and genuine nonlinearity p_vv > 0 throughout the domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, HyperbolicityError, ModelError
from .profiles import ConstantProfile, Profile

__all__ = [
    "Domain",
    "PressureRecord",
    "PressureLaw",
    "GammaLaw",
    "MhdLaw",
    "TabulatedLaw",
    "make_isentropic_law",
    "make_gamma_law",
    "make_mhd_law",
    "make_tabulated_law",
    "validate_law",
]


@dataclass(frozen=True)
class Domain:
    """Rectangular validity domain in (v, x)."""

    v_min: float = 1e-9
    v_max: float = 1e12
    x_min: float = -1e6
    x_max: float = 1e6

    def check(self, v, x):
        v = np.asarray(v, dtype=float)
        x = np.asarray(x, dtype=float)
        if np.any(v < self.v_min) or np.any(v > self.v_max):
            bad = float(np.min(v)) if np.any(v < self.v_min) else float(np.max(v))
            bound = "v_min" if np.any(v < self.v_min) else "v_max"
            raise DomainError(f"v={bad:g} violates {bound} of [{self.v_min:g}, {self.v_max:g}]")
        if np.any(x < self.x_min) or np.any(x > self.x_max):
            bad = float(np.min(x)) if np.any(x < self.x_min) else float(np.max(x))
            bound = "x_min" if np.any(x < self.x_min) else "x_max"
            raise DomainError(f"x={bad:g} violates {bound} of [{self.x_min:g}, {self.x_max:g}]")


@dataclass(frozen=True)
class PressureRecord:
    """Pointwise derivative record of a pressure law (x-derivatives at fixed v)."""

    p: np.ndarray
    p_v: np.ndarray
    p_vv: np.ndarray
    p_x: np.ndarray
    p_xv: np.ndarray
    p_xx: np.ndarray
    c: np.ndarray
    c_v: np.ndarray
    c_x: np.ndarray


class PressureLaw:
    """Base class for pressure models.

    Evaluation is pure and vectorized; instances are safe to share read-only
    across workers.
    """

    name = "law"

    def __init__(self, domain: Domain, v_star: float, tail_exponent: Optional[float],
                 isentropic: bool, params: dict):
        self.domain = domain
        self.v_star = v_star
        self.tail_exponent = tail_exponent
        self.isentropic = isentropic
        self.params = dict(params)
        if not math.isinf(v_star) and not (domain.v_min <= v_star <= domain.v_max * 1.0000001):
            raise ModelError(f"v_star={v_star:g} outside validity domain")
        if math.isinf(v_star) and tail_exponent is not None and tail_exponent <= 1.0:
            raise ModelError(
                "wavespeed tail decays too slowly for v_star = inf; supply a finite v_star"
            )

    def _kernel(self, v, x) -> PressureRecord:
        raise NotImplementedError

    def evaluate(self, v, x, check=True) -> PressureRecord:
        """Full derivative record at (v, x); raises DomainError/HyperbolicityError."""
        v = np.asarray(v, dtype=float)
        x = np.asarray(x, dtype=float)
        if check:
            self.domain.check(v, x)
        rec = self._kernel(v, x)
        if check and np.any(rec.p_v >= 0.0):
            raise HyperbolicityError("p_v >= 0 at an evaluation point")
        return rec


class GammaLaw(PressureLaw):
    """Polytropic law p = K exp(S(x)/c_v) v^(-gamma) with a smooth entropy profile.

    With a constant entropy profile this is the isentropic law of the p-system.
    """

    name = "gamma"

    def __init__(self, gamma: float, K: float = 1.0, entropy: Optional[Profile] = None,
                 c_v: float = 1.0, domain: Optional[Domain] = None):
        if gamma <= 1.0:
            raise ModelError(f"gamma must exceed 1, got {gamma:g}")
        if K <= 0.0:
            raise ModelError(f"K must be positive, got {K:g}")
        self.gamma = float(gamma)
        self.K = float(K)
        self.c_v = float(c_v)
        self.entropy = entropy if entropy is not None else ConstantProfile(level=0.0)
        isen = self.entropy.is_constant
        super().__init__(
            domain=domain or Domain(),
            v_star=math.inf,
            tail_exponent=(gamma + 1.0) / 2.0,
            isentropic=isen,
            params={"gamma": gamma, "K": K, "c_v": c_v, "entropy": self.entropy.name},
        )

    def _coeff(self, x):
        """A1(x) = K exp(S/c_v) and its two x-derivatives."""
        S = self.entropy.value(x)
        S1 = self.entropy.d1(x) / self.c_v
        S2 = self.entropy.d2(x) / self.c_v
        A = self.K * np.exp(S / self.c_v)
        return A, A * S1, A * (S1**2 + S2)

    def _kernel(self, v, x):
        g = self.gamma
        A, A1, A2 = self._coeff(x)
        vp = v ** (-g)
        p = A * vp
        p_v = -g * A * v ** (-g - 1.0)
        p_vv = (g * (g + 1.0)) * A * v ** (-g - 2.0)
        c = np.sqrt(g * A) * v ** (-(g + 1.0) / 2.0)
        return PressureRecord(
            p=p,
            p_v=p_v,
            p_vv=p_vv,
            p_x=A1 * vp,
            p_xv=-g * A1 * v ** (-g - 1.0),
            p_xx=A2 * vp,
            c=c,
            c_v=-((g + 1.0) / 2.0) * c / v,
            c_x=c * A1 / (2.0 * A),
        )


class MhdLaw(PressureLaw):
    """Effective pressure p = B(x) v^(-2) of transverse magnetohydrodynamic flow.

    B(x) collects the gamma=2 gas coefficient and the frozen transverse-field
    energy; it must stay positive.
    """

    name = "mhd"

    def __init__(self, B: Profile, domain: Optional[Domain] = None):
        self.B = B
        dom = domain or Domain()
        xs = np.linspace(dom.x_min, dom.x_max, 2049)
        if np.any(B.value(xs) <= 0.0):
            raise ModelError("B(x) must be positive on the validity domain")
        super().__init__(
            domain=dom,
            v_star=math.inf,
            tail_exponent=1.5,
            isentropic=B.is_constant,
            params={"B": B.name, **{f"B.{k}": v for k, v in B.params.items()}},
        )

    def _kernel(self, v, x):
        B = self.B.value(x)
        B1 = self.B.d1(x)
        B2 = self.B.d2(x)
        v2 = v ** (-2.0)
        c = np.sqrt(2.0 * B) * v ** (-1.5)
        return PressureRecord(
            p=B * v2,
            p_v=-2.0 * B * v ** (-3.0),
            p_vv=6.0 * B * v ** (-4.0),
            p_x=B1 * v2,
            p_xv=-2.0 * B1 * v ** (-3.0),
            p_xx=B2 * v2,
            c=c,
            c_v=-1.5 * c / v,
            c_x=c * B1 / (2.0 * B),
        )


class TabulatedLaw(PressureLaw):
    """User-tabulated p on a rectangular (v, x) grid.

    Cubic-spline interpolation supplies the partial derivatives; sign
    conditions are enforced at evaluation time.
    """

    name = "tabulated"

    def __init__(self, v_nodes, x_nodes, p_values):
        from scipy.interpolate import RectBivariateSpline

        v_nodes = np.asarray(v_nodes, dtype=float)
        x_nodes = np.asarray(x_nodes, dtype=float)
        p_values = np.asarray(p_values, dtype=float)
        if v_nodes.size < 8 or x_nodes.size < 4:
            raise ModelError("tabulated law needs at least an 8x4 sample grid")
        self._spline = RectBivariateSpline(v_nodes, x_nodes, p_values, kx=3, ky=3)
        super().__init__(
            domain=Domain(v_min=float(v_nodes[0]), v_max=float(v_nodes[-1]),
                          x_min=float(x_nodes[0]), x_max=float(x_nodes[-1])),
            v_star=float(v_nodes[-1]),
            tail_exponent=None,
            isentropic=bool(np.allclose(p_values, p_values[:, :1])),
            params={"n_v": int(v_nodes.size), "n_x": int(x_nodes.size)},
        )

    def _kernel(self, v, x):
        v = np.asarray(v, dtype=float)
        x = np.asarray(x, dtype=float)
        v, x = np.broadcast_arrays(v, x)
        shape = v.shape
        vf = v.ravel()
        xf = x.ravel()
        ev = self._spline.ev

        def g(dv, dx_):
            return ev(vf, xf, dx=dv, dy=dx_).reshape(shape)

        p_v = g(1, 0)
        c = np.sqrt(np.maximum(-p_v, 0.0))
        p_vv = g(2, 0)
        safe_c = np.where(c > 0.0, c, 1.0)
        return PressureRecord(
            p=g(0, 0),
            p_v=p_v,
            p_vv=p_vv,
            p_x=g(0, 1),
            p_xv=g(1, 1),
            p_xx=g(0, 2),
            c=c,
            c_v=-p_vv / (2.0 * safe_c),
            c_x=-g(1, 1) / (2.0 * safe_c),
        )


def make_isentropic_law(gamma=2.0, K=1.0, domain=None) -> GammaLaw:
    """Isentropic gamma-law p = K v^(-gamma) (the p-system pressure)."""
    return GammaLaw(gamma=gamma, K=K, entropy=ConstantProfile(level=0.0), domain=domain)


def make_gamma_law(gamma, K=1.0, entropy=None, c_v=1.0, domain=None) -> GammaLaw:
    """Gamma-law with a smooth entropy profile S(x)."""
    return GammaLaw(gamma=gamma, K=K, entropy=entropy, c_v=c_v, domain=domain)


def make_mhd_law(B: Profile, domain=None) -> MhdLaw:
    """Transverse-MHD effective law p = B(x) v^(-2); requires B > 0 with two derivatives."""
    return MhdLaw(B=B, domain=domain)


def make_tabulated_law(v_nodes, x_nodes, p_values) -> TabulatedLaw:
    return TabulatedLaw(v_nodes, x_nodes, p_values)


@dataclass
class ValidationReport:
    """Sign-condition check plus min/max of the chart quantities the theory bounds."""

    ok: bool
    failures: list
    bounds: dict  # name -> (min, max)

    def __str__(self):
        lines = [f"validation: {'pass' if self.ok else 'FAIL'}"]
        for name, (lo, hi) in self.bounds.items():
            lines.append(f"  {name}: [{lo:.6g}, {hi:.6g}]")
        for f in self.failures:
            lines.append(f"  violation: {f}")
        return "\n".join(lines)


def validate_law(law: PressureLaw, sample_grid) -> ValidationReport:
    """Check hyperbolicity/genuine-nonlinearity signs on a sample grid and
    report the ranges of the chart quantities whose bounds the blowup theory
    assumes (both the compactness list |h|, c, c_h, |c_mu|, |c_mumu|, |c_hmu|,
    |p_mu|, |p_mumu| and the lifespan-proof list p_muh, p_muhh, p_mumuh).

    Raises HyperbolicityError (with the offending point) when a sign condition
    fails.
    """
    from . import coords

    pts = np.asarray(sample_grid, dtype=float)
    if pts.size == 0:
        raise ModelError("validate_law needs a nonempty sample grid")
    v = pts[:, 0]
    x = pts[:, 1]
    rec = law.evaluate(v, x, check=False)
    failures = []
    if np.any(rec.p_v >= 0.0):
        i = int(np.argmax(rec.p_v >= 0.0))
        failures.append(f"p_v >= 0 at (v={v[i]:g}, x={x[i]:g})")
    if np.any(rec.p_vv <= 0.0):
        i = int(np.argmax(rec.p_vv <= 0.0))
        failures.append(f"p_vv <= 0 at (v={v[i]:g}, x={x[i]:g})")
    if failures:
        raise HyperbolicityError("; ".join(failures))

    chart = coords.chart_for(law)
    h = chart.h_of_v(v, x)
    mu = x
    c = chart.c(h, mu)
    c_h = chart.c_h(h, mu)
    p_mu = chart.p_mu(h, mu)

    d = 1e-4 * max(1.0, float(np.max(np.abs(mu))) or 1.0)
    dh = 1e-4 * max(1.0, float(np.max(np.abs(h))))

    def fd_mu(f, order=1):
        if order == 1:
            return (f(h, mu + d) - f(h, mu - d)) / (2 * d)
        return (f(h, mu + d) - 2.0 * f(h, mu) + f(h, mu - d)) / d**2

    c_mu = fd_mu(chart.c, 1)
    c_mumu = fd_mu(chart.c, 2)
    c_hmu = fd_mu(chart.c_h, 1)
    p_mumu = fd_mu(chart.p_mu, 2)
    p_muh = (chart.p_mu(h + dh, mu) - chart.p_mu(h - dh, mu)) / (2 * dh)
    p_muhh = (chart.p_mu(h + dh, mu) - 2 * p_mu + chart.p_mu(h - dh, mu)) / dh**2
    p_mumuh = ((chart.p_mu(h + dh, mu + d) - chart.p_mu(h + dh, mu - d)
                - chart.p_mu(h - dh, mu + d) + chart.p_mu(h - dh, mu - d))
               / (4 * dh * d))

    if np.any(c_h <= 0.0):
        i = int(np.argmax(c_h <= 0.0))
        raise HyperbolicityError(f"c_h <= 0 at (v={v[i]:g}, x={x[i]:g})")

    def rng(a):
        return (float(np.min(a)), float(np.max(a)))

    bounds = {
        "abs_h": rng(np.abs(h)),
        "c": rng(c),
        "c_h": rng(c_h),
        "abs_c_mu": rng(np.abs(c_mu)),
        "abs_c_mumu": rng(np.abs(c_mumu)),
        "abs_c_hmu": rng(np.abs(c_hmu)),
        "abs_p_mu": rng(np.abs(p_mu)),
        "abs_p_mumu": rng(np.abs(p_mumu)),
        "abs_p_muh": rng(np.abs(p_muh)),
        "abs_p_muhh": rng(np.abs(p_muhh)),
        "abs_p_mumuh": rng(np.abs(p_mumuh)),
    }
    return ValidationReport(ok=True, failures=[], bounds=bounds)

"""Shared numerical kernels: finite differences, interpolation, quadrature."""
from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import GridError, NumericalError

#: default absolute tolerance for chart quadratures
QUAD_TOL = 1e-10
QUAD_MAX_DEPTH = 40


def gradient_4th(f, dx, periodic=True):
    """Spatial derivative of a nodal field.

    4th-order central differences on interior nodes; for non-periodic grids
    the outermost two nodes on each side use 2nd-order one-sided stencils.
    """
    f = np.asarray(f, dtype=float)
    n = f.shape[-1]
    if n < 5:
        raise GridError(f"gradient stencil needs at least 5 nodes, got {n}")
    if periodic:
        fm2 = np.roll(f, 2, axis=-1)
        fm1 = np.roll(f, 1, axis=-1)
        fp1 = np.roll(f, -1, axis=-1)
        fp2 = np.roll(f, -2, axis=-1)
        return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * dx)
    out = np.empty_like(f)
    out[..., 2:-2] = (f[..., :-4] - 8.0 * f[..., 1:-3] + 8.0 * f[..., 3:-1] - f[..., 4:]) / (
        12.0 * dx
    )
    out[..., 0] = (-3.0 * f[..., 0] + 4.0 * f[..., 1] - f[..., 2]) / (2.0 * dx)
    out[..., 1] = (f[..., 2] - f[..., 0]) / (2.0 * dx)
    out[..., -2] = (f[..., -1] - f[..., -3]) / (2.0 * dx)
    out[..., -1] = (3.0 * f[..., -1] - 4.0 * f[..., -2] + f[..., -3]) / (2.0 * dx)
    return out


def interp_cubic(x_lo, dx, values, xq, periodic=True):
    """Piecewise-cubic Lagrange interpolation on a uniform grid, O(dx^4).

    ``values`` may have leading axes; interpolation acts on the last axis.
    For non-periodic grids the stencil is clamped inside the domain.
    """
    values = np.asarray(values, dtype=float)
    xq = np.asarray(xq, dtype=float)
    n = values.shape[-1]
    s = (xq - x_lo) / dx
    if periodic:
        i0 = np.floor(s).astype(int)
        frac = s - i0
        idx = np.stack([(i0 + k) % n for k in (-1, 0, 1, 2)])
    else:
        i0 = np.clip(np.floor(s).astype(int), 1, n - 3)
        frac = s - i0
        idx = np.stack([i0 + k for k in (-1, 0, 1, 2)])
    t = frac
    w_m1 = -t * (t - 1.0) * (t - 2.0) / 6.0
    w_0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0
    w_p1 = -(t + 1.0) * t * (t - 2.0) / 2.0
    w_p2 = (t + 1.0) * t * (t - 1.0) / 6.0
    vals = values[..., idx]  # (..., 4, nq)
    return w_m1 * vals[..., 0, :] + w_0 * vals[..., 1, :] + w_p1 * vals[..., 2, :] + w_p2 * vals[..., 3, :]


def adaptive_simpson(f, a, b, tol=QUAD_TOL, max_depth=QUAD_MAX_DEPTH):
    """Adaptive Simpson quadrature with Richardson correction, absolute tol.

    ``f`` must accept numpy arrays; evaluation is batched per refinement level
    so vectorized integrands stay fast.
    """
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    # level 0
    xs = np.array([a, 0.5 * (a + b), b])
    fs = np.asarray(f(xs), dtype=float)
    if not np.all(np.isfinite(fs)):
        raise NumericalError("adaptive_simpson: non-finite integrand")
    # active intervals: (a, m, b, fa, fm, fb, whole)
    h = b - a
    whole = h / 6.0 * (fs[0] + 4.0 * fs[1] + fs[2])
    active = [(a, b, fs[0], fs[1], fs[2], whole, tol)]
    total = 0.0
    for _ in range(max_depth):
        if not active:
            return total
        lows = np.array([iv[0] for iv in active])
        highs = np.array([iv[1] for iv in active])
        mids = 0.5 * (lows + highs)
        lm = 0.5 * (lows + mids)
        rm = 0.5 * (mids + highs)
        fvals = np.asarray(f(np.concatenate([lm, rm])), dtype=float)
        if not np.all(np.isfinite(fvals)):
            raise NumericalError("adaptive_simpson: non-finite integrand")
        flm = fvals[: len(active)]
        frm = fvals[len(active):]
        nxt = []
        for k, (lo, hi, fa, fm, fb, whole_k, tol_k) in enumerate(active):
            m = 0.5 * (lo + hi)
            h2 = (hi - lo) / 12.0
            left = h2 * (fa + 4.0 * flm[k] + fm)
            right = h2 * (fm + 4.0 * frm[k] + fb)
            delta = left + right - whole_k
            if abs(delta) <= 15.0 * tol_k:
                total += left + right + delta / 15.0
            else:
                nxt.append((lo, m, fa, flm[k], fm, left, tol_k / 2.0))
                nxt.append((m, hi, fm, frm[k], fb, right, tol_k / 2.0))
        active = nxt
    if active:
        raise NumericalError(
            f"adaptive_simpson: tolerance {tol:g} not met within depth {max_depth}"
        )
    return total


_GAUSS_CACHE: dict = {}


def gauss_unit_rule(panels=12, order=12):
    """Composite Gauss-Legendre nodes/weights on [0, 1]."""
    key = (panels, order)
    if key not in _GAUSS_CACHE:
        xg, wg = leggauss(order)
        edges = np.linspace(0.0, 1.0, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
        weights = (half[:, None] * wg[None, :]).ravel()
        _GAUSS_CACHE[key] = (nodes, weights)
    return _GAUSS_CACHE[key]


def deriv_nonuniform(t, y):
    """Derivative of samples y(t) on a (possibly non-uniform) 1-D grid.

    Sliding 5-point Lagrange polynomial differentiation, O(dt^4) on smooth
    spacing. Needs at least 5 samples.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    n = t.size
    if n < 5:
        raise GridError("deriv_nonuniform needs at least 5 samples")
    centers = np.clip(np.arange(n), 2, n - 3)
    starts = centers - 2
    idx = starts[:, None] + np.arange(5)[None, :]
    ts = t[idx]  # (n, 5)
    ys = y[idx]
    out = np.zeros(n)
    tq = t[:, None]  # evaluation points
    for j in range(5):
        # derivative of Lagrange basis L_j at tq
        others = [k for k in range(5) if k != j]
        denom = np.prod([ts[:, j] - ts[:, k] for k in others], axis=0)
        num = np.zeros(n)
        for skip in others:
            term = np.ones(n)
            for k in others:
                if k != skip:
                    term *= tq[:, 0] - ts[:, k]
            num += term
        out += ys[:, j] * num / denom
    return out


def newton_solve(f, fprime, x0, tol=1e-13, max_iter=60, lo=None, hi=None):
    """Vectorized damped Newton iteration with optional bracketing clip."""
    x = np.asarray(x0, dtype=float).copy()
    for _ in range(max_iter):
        r = f(x)
        d = fprime(x)
        step = r / d
        x_new = x - step
        if lo is not None or hi is not None:
            x_new = np.clip(x_new, lo, hi)
        if np.all(np.abs(x_new - x) <= tol * (1.0 + np.abs(x_new))):
            return x_new
        x = x_new
    if not np.all(np.isfinite(x)):
        raise NumericalError("newton_solve: iteration diverged")
    return x

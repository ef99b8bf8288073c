"""Smooth scalar profiles g(x) with two derivatives.

Used for entropy fields S(x), the transverse-field coefficient B(x), and duct
area laws a(x). All profiles are vectorized over numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError


@dataclass(frozen=True)
class Profile:
    """Base profile; subclasses implement value/d1/d2."""

    name: str = "profile"
    params: dict = field(default_factory=dict)

    def value(self, x):
        raise NotImplementedError

    def d1(self, x):
        raise NotImplementedError

    def d2(self, x):
        raise NotImplementedError

    @property
    def is_constant(self) -> bool:
        return False

    def __call__(self, x):
        return self.value(x)


@dataclass(frozen=True)
class ConstantProfile(Profile):
    level: float = 1.0

    def value(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.level)

    def d1(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    d2 = d1

    @property
    def is_constant(self) -> bool:
        return True


@dataclass(frozen=True)
class LinearProfile(Profile):
    base: float = 1.0
    slope: float = 0.0

    def value(self, x):
        return self.base + self.slope * np.asarray(x, dtype=float)

    def d1(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.slope)

    def d2(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class SinusoidalProfile(Profile):
    base: float = 1.0
    amp: float = 0.1
    wavenumber: float = 1.0
    phase: float = 0.0

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self.base + self.amp * np.sin(self.wavenumber * x + self.phase)

    def d1(self, x):
        x = np.asarray(x, dtype=float)
        return self.amp * self.wavenumber * np.cos(self.wavenumber * x + self.phase)

    def d2(self, x):
        x = np.asarray(x, dtype=float)
        return -self.amp * self.wavenumber**2 * np.sin(self.wavenumber * x + self.phase)


@dataclass(frozen=True)
class TanhProfile(Profile):
    """Smooth step: base + amp * tanh((x - center)/width)."""

    base: float = 1.0
    amp: float = 0.1
    center: float = 0.0
    width: float = 1.0

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self.base + self.amp * np.tanh((x - self.center) / self.width)

    def d1(self, x):
        x = np.asarray(x, dtype=float)
        s = 1.0 / np.cosh((x - self.center) / self.width)
        return self.amp / self.width * s**2

    def d2(self, x):
        x = np.asarray(x, dtype=float)
        z = (x - self.center) / self.width
        return -2.0 * self.amp / self.width**2 * np.tanh(z) / np.cosh(z) ** 2


_PRESETS = {
    "constant": (ConstantProfile, ("level",)),
    "linear": (LinearProfile, ("base", "slope")),
    "sinusoidal": (SinusoidalProfile, ("base", "amp", "wavenumber", "phase")),
    "tanh": (TanhProfile, ("base", "amp", "center", "width")),
}


def make_profile(kind: str, **params) -> Profile:
    """Build a preset profile by name. Unknown names or params raise ModelError."""
    if kind not in _PRESETS:
        raise ModelError(f"unknown profile preset {kind!r}; choose from {sorted(_PRESETS)}")
    cls, allowed = _PRESETS[kind]
    bad = sorted(set(params) - set(allowed))
    if bad:
        raise ModelError(f"profile {kind!r} does not accept parameter(s) {bad}")
    return cls(name=kind, params=dict(params), **params)

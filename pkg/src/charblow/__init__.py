"""charblow: gradient dynamics and singularity formation for 1-D nonlinear waves.

Library layout:

- ``pressure``:  pluggable pressure laws p(v, x) with derivative records
- ``coords``:    the (v, x) <-> (h, mu) chart and the integrating factor I
- ``gradients``: alpha/beta/y/q gradient variables and R/C classification
- ``riccati``:   Riccati coefficients, blowup threshold N, lifespan bounds
- ``solver``:    2nd-order finite-difference solver and characteristic tracer
- ``duct``:      variable-area duct system in Lagrangian (z, u, m) variables
- ``config``/``cli``: run configuration and the ``charblow`` command
"""

from . import coords, duct, gradients, pressure, profiles, riccati, solver
from .errors import (
    CharblowError,
    ConfigError,
    DomainError,
    DomainExitError,
    GridError,
    HyperbolicityError,
    IntegrationError,
    ModelError,
    NotApplicableError,
    NumericalError,
)

__all__ = [
    "coords", "duct", "gradients", "pressure", "profiles", "riccati", "solver",
    "CharblowError", "ConfigError", "DomainError", "DomainExitError", "GridError",
    "HyperbolicityError", "IntegrationError", "ModelError", "NotApplicableError",
    "NumericalError",
]

__version__ = "0.1.0"

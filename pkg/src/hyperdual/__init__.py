"""Special functions and numerical checks for duality-derived integral identities."""
from .errors import HyperdualError
from .identities import REGISTRY, FugacityVector, SPDualityParams, get_identity
from .quad import ContourSpec, line_integrate, torus_integrate, unit_circle_integrate
from .series import TruncatedSeries, expand_e6
from .specfun import (
    DEFAULT_POLICY,
    EllipticBase,
    ModularPair,
    TruncationPolicy,
    bernoulli_b22,
    double_pochhammer,
    elliptic_gamma,
    hyperbolic_gamma,
    q_pochhammer_inf,
)
from .verify import SamplerConfig, sample_params, sweep, verify_identity

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_POLICY",
    "REGISTRY",
    "ContourSpec",
    "EllipticBase",
    "FugacityVector",
    "HyperdualError",
    "ModularPair",
    "SPDualityParams",
    "SamplerConfig",
    "TruncatedSeries",
    "TruncationPolicy",
    "bernoulli_b22",
    "double_pochhammer",
    "elliptic_gamma",
    "expand_e6",
    "get_identity",
    "hyperbolic_gamma",
    "line_integrate",
    "q_pochhammer_inf",
    "sample_params",
    "sweep",
    "torus_integrate",
    "unit_circle_integrate",
    "verify_identity",
]

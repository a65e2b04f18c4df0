"""Periodic trapezoid rules on the unit circle and torus, and a truncated
trapezoid rule along the imaginary axis.

Integrands are vectorised callables: they receive numpy arrays of nodes and
return arrays of values of the same shape.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DimensionTooLarge,
    QuadratureNotConverged,
    TailNotDecaying,
    TruncationNotConverged,
)
from .specfun import DEFAULT_POLICY, TruncationPolicy

MAX_TORUS_DIM = 2
KINDS = ("unit_circle", "torus", "imaginary_axis")


@dataclass(frozen=True)
class ContourSpec:
    kind: str = "unit_circle"
    n_points: int = 16
    dim: int = 1
    axis_cutoff: float = 6.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown contour kind {self.kind!r}")
        if self.n_points < 8:
            raise ValueError("n_points must be >= 8")
        if self.dim < 1:
            raise ValueError("torus dimension must be >= 1")
        if self.kind == "imaginary_axis" and not self.axis_cutoff > 0:
            raise ValueError("axis_cutoff must be positive")


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    n_points: int
    converged: bool
    axis_cutoff: float | None = None

    def __complex__(self):
        return complex(self.value)


def point_cap(policy: TruncationPolicy) -> int:
    """Per-dimension node cap; HYPERDUAL_MAX_POINTS can only lower it."""
    cap = policy.max_points
    env = os.environ.get("HYPERDUAL_MAX_POINTS")
    if env:
        cap = min(cap, int(env))
    return cap


def _torus_rule(f: Callable, dim: int, n: int):
    theta = 2 * np.pi * np.arange(n) / n
    nodes = np.exp(1j * theta)
    if dim == 1:
        vals = np.asarray(f(nodes), dtype=complex)
    else:
        grids = np.meshgrid(*([nodes] * dim), indexing="ij")
        vals = np.asarray(f(*grids), dtype=complex)
    # fixed summation order keeps results bit-reproducible
    return complex(vals.sum() / vals.size), float(np.abs(vals).mean())


def _adaptive_torus(f: Callable, dim: int, spec: ContourSpec, policy: TruncationPolicy):
    cap = point_cap(policy)
    n = min(spec.n_points, cap)
    value, scale = _torus_rule(f, dim, n)
    if not policy.adaptive:
        coarse = n // 2
        err = abs(value - _torus_rule(f, dim, coarse)[0]) if coarse >= 4 else float("nan")
        return QuadResult(value, err, n, True)
    while True:
        if 2 * n > cap:
            raise QuadratureNotConverged(
                f"torus rule not converged at {n} points per dimension (cap {cap})"
            )
        n *= 2
        new, scale = _torus_rule(f, dim, n)
        err = abs(new - value)
        value = new
        if err <= policy.quad_tolerance * max(abs(value), scale):
            return QuadResult(value, err, n, True)


def unit_circle_integrate(integrand: Callable, spec: ContourSpec | None = None,
                          policy: TruncationPolicy = DEFAULT_POLICY) -> QuadResult:
    """Contour integral of f(z) dz/(2 pi i z) over |z| = 1, positively oriented."""
    spec = spec or ContourSpec()
    return _adaptive_torus(integrand, 1, spec, policy)


def torus_integrate(integrand: Callable, spec: ContourSpec | None = None,
                    policy: TruncationPolicy = DEFAULT_POLICY,
                    max_dim: int = MAX_TORUS_DIM) -> QuadResult:
    """Tensor-product trapezoid rule on the N-torus, N = spec.dim."""
    spec = spec or ContourSpec(kind="torus")
    if spec.dim > max_dim:
        raise DimensionTooLarge(f"torus dimension {spec.dim} exceeds cap {max_dim}")
    return _adaptive_torus(integrand, spec.dim, spec, policy)


def _eval_axis(f, y):
    return np.asarray(f(1j * np.asarray(y, dtype=float)), dtype=complex)


def _choose_cutoff(f, spec: ContourSpec, policy: TruncationPolicy) -> float:
    cutoff = spec.axis_cutoff
    max_cutoff = 16 * spec.axis_cutoff
    while True:
        ys = np.linspace(-cutoff, cutoff, 65)
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                mags = np.abs(_eval_axis(f, ys))
        except TruncationNotConverged:
            mags = np.array([np.inf])
        if not np.all(np.isfinite(mags)):
            raise QuadratureNotConverged(
                f"integrand overflows at cutoff {cutoff:g} before decaying below tolerance"
            )
        mid = mags[32]
        peak = mags.max()
        tail = max(mags[0], mags[-1])
        if peak == 0 or tail <= 1e-2 * policy.quad_tolerance * peak:
            return cutoff
        if not policy.adaptive or cutoff >= max_cutoff:
            if tail > mid:
                raise TailNotDecaying(
                    f"|f(+-i{cutoff:g})| = {tail:.3g} exceeds midpoint value {mid:.3g}"
                )
            if not policy.adaptive:
                return cutoff
            raise QuadratureNotConverged(
                f"integrand tail {tail:.3g} still above tolerance at cutoff {cutoff:g}"
            )
        cutoff *= 1.5


def line_integrate(integrand: Callable, spec: ContourSpec | None = None,
                   policy: TruncationPolicy = DEFAULT_POLICY,
                   measure: complex = 1.0) -> QuadResult:
    """Integral of f(u) du / (i*measure) along u in [-iL, iL].

    With measure = sqrt(omega1*omega2) this is the hyperbolic integration
    measure. L is grown until the integrand has decayed below tolerance.
    """
    spec = spec or ContourSpec(kind="imaginary_axis")
    cap = point_cap(policy)
    cutoff = _choose_cutoff(integrand, spec, policy)
    n = min(spec.n_points, cap)
    h = 2 * cutoff / n
    vals = _eval_axis(integrand, np.linspace(-cutoff, cutoff, n + 1))
    total = complex(vals.sum() - 0.5 * (vals[0] + vals[-1]))
    value = h * total / measure
    scale = float(np.abs(vals).mean()) * 2 * cutoff / abs(measure)
    if not policy.adaptive:
        return QuadResult(value, float("nan"), n, True, cutoff)
    while True:
        if 2 * n > cap:
            raise QuadratureNotConverged(f"axis rule not converged at {n} points (cap {cap})")
        mids = -cutoff + h * (np.arange(n) + 0.5)
        total += complex(_eval_axis(integrand, mids).sum())
        n *= 2
        h /= 2
        new = h * total / measure
        err = abs(new - value)
        value = new
        if err <= policy.quad_tolerance * max(abs(value), scale):
            return QuadResult(value, err, n, True, cutoff)

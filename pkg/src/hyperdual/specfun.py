"""Special functions: q-Pochhammer symbols, elliptic and hyperbolic gamma.

All evaluators accept a scalar or an array of arguments and work in log
space internally, so that ratios of large products (the hyperbolic gamma
far along the imaginary axis, elliptic gammas at nomes close to the unit
circle) neither overflow nor lose the phase.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    NomeOutOfDomain,
    PoleProximity,
    TruncationNotConverged,
    UnsupportedRegime,
)

# elements per chunk when broadcasting arguments against a product grid
_CHUNK_ELEMENTS = 2_000_000


@dataclass(frozen=True)
class TruncationPolicy:
    """Cutoffs and tolerances shared by every evaluator.

    ``tail_tolerance`` bounds the omitted tail of infinite products,
    ``quad_tolerance`` the relative self-convergence of quadratures and
    monopole sums. ``pole_guard`` is the smallest admissible magnitude of a
    denominator factor.
    """

    max_product_index: int = 2000
    tail_tolerance: float = 1e-16
    adaptive: bool = True
    pole_guard: float = 1e-10
    quad_tolerance: float = 1e-12
    max_points: int = 4096

    def __post_init__(self):
        if self.max_product_index < 1:
            raise ValueError("max_product_index must be >= 1")
        if not self.tail_tolerance > 0:
            raise ValueError("tail_tolerance must be positive")
        if not self.quad_tolerance > 0:
            raise ValueError("quad_tolerance must be positive")
        if self.pole_guard < 0:
            raise ValueError("pole_guard must be non-negative")
        if self.max_points < 8:
            raise ValueError("max_points must be >= 8")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class EllipticBase:
    p: complex
    q: complex

    def __post_init__(self):
        object.__setattr__(self, "p", complex(self.p))
        object.__setattr__(self, "q", complex(self.q))
        if not (abs(self.p) < 1 and abs(self.q) < 1):
            raise NomeOutOfDomain(f"need |p|, |q| < 1, got p={self.p}, q={self.q}")

    @property
    def pq(self) -> complex:
        return self.p * self.q

    def swapped(self) -> "EllipticBase":
        return EllipticBase(self.q, self.p)


@dataclass(frozen=True)
class ModularPair:
    """Quasi-periods (omega1, omega2) with Im(omega1/omega2) > 0."""

    omega1: complex
    omega2: complex

    def __post_init__(self):
        w1, w2 = complex(self.omega1), complex(self.omega2)
        object.__setattr__(self, "omega1", w1)
        object.__setattr__(self, "omega2", w2)
        if w1 == 0 or w2 == 0:
            raise ValueError("quasi-periods must be nonzero")
        im = (w1 / w2).imag
        if abs(im) <= 1e-14 * abs(w1 / w2):
            raise UnsupportedRegime(
                "Im(omega1/omega2) = 0: the product formula has |q| = 1 there"
            )
        if im < 0:
            raise UnsupportedRegime(
                "Im(omega1/omega2) < 0; use ModularPair.oriented to swap"
            )

    @classmethod
    def oriented(cls, omega1: complex, omega2: complex) -> "ModularPair":
        """Build a pair, swapping the entries if needed so Im(omega1/omega2) > 0."""
        w1, w2 = complex(omega1), complex(omega2)
        if w2 != 0 and (w1 / w2).imag < 0:
            w1, w2 = w2, w1
        return cls(w1, w2)

    @property
    def total(self) -> complex:
        return self.omega1 + self.omega2

    @property
    def measure(self) -> complex:
        """sqrt(omega1*omega2), principal branch."""
        return complex(np.sqrt(self.omega1 * self.omega2))


def _as_array(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _finish(values, scalar):
    return complex(values) if scalar else values


def _n_factors(scale: float, r: float, denom: float, policy: TruncationPolicy) -> int:
    """Smallest M >= 1 with scale * r**M / denom < tail_tolerance."""
    if not policy.adaptive:
        return policy.max_product_index
    if not math.isfinite(scale):
        raise TruncationNotConverged("product argument overflowed double precision")
    if scale == 0 or r == 0:
        return 1
    target = policy.tail_tolerance * denom
    m = max(1, math.ceil(math.log(scale / target) / -math.log(r)))
    # ceil can land one short from rounding in the logs
    while scale * r**m >= target:
        m += 1
    if m > policy.max_product_index:
        raise TruncationNotConverged(
            f"product needs {m} factors, cap is {policy.max_product_index}"
        )
    return m


def _powers(base: complex, n: int) -> np.ndarray:
    out = np.empty(n, dtype=complex)
    out[0] = 1.0
    if n > 1:
        out[1:] = np.cumprod(np.full(n - 1, base, dtype=complex))
    return out


def _clog1p(w: np.ndarray) -> np.ndarray:
    """log(1 + w) for complex w, accurate for small |w|.

    numpy's complex log1p forms 1 + w first and loses the relative accuracy.
    """
    a, b = w.real, w.imag
    with np.errstate(divide="ignore", invalid="ignore"):
        small = 0.5 * np.log1p(a * (2 + a) + b * b) + 1j * np.arctan2(b, 1 + a)
        return np.where(np.abs(w) < 0.5, small, np.log(1 + w))


def _log_product(z: np.ndarray, grid: np.ndarray, policy: TruncationPolicy, guard: bool):
    """sum over the grid of log(1 - z*g), evaluated chunkwise over z."""
    flat_z = z.reshape(-1)
    flat_g = grid.reshape(-1)
    out = np.empty(flat_z.shape, dtype=complex)
    step = max(1, _CHUNK_ELEMENTS // max(1, flat_g.size))
    with np.errstate(divide="ignore", invalid="ignore"):
        for start in range(0, flat_z.size, step):
            terms = flat_z[start:start + step, None] * flat_g[None, :]
            if guard and policy.pole_guard > 0:
                near = np.abs(1.0 - terms) < policy.pole_guard
                if near.any():
                    k = np.argwhere(near)[0]
                    raise PoleProximity(
                        f"denominator factor 1 - {terms[k[0], k[1]]:.6g} is within "
                        f"{policy.pole_guard:g} of zero"
                    )
            out[start:start + step] = _clog1p(-terms).sum(axis=1)
    return out.reshape(z.shape)


def _series_terms(scale: float, denom: float, product_cost: int,
                  policy: TruncationPolicy) -> int:
    """Terms needed by the log series -sum z^n c_n, or 0 if the product is cheaper.

    Only used for |z| bounded away from 1, where no factor can vanish.
    """
    if not policy.adaptive or scale == 0 or scale >= 0.95:
        return 0
    target = policy.tail_tolerance * denom * (1 - scale)
    n = max(1, math.ceil(math.log(target) / math.log(scale)))
    return n if n < product_cost else 0


def _log_series(z: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """-sum_{n>=1} coeffs[n-1] z^n, evaluated chunkwise."""
    flat = z.reshape(-1)
    out = np.empty(flat.shape, dtype=complex)
    step = max(1, _CHUNK_ELEMENTS // coeffs.size)
    for start in range(0, flat.size, step):
        chunk = flat[start:start + step]
        powers = np.cumprod(np.broadcast_to(chunk[:, None], (chunk.size, coeffs.size)), axis=1)
        out[start:start + step] = -(powers @ coeffs)
    return out.reshape(z.shape)


def log_q_pochhammer(z, q: complex, policy: TruncationPolicy = DEFAULT_POLICY,
                     guard: bool = False):
    """log (z; q)_inf, summed factorwise (the branch is irrelevant after exp)."""
    q = complex(q)
    if not abs(q) < 1:
        raise NomeOutOfDomain(f"need |q| < 1, got {q}")
    z, scalar = _as_array(z)
    scale = float(np.max(np.abs(z))) if z.size else 0.0
    m = _n_factors(scale, abs(q), 1 - abs(q), policy)
    n = _series_terms(scale, 1 - abs(q), m, policy)
    if n:
        k = np.arange(1, n + 1)
        return _finish(_log_series(z, 1 / (k * (1 - _powers(q, n + 1)[1:]))), scalar)
    return _finish(_log_product(z, _powers(q, m), policy, guard), scalar)


def q_pochhammer_inf(z, q: complex, policy: TruncationPolicy = DEFAULT_POLICY):
    """(z; q)_inf = prod_{i>=0} (1 - z q^i)."""
    z, scalar = _as_array(z)
    return _finish(np.exp(log_q_pochhammer(z, q, policy)), scalar)


def log_double_pochhammer(z, base: EllipticBase,
                          policy: TruncationPolicy = DEFAULT_POLICY,
                          guard: bool = False):
    z, scalar = _as_array(z)
    ap, aq = abs(base.p), abs(base.q)
    scale = float(np.max(np.abs(z))) if z.size else 0.0
    # omitted tail is bounded by scale*(|p|^Mp + |q|^Mq)/((1-|p|)(1-|q|))
    denom = 2 * (1 - ap) * (1 - aq)
    mp = _n_factors(scale, ap, denom, policy)
    mq = _n_factors(scale, aq, denom, policy)
    n = _series_terms(scale, (1 - ap) * (1 - aq), mp * mq, policy)
    if n:
        k = np.arange(1, n + 1)
        pk, qk = _powers(base.p, n + 1)[1:], _powers(base.q, n + 1)[1:]
        return _finish(_log_series(z, 1 / (k * (1 - pk) * (1 - qk))), scalar)
    grid = np.outer(_powers(base.p, mp), _powers(base.q, mq))
    return _finish(_log_product(z, grid, policy, guard), scalar)


def double_pochhammer(z, base: EllipticBase, policy: TruncationPolicy = DEFAULT_POLICY):
    """(z; p, q)_inf = prod_{i,j>=0} (1 - z p^i q^j)."""
    z, scalar = _as_array(z)
    return _finish(np.exp(log_double_pochhammer(z, base, policy)), scalar)


def _check_nonzero(z):
    if np.any(z == 0):
        raise PoleProximity("elliptic gamma is singular at z = 0")


def log_elliptic_gamma(z, base: EllipticBase, policy: TruncationPolicy = DEFAULT_POLICY):
    z, scalar = _as_array(z)
    _check_nonzero(z)
    num = log_double_pochhammer(base.pq / z, base, policy)
    den = log_double_pochhammer(z, base, policy, guard=True)
    return _finish(num - den, scalar)


def elliptic_gamma(z, base: EllipticBase, policy: TruncationPolicy = DEFAULT_POLICY):
    """Gamma(z; p, q) = prod (1 - p^{i+1} q^{j+1}/z) / (1 - z p^i q^j)."""
    z, scalar = _as_array(z)
    return _finish(np.exp(log_elliptic_gamma(z, base, policy)), scalar)


def reciprocal_elliptic_gamma(z, base: EllipticBase,
                              policy: TruncationPolicy = DEFAULT_POLICY):
    """1/Gamma(z; p, q); finite (zero) at the poles of Gamma."""
    z, scalar = _as_array(z)
    _check_nonzero(z)
    num = log_double_pochhammer(z, base, policy)
    den = log_double_pochhammer(base.pq / z, base, policy, guard=True)
    with np.errstate(invalid="ignore"):
        return _finish(np.exp(num - den), scalar)


def bernoulli_b22(u, pair: ModularPair | tuple):
    """Second-order multiple Bernoulli polynomial B_{2,2}(u; omega1, omega2).

    ``pair`` may be a ModularPair or any (omega1, omega2) tuple of nonzero
    numbers; the polynomial needs no orientation condition.
    """
    if isinstance(pair, ModularPair):
        w1, w2 = pair.omega1, pair.omega2
    else:
        w1, w2 = (complex(w) for w in pair)
        if w1 == 0 or w2 == 0:
            raise ValueError("quasi-periods must be nonzero")
    u, scalar = _as_array(u)
    val = u * u / (w1 * w2) - u / w1 - u / w2 + w1 / (6 * w2) + w2 / (6 * w1) + 0.5
    return _finish(val, scalar)


def _hyperbolic_parts(u, pair: ModularPair, policy: TruncationPolicy, reciprocal: bool):
    w1, w2 = pair.omega1, pair.omega2
    u, scalar = _as_array(u)
    q_tilde = np.exp(-2j * np.pi * w2 / w1)
    q = np.exp(2j * np.pi * w1 / w2)
    prefactor = -0.5j * np.pi * bernoulli_b22(u, pair)
    with np.errstate(over="ignore", invalid="ignore"):
        x_num = np.exp(2j * np.pi * u / w1) * q_tilde
        x_den = np.exp(2j * np.pi * u / w2)
    num = log_q_pochhammer(x_num, q_tilde, policy, guard=reciprocal)
    den = log_q_pochhammer(x_den, q, policy, guard=not reciprocal)
    return prefactor, num, den, scalar


def log_hyperbolic_gamma(u, pair: ModularPair, policy: TruncationPolicy = DEFAULT_POLICY):
    pre, num, den, scalar = _hyperbolic_parts(u, pair, policy, reciprocal=False)
    return _finish(pre + num - den, scalar)


def hyperbolic_gamma(u, pair: ModularPair, policy: TruncationPolicy = DEFAULT_POLICY):
    """gamma^(2)(u; omega1, omega2) from its q-product representation.

    Both product bases have modulus below one because Im(omega1/omega2) > 0.
    Poles sit at u = -n*omega1 - m*omega2, zeros at omega1 + omega2 plus those.
    """
    pre, num, den, scalar = _hyperbolic_parts(u, pair, policy, reciprocal=False)
    with np.errstate(invalid="ignore"):
        return _finish(np.exp(pre + num - den), scalar)


def reciprocal_hyperbolic_gamma(u, pair: ModularPair,
                                policy: TruncationPolicy = DEFAULT_POLICY):
    """1/gamma^(2)(u); vanishes at the poles of gamma^(2)."""
    pre, num, den, scalar = _hyperbolic_parts(u, pair, policy, reciprocal=True)
    with np.errstate(invalid="ignore"):
        return _finish(np.exp(den - num - pre), scalar)

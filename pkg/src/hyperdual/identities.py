"""Integral identities from supersymmetric dualities, each with an lhs and rhs.

Every public ``*_lhs``/``*_rhs`` function returns a complex number. Passing a
dict as ``diag`` collects convergence diagnostics (quadrature points, error
estimates, cutoffs).

The registry at the bottom maps stable identifiers to :class:`Identity`
objects that evaluate both sides from a flat parameter mapping
``name -> complex``; that is the form used by the verification harness and
the command line.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Mapping

import numpy as np

from .errors import (
    ConstraintViolated,
    DimensionTooLarge,
    NomeOutOfDomain,
    PoleProximity,
    SumNotConverged,
    TailNotDecaying,
    UnknownIdentity,
    UnsupportedRegime,
)
from .quad import (
    MAX_TORUS_DIM,
    ContourSpec,
    line_integrate,
    torus_integrate,
    unit_circle_integrate,
)
from .series import expand_e6
from .specfun import (
    DEFAULT_POLICY,
    EllipticBase,
    ModularPair,
    TruncationPolicy,
    double_pochhammer,
    elliptic_gamma,
    hyperbolic_gamma,
    log_elliptic_gamma,
    log_hyperbolic_gamma,
    log_q_pochhammer,
    q_pochhammer_inf,
    reciprocal_elliptic_gamma,
    reciprocal_hyperbolic_gamma,
)

BALANCE_TOL = 1e-14


# --- parameter types --------------------------------------------------------


@dataclass(frozen=True)
class Balancing:
    """Constraint on a fugacity vector: product or sum equal to ``target``."""

    kind: str = "none"  # "product" | "sum" | "none"
    target: complex = 0j
    note: str = ""

    def residual(self, values) -> float:
        if self.kind == "product":
            return abs(math.prod(values) - self.target) / abs(self.target)
        if self.kind == "sum":
            return abs(sum(values) - self.target) / max(1.0, abs(self.target))
        return 0.0

    def solve_last(self, head) -> complex:
        if self.kind == "product":
            return complex(self.target / math.prod(head))
        if self.kind == "sum":
            return complex(self.target - sum(head))
        raise ValueError("no constraint to solve")

    def describe(self) -> str:
        if self.kind == "product":
            text = f"prod = {self.target:.17g}"
        elif self.kind == "sum":
            text = f"sum = {self.target:.17g}"
        else:
            text = "unconstrained"
        return f"{text}; {self.note}" if self.note else text


@dataclass(frozen=True)
class FugacityVector:
    values: tuple
    balancing: Balancing = field(default_factory=Balancing)

    def __post_init__(self):
        vals = tuple(complex(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        res = self.balancing.residual(vals)
        if res > BALANCE_TOL:
            raise ConstraintViolated(
                f"balancing violated ({self.balancing.describe()}): residual {res:.3g}"
            )

    @classmethod
    def balanced(cls, head, balancing: Balancing) -> "FugacityVector":
        """Append the entry that makes the constraint hold."""
        head = tuple(complex(h) for h in head)
        return cls(head + (balancing.solve_last(head),), balancing)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def array(self) -> np.ndarray:
        return np.array(self.values, dtype=complex)


@dataclass(frozen=True)
class SPDualityParams:
    """SP(2N) with 2*Nf fundamentals and an antisymmetric of R-charge 2/(K+1)."""

    N: int
    K: int
    Nf: int
    fugacities: FugacityVector

    def __post_init__(self):
        if self.N < 1 or self.K < 1 or self.Nf < 1:
            raise ValueError("N, K, Nf must be positive")
        if self.dual_rank < 0:
            raise ValueError(f"dual rank K(Nf-2)-N = {self.dual_rank} is negative")

    @property
    def dual_rank(self) -> int:
        return self.K * (self.Nf - 2) - self.N

    def U(self, base: EllipticBase) -> complex:
        return sp_u(base, self.K)


def sp_u(base: EllipticBase, K: int) -> complex:
    """U = (pq)^(1/(K+1)), principal branch."""
    return complex(base.pq ** (1.0 / (K + 1)))


def sp_elliptic_balancing(base: EllipticBase, N: int, K: int, Nf: int) -> Balancing:
    U = sp_u(base, K)
    target = base.pq**Nf / U ** (2 * (N + K))
    return Balancing("product", target, f"U^{2 * (N + K)} prod s = (pq)^{Nf}")


def sp_elliptic_params(N, K, Nf, base: EllipticBase, head) -> SPDualityParams:
    bal = sp_elliptic_balancing(base, N, K, Nf)
    return SPDualityParams(N, K, Nf, FugacityVector.balanced(head, bal))


def sp_hyperbolic_balancing(pair: ModularPair, N: int, K: int, Nf: int) -> Balancing:
    # The elliptic constraint maps under the scaling to
    #   2(N+K)/(K+1) * (w1+w2) + sum_{i<=2Nf} alpha_i = Nf * (w1+w2).
    # With the last pair integrated out, the 2(Nf-1) remaining alphas are free
    # and the pair sum survives only inside the l-indexed gamma prefactor.
    pair_sum = f"(w1+w2)*({Nf} - {2 * (N + K)}/{K + 1}) - sum(alpha)"
    return Balancing("none", 0j, f"eliminated pair sum alpha' + alpha'' = {pair_sum}")


@dataclass(frozen=True)
class MonopoleSumSpec:
    cutoff: int = 0
    adaptive: bool = True
    max_cutoff: int = 400
    # add the m -> infinity limit of the summand (integral -> 1) beyond the cutoff
    tail_correction: bool = True

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError("cutoff must be >= 0")


@dataclass(frozen=True)
class ReductionScaling:
    """p = e^{2 pi i v w1}, q = e^{2 pi i v w2}, z = e^{2 pi i v u}.

    ``rotation`` is a unit complex number multiplying v. When None, the
    bisecting direction is used, which puts both scaled nomes strictly inside
    the unit disk whenever Im(w1/w2) > 0. rotation=1 takes v literally.
    """

    v: float
    omega: ModularPair
    z_arg: complex
    rotation: complex | None = None

    def __post_init__(self):
        if not self.v > 0:
            raise ValueError("v must be positive")

    @property
    def direction(self) -> complex:
        if self.rotation is not None:
            return complex(self.rotation)
        w1, w2 = self.omega.omega1, self.omega.omega2
        d = np.angle(w1 / w2)
        return complex(np.exp(1j * (np.pi / 2 - d / 2 - np.angle(w2))))


# --- shared integrand builders ----------------------------------------------


def _check_inside(values, what: str, policy: TruncationPolicy, bound: float = 1.0):
    for v in values:
        if not abs(v) < bound - policy.pole_guard:
            raise PoleProximity(f"{what} {v:.6g} has modulus >= {bound}; poles reach the contour")


def _elliptic_bc_integrand(base, params, n, policy, coupling=None):
    """prod_j prod_i Gamma(a_i z_j^{+-}) / Gamma(z_j^{+-2}) times, for n >= 2,
    prod_{i<j} Gamma(U z_i^{+-} z_j^{+-}) / Gamma(z_i^{+-} z_j^{+-})."""
    params = np.asarray(params, dtype=complex)

    def integrand(*zs):
        zs = [np.asarray(z, dtype=complex) for z in zs]
        logs = np.zeros(zs[0].shape, dtype=complex)
        recip = np.ones(zs[0].shape, dtype=complex)
        for z in zs:
            args = np.concatenate([np.multiply.outer(params, z), np.multiply.outer(params, 1 / z)])
            logs += log_elliptic_gamma(args, base, policy).sum(axis=0)
            recip *= reciprocal_elliptic_gamma(np.stack([z * z, 1 / (z * z)]), base, policy).prod(axis=0)
        for zi, zj in combinations(zs, 2):
            pairs = np.stack([zi * zj, zi / zj, zj / zi, 1 / (zi * zj)])
            if coupling is not None:
                logs += log_elliptic_gamma(coupling * pairs, base, policy).sum(axis=0)
            recip *= reciprocal_elliptic_gamma(pairs, base, policy).prod(axis=0)
        return np.exp(logs) * recip

    return integrand


def _vector_prefactor(base, policy, n):
    return (q_pochhammer_inf(base.p, base.p, policy) * q_pochhammer_inf(base.q, base.q, policy)) ** n


def _record(diag, key, result):
    if diag is not None:
        diag[key] = {"n_points": result.n_points, "error": result.error}
        if result.axis_cutoff is not None:
            diag[key]["axis_cutoff"] = result.axis_cutoff


def _beta_balancing(base):
    return Balancing("product", base.pq, "prod t = pq")


def _as_vector(t, balancing: Balancing) -> FugacityVector:
    if isinstance(t, FugacityVector):
        if t.balancing.kind != "none" or balancing.kind == "none":
            return t
        t = t.values
    return FugacityVector(tuple(t), balancing)


# --- elliptic beta integral -------------------------------------------------


def elliptic_beta_lhs(base: EllipticBase, t, spec: ContourSpec | None = None,
                      policy: TruncationPolicy = DEFAULT_POLICY, diag=None) -> complex:
    t = _as_vector(t, _beta_balancing(base))
    if len(t) != 6:
        raise ValueError("elliptic beta integral takes six fugacities")
    _check_inside(t, "fugacity", policy)
    f = _elliptic_bc_integrand(base, t.array(), 1, policy)
    res = unit_circle_integrate(f, spec, policy)
    _record(diag, "lhs_quadrature", res)
    return complex(_vector_prefactor(base, policy, 1) / 2 * res.value)


def elliptic_beta_rhs(base: EllipticBase, t, policy: TruncationPolicy = DEFAULT_POLICY,
                      diag=None) -> complex:
    t = _as_vector(t, _beta_balancing(base))
    if len(t) != 6:
        raise ValueError("elliptic beta integral takes six fugacities")
    _check_inside(t, "fugacity", policy)
    pairs = np.array([a * b for a, b in combinations(t, 2)])
    return complex(np.prod(elliptic_gamma(pairs, base, policy)))


# --- Nassrallah-Rahman (p -> 0) ---------------------------------------------


def nassrallah_rahman_lhs(q: complex, t, spec: ContourSpec | None = None,
                          policy: TruncationPolicy = DEFAULT_POLICY, diag=None) -> complex:
    t = np.array(list(t), dtype=complex)
    if t.size != 5:
        raise ValueError("Nassrallah-Rahman integral takes five fugacities")
    _check_inside(t, "fugacity", policy)
    A = np.prod(t)

    def f(z):
        num = log_q_pochhammer(np.stack([A * z, A / z]), q, policy).sum(axis=0)
        den = log_q_pochhammer(np.concatenate([np.multiply.outer(t, z), np.multiply.outer(t, 1 / z)]),
                               q, policy, guard=True).sum(axis=0)
        zeros = np.exp(log_q_pochhammer(np.stack([z * z, 1 / (z * z)]), q, policy)).prod(axis=0)
        return np.exp(num - den) * zeros

    res = unit_circle_integrate(f, spec, policy)
    _record(diag, "lhs_quadrature", res)
    return complex(q_pochhammer_inf(q, q, policy) / 2 * res.value)


def nassrallah_rahman_rhs(q: complex, t, policy: TruncationPolicy = DEFAULT_POLICY,
                          diag=None) -> complex:
    t = [complex(x) for x in t]
    if len(t) != 5:
        raise ValueError("Nassrallah-Rahman integral takes five fugacities")
    _check_inside(t, "fugacity", policy)
    A = math.prod(t)
    num = np.prod(q_pochhammer_inf(np.array([A / tj for tj in t]), q, policy))
    den = np.prod(q_pochhammer_inf(np.array([a * b for a, b in combinations(t, 2)]), q, policy))
    return complex(num / den)


# --- Seiberg duality for SU(2) with six flavors -----------------------------


def _sqcd_shifted(base: EllipticBase, t, policy):
    t = _as_vector(t, Balancing("product", 1.0, "prod t = 1"))
    if len(t) != 6:
        raise ValueError("SU(2) SQCD index takes six flavor fugacities")
    shift = complex(base.pq ** (1 / 6))
    shifted = [shift * x for x in t]
    _check_inside(shifted, "shifted fugacity (pq)^(1/6) t", policy)
    return t, shifted


def seiberg_sqcd_lhs(base: EllipticBase, t, spec: ContourSpec | None = None,
                     policy: TruncationPolicy = DEFAULT_POLICY, diag=None) -> complex:
    _, shifted = _sqcd_shifted(base, t, policy)
    f = _elliptic_bc_integrand(base, np.array(shifted), 1, policy)
    res = unit_circle_integrate(f, spec, policy)
    _record(diag, "lhs_quadrature", res)
    return complex(_vector_prefactor(base, policy, 1) / 2 * res.value)


def seiberg_sqcd_rhs(base: EllipticBase, t, policy: TruncationPolicy = DEFAULT_POLICY,
                     diag=None) -> complex:
    t, _ = _sqcd_shifted(base, t, policy)
    cube = complex(base.pq ** (1 / 3))
    mesons = np.array([cube * a * b for a, b in combinations(t, 2)])
    return complex(np.prod(elliptic_gamma(mesons, base, policy)))


# --- 3d mirror symmetry: U(1) with one flavor vs. three free chirals ---------


def _check_q3d(q):
    if not 0 < abs(q) < 1:
        raise NomeOutOfDomain(f"need 0 < |q| < 1, got {q}")


def monopole_integral(q: complex, m: int, spec: ContourSpec | None = None,
                      policy: TruncationPolicy = DEFAULT_POLICY):
    """Unit-circle integral for monopole charge m (depends on |m| only)."""
    m = abs(int(m))
    upper = q ** (5 / 6 + m / 2)
    lower = q ** (1 / 6 + m / 2)

    def f(z):
        num = log_q_pochhammer(np.stack([upper * z, upper / z]), q, policy).sum(axis=0)
        den = log_q_pochhammer(np.stack([lower * z, lower / z]), q, policy, guard=True).sum(axis=0)
        return np.exp(num - den)

    return unit_circle_integrate(f, spec, policy)


def mirror_lhs(q: complex, sum_spec: MonopoleSumSpec | None = None,
               spec: ContourSpec | None = None,
               policy: TruncationPolicy = DEFAULT_POLICY, diag=None) -> complex:
    """sum over m of q^{|m|/3} times the monopole integral.

    Each band |m| = M is added as 2 q^{M/3} I_M. Since I_M -> 1 geometrically
    (I_M - 1 = O(q^{M+1/3})), the omitted bands are summed in closed form
    with I_M replaced by 1 when ``tail_correction`` is on; the adaptive
    cutoff then stops once a band deviates from that limit by less than the
    quadrature tolerance.
    """
    sum_spec = sum_spec or MonopoleSumSpec()
    q = complex(q)
    _check_q3d(q)
    first = monopole_integral(q, 0, spec, policy)
    total = first.value
    max_points = first.n_points
    cube_root = q ** (1 / 3)
    m = 0
    limit = sum_spec.max_cutoff if sum_spec.adaptive else sum_spec.cutoff
    converged = not sum_spec.adaptive
    while m < limit:
        m += 1
        res = monopole_integral(q, m, spec, policy)
        max_points = max(max_points, res.n_points)
        weight = q ** (m / 3)
        total += 2 * weight * res.value
        deviation = abs(2 * weight * (res.value - (1 if sum_spec.tail_correction else 0)))
        if sum_spec.adaptive and m >= sum_spec.cutoff and deviation <= policy.quad_tolerance * abs(total):
            converged = True
            break
    if not converged:
        raise SumNotConverged(f"monopole sum not converged at |m| <= {m}")
    if sum_spec.tail_correction:
        total += 2 * cube_root ** (m + 1) / (1 - cube_root)
    if diag is not None:
        diag["monopole_cutoff"] = m
        diag["lhs_quadrature"] = {"n_points": max_points}
    return complex(total)


def mirror_rhs(q: complex, policy: TruncationPolicy = DEFAULT_POLICY, diag=None) -> complex:
    q = complex(q)
    _check_q3d(q)
    num = q_pochhammer_inf(q ** (2 / 3), q, policy)
    den = q_pochhammer_inf(q ** (1 / 3), q, policy)
    return complex((num / den) ** 3)


# --- SP(2N) duality, elliptic level ------------------------------------------


def _sp_check(params: SPDualityParams, base: EllipticBase, policy):
    s = params.fugacities
    if len(s) != 2 * params.Nf:
        raise ValueError(f"need {2 * params.Nf} fugacities, got {len(s)}")
    if max(params.N, params.dual_rank) > MAX_TORUS_DIM:
        raise DimensionTooLarge(
            f"ranks N={params.N}, dual={params.dual_rank} exceed the torus cap {MAX_TORUS_DIM}"
        )
    bal = sp_elliptic_balancing(base, params.N, params.K, params.Nf)
    res = bal.residual(s.values)
    if res > BALANCE_TOL:
        raise ConstraintViolated(f"balancing violated ({bal.describe()}): residual {res:.3g}")
    U = params.U(base)
    _check_inside(s, "fugacity", policy)
    if params.dual_rank > 0:
        _check_inside([U / x for x in s], "dual fugacity U/s", policy)
    return U


def _sp_side(base, U, rank, fug, spec, policy, diag, key):
    """(p;p)^n (q;q)^n / (2^n n!) Gamma(U)^(n-1) times the BC_n integral."""
    pref = elliptic_gamma(U, base, policy) ** (rank - 1)
    if rank == 0:
        return pref
    pref *= _vector_prefactor(base, policy, rank) / (2**rank * math.factorial(rank))
    f = _elliptic_bc_integrand(base, np.asarray(fug), rank, policy, coupling=U)
    cs = spec or ContourSpec(kind="torus")
    cs = ContourSpec("torus", cs.n_points, rank, cs.axis_cutoff)
    res = torus_integrate(f, cs, policy)
    _record(diag, key, res)
    return pref * res.value


def sp_elliptic_lhs(params: SPDualityParams, base: EllipticBase,
                    spec: ContourSpec | None = None,
                    policy: TruncationPolicy = DEFAULT_POLICY, diag=None) -> complex:
    U = _sp_check(params, base, policy)
    return complex(_sp_side(base, U, params.N, params.fugacities.array(), spec, policy,
                            diag, "lhs_quadrature"))


def sp_elliptic_rhs(params: SPDualityParams, base: EllipticBase,
                    spec: ContourSpec | None = None,
                    policy: TruncationPolicy = DEFAULT_POLICY, diag=None) -> complex:
    U = _sp_check(params, base, policy)
    s = params.fugacities.array()
    mesons = np.array([U ** (l - 1) * a * b
                       for l in range(1, params.K + 1) for a, b in combinations(s, 2)])
    meson_part = np.prod(elliptic_gamma(mesons, base, policy))
    dual = _sp_side(base, U, params.dual_rank, U / s, spec, policy, diag, "rhs_quadrature")
    return complex(meson_part * dual)


# --- SP(2N) duality, hyperbolic level ------------------------------------------


def _hyperbolic_bc_integrand(pair, params, policy):
    params = np.asarray(params, dtype=complex)

    def integrand(u):
        u = np.asarray(u, dtype=complex)
        args = np.concatenate([np.add.outer(params, u), np.add.outer(params, -u)])
        logs = log_hyperbolic_gamma(args, pair, policy).sum(axis=0)
        recip = reciprocal_hyperbolic_gamma(np.stack([2 * u, -2 * u]), pair, policy).prod(axis=0)
        return np.exp(logs) * recip

    return integrand


def _sp_hyp_check(params: SPDualityParams, pair: ModularPair, policy):
    a = params.fugacities
    if len(a) != 2 * (params.Nf - 1):
        raise ValueError(f"need {2 * (params.Nf - 1)} alphas, got {len(a)}")
    if max(params.N, params.dual_rank) > 1:
        raise DimensionTooLarge("hyperbolic identities are evaluated for ranks <= 1")
    if not (pair.omega1.real > 0 and pair.omega2.real > 0):
        raise UnsupportedRegime("the imaginary axis separates poles only for Re(omega) > 0")
    coupling = pair.total / (params.K + 1)
    for x in a:
        if x.real <= policy.pole_guard:
            raise PoleProximity(f"alpha = {x:.6g}: poles of gamma(alpha +- u) reach the contour")
        if params.dual_rank > 0 and (coupling - x).real <= policy.pole_guard:
            raise PoleProximity(f"dual parameter {coupling - x:.6g} has poles on the contour")
    return coupling


def axis_decay_rate(params, pair: ModularPair) -> float:
    """Exponential decay rate of the BC_1 hyperbolic integrand along the axis.

    From log gamma(u) ~ -+ (i pi/2) B22(u) as Im u -> +-inf, the integrand
    with parameters a_1..a_m behaves like exp(-rate * |Im u|).
    """
    a = np.asarray(params, dtype=complex)
    w1, w2 = pair.omega1, pair.omega2
    return float((-np.pi * ((2 * a.sum() - (a.size - 2) * pair.total) / (w1 * w2))).real)


def _hyp_side(pair, coupling, rank, params, spec, policy, diag, key):
    pref = hyperbolic_gamma(coupling, pair, policy) ** (rank - 1)
    if rank == 0:
        return pref
    rate = axis_decay_rate(params, pair)
    if rate <= 0:
        raise TailNotDecaying(f"integrand grows along the imaginary axis (rate {rate:.3g})")
    pref /= 2**rank * math.factorial(rank)
    cs = spec or ContourSpec(kind="imaginary_axis")
    if cs.kind != "imaginary_axis":
        cs = ContourSpec("imaginary_axis", cs.n_points, 1, 6.0)
    res = line_integrate(_hyperbolic_bc_integrand(pair, params, policy), cs, policy,
                         measure=pair.measure)
    _record(diag, key, res)
    return pref * res.value


def sp_hyperbolic_lhs(params: SPDualityParams, pair: ModularPair,
                      spec: ContourSpec | None = None,
                      policy: TruncationPolicy = DEFAULT_POLICY, diag=None) -> complex:
    coupling = _sp_hyp_check(params, pair, policy)
    return complex(_hyp_side(pair, coupling, params.N, params.fugacities.array(), spec,
                             policy, diag, "lhs_quadrature"))


def sp_hyperbolic_rhs(params: SPDualityParams, pair: ModularPair,
                      spec: ContourSpec | None = None,
                      policy: TruncationPolicy = DEFAULT_POLICY, diag=None) -> complex:
    coupling = _sp_hyp_check(params, pair, policy)
    a = params.fugacities.array()
    N, K, Nf = params.N, params.K, params.Nf
    w = pair.total
    singlets = np.array([w * (Nf - (2 * N + 2 * K - l + 1) / (K + 1)) - a.sum()
                         for l in range(1, K + 1)])
    mesons = np.array([(l - 1) * coupling + x + y
                       for l in range(1, K + 1) for x, y in combinations(a, 2)])
    pref = np.prod(hyperbolic_gamma(singlets, pair, policy)) * np.prod(hyperbolic_gamma(mesons, pair, policy))
    dual = _hyp_side(pair, coupling, params.dual_rank, coupling - a, spec, policy, diag,
                     "rhs_quadrature")
    return complex(pref * dual)


# --- elliptic -> hyperbolic reduction ------------------------------------------


def _reduction_sides(scaling: ReductionScaling, policy):
    w1, w2 = scaling.omega.omega1, scaling.omega.omega2
    z = complex(scaling.z_arg)
    V = scaling.v * scaling.direction
    p = np.exp(2j * np.pi * V * w1)
    q = np.exp(2j * np.pi * V * w2)
    if not (abs(p) < 1 and abs(q) < 1):
        raise NomeOutOfDomain(f"scaled nomes |p|={abs(p):.6g}, |q|={abs(q):.6g} leave the unit disk")
    base = EllipticBase(p, q)
    log_elliptic = log_elliptic_gamma(np.exp(2j * np.pi * V * z), base, policy)
    # exponent 2*pi*i/24 = pi*i/12: the pi*i/24 variant diverges as v -> 0
    log_prefactor = -1j * np.pi * (2 * z - w1 - w2) / (12 * V * w1 * w2)
    log_hyp = log_hyperbolic_gamma(z, scaling.omega, policy)
    return log_elliptic, log_prefactor + log_hyp


def reduction_check(scaling: ReductionScaling, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """|Gamma(e^{2 pi i v z}; ...) / (prefactor * gamma^(2)(z)) - 1|."""
    lhs, rhs = _reduction_sides(scaling, policy)
    return float(abs(np.exp(lhs - rhs) - 1))


# --- 4d/5d E6 index -----------------------------------------------------------


def e6_index_numeric(t: float, y: complex = 1.0, spec: ContourSpec | None = None,
                     policy: TruncationPolicy = DEFAULT_POLICY, diag=None) -> complex:
    """Numeric 4d/5d index at unit flavor fugacities, p = t^3 y, q = t^3/y."""
    t = float(t)
    if not 0 < t < 1:
        raise NomeOutOfDomain("need 0 < t < 1")
    base = EllipticBase(t**3 * y, t**3 / y)
    hyper = 1 / (double_pochhammer(t**4, base, policy) ** 15 * double_pochhammer(t**2, base, policy) ** 12)
    f = _elliptic_bc_integrand(base, np.full(6, t, dtype=complex), 1, policy)
    res = unit_circle_integrate(f, spec, policy)
    _record(diag, "lhs_quadrature", res)
    return complex(hyper * _vector_prefactor(base, policy, 1) / 2 * res.value)


# --- registry -------------------------------------------------------------------


Params = Mapping[str, complex]


def _real_int(params: Params, name: str) -> int:
    try:
        value = complex(params[name])
    except KeyError:
        raise ValueError(f"missing parameter {name!r}") from None
    if value.imag != 0 or value.real != int(value.real):
        raise ValueError(f"parameter {name!r} must be an integer, got {value}")
    return int(value.real)


def _get(params: Params, name: str) -> complex:
    try:
        return complex(params[name])
    except KeyError:
        raise ValueError(f"missing parameter {name!r}") from None


def _vector(params: Params, prefix: str, count: int, balancing: Balancing) -> FugacityVector:
    names = [f"{prefix}{i}" for i in range(1, count + 1)]
    missing = [n for n in names if n not in params]
    if missing == names[-1:] and balancing.kind != "none":
        return FugacityVector.balanced([_get(params, n) for n in names[:-1]], balancing)
    if missing:
        raise ValueError(f"missing parameters {missing}")
    return FugacityVector(tuple(_get(params, n) for n in names), balancing)


def _base(params: Params) -> EllipticBase:
    return EllipticBase(_get(params, "p"), _get(params, "q"))


def _pair(params: Params) -> ModularPair:
    return ModularPair(_get(params, "omega1"), _get(params, "omega2"))


@dataclass(frozen=True)
class Identity:
    identity_id: str
    anchor: str
    arity: str
    tolerance: float
    lhs: Callable
    rhs: Callable
    constraint: str
    # extra verdict condition on the diagnostics (e.g. monotone convergence)
    accept: Callable | None = None
    tolerance_for: Callable | None = None

    def evaluate(self, params: Params, policy: TruncationPolicy = DEFAULT_POLICY):
        diag: dict = {}
        lhs = self.lhs(params, policy, diag)
        rhs = self.rhs(params, policy, diag)
        return lhs, rhs, diag

    def tolerance_at(self, params: Params) -> float:
        return self.tolerance_for(params) if self.tolerance_for else self.tolerance


def _beta_vec(params):
    return _vector(params, "t", 6, _beta_balancing(_base(params)))


def _sqcd_vec(params):
    return _vector(params, "t", 6, Balancing("product", 1.0, "prod t = 1"))


def _sp_ell(params):
    N, K, Nf = (_real_int(params, k) for k in ("N", "K", "Nf"))
    base = _base(params)
    s = _vector(params, "s", 2 * Nf, sp_elliptic_balancing(base, N, K, Nf))
    return SPDualityParams(N, K, Nf, s), base


def _sp_hyp(params):
    N, K, Nf = (_real_int(params, k) for k in ("N", "K", "Nf"))
    pair = _pair(params)
    a = _vector(params, "a", 2 * (Nf - 1), sp_hyperbolic_balancing(pair, N, K, Nf))
    return SPDualityParams(N, K, Nf, a), pair


def _v_list(params: Params) -> list[float]:
    vs = []
    i = 1
    while f"v{i}" in params:
        vs.append(_get(params, f"v{i}").real)
        i += 1
    if not vs and "v" in params:
        vs = [_get(params, "v").real]
    if not vs:
        raise ValueError("reduction check needs v or v1, v2, ...")
    return vs


def _scalings(params: Params):
    pair = ModularPair(params.get("omega1", 1j), params.get("omega2", 1.0))
    z = complex(params.get("z", 0.4))
    rot = params.get("rotation")
    return [ReductionScaling(v, pair, z, None if rot is None else complex(rot)) for v in _v_list(params)]


def _reduction_lhs(params, policy, diag):
    scalings = _scalings(params)
    devs = [reduction_check(s, policy) for s in scalings]
    diag["deviations"] = devs
    if len(devs) > 1:
        diag["monotone_decreasing"] = all(b < a for a, b in zip(devs, devs[1:]))
    lhs, _ = _reduction_sides(scalings[-1], policy)
    return complex(np.exp(lhs))


def _reduction_rhs(params, policy, diag):
    _, rhs = _reduction_sides(_scalings(params)[-1], policy)
    return complex(np.exp(rhs))


def _e6_order(params) -> int:
    return _real_int(params, "order") if "order" in params else 6


def _e6_series_value(params, order, max_order=None):
    s = expand_e6(order) if max_order is None else expand_e6(order, max_order=max_order)
    return complex(s.evaluate(t=_get(params, "t"), y=complex(params.get("y", 1.0))))


def _e6_rhs(params, policy, diag):
    order = _e6_order(params)
    diag["series_order"] = order
    return _e6_series_value(params, order)


def _e6_tolerance(params):
    # remainder estimated from the next two exact orders, with a safety factor
    order = _e6_order(params)
    low = _e6_series_value(params, order)
    # the remainder estimate may look past the public order cap
    high = _e6_series_value(params, order + 2, max_order=order + 2)
    return 4 * abs(high - low) / abs(high) + 1e-12


REGISTRY: dict[str, Identity] = {}


def _register(identity: Identity):
    REGISTRY[identity.identity_id] = identity


_register(Identity(
    "elliptic_beta",
    "elliptic beta integral: six fugacities, BC_1 contour integral = prod Gamma(t_i t_j)",
    "p, q, t1..t6", 1e-8,
    lambda P, pol, d: elliptic_beta_lhs(_base(P), _beta_vec(P), None, pol, d),
    lambda P, pol, d: elliptic_beta_rhs(_base(P), _beta_vec(P), pol, d),
    "prod t_i = pq; |t_i| < 1",
))
_register(Identity(
    "nassrallah_rahman",
    "Nassrallah-Rahman q-beta integral: p -> 0 limit of the elliptic beta integral",
    "q, t1..t5", 1e-10,
    lambda P, pol, d: nassrallah_rahman_lhs(_get(P, "q"), _vector(P, "t", 5, Balancing()), None, pol, d),
    lambda P, pol, d: nassrallah_rahman_rhs(_get(P, "q"), _vector(P, "t", 5, Balancing()), pol, d),
    "|t_i| < 1; unconstrained",
))
_register(Identity(
    "seiberg_sqcd",
    "Seiberg duality: SU(2) with six flavors vs. 15 free mesons (4d superconformal index)",
    "p, q, t1..t6", 1e-8,
    lambda P, pol, d: seiberg_sqcd_lhs(_base(P), _sqcd_vec(P), None, pol, d),
    lambda P, pol, d: seiberg_sqcd_rhs(_base(P), _sqcd_vec(P), pol, d),
    "prod t_i = 1; |(pq)^(1/6) t_i| < 1",
))
_register(Identity(
    "mirror_u1",
    "3d mirror symmetry: U(1) with one flavor (monopole sum) vs. free Wess-Zumino with three chirals",
    "q", 1e-9,
    lambda P, pol, d: mirror_lhs(_get(P, "q"), None, None, pol, d),
    lambda P, pol, d: mirror_rhs(_get(P, "q"), pol, d),
    "0 < |q| < 1",
))
_register(Identity(
    "sp_elliptic",
    "SP(2N) <-> SP(2(K(Nf-2)-N)) duality with antisymmetric matter (4d index)",
    "N, K, Nf, p, q, s1..s_{2Nf}", 1e-6,
    lambda P, pol, d: sp_elliptic_lhs(*_sp_ell(P), None, pol, d),
    lambda P, pol, d: sp_elliptic_rhs(*_sp_ell(P), None, pol, d),
    "U^{2(N+K)} prod s_i = (pq)^Nf, U = (pq)^(1/(K+1)); N, dual rank <= 2",
))
_register(Identity(
    "sp_hyperbolic",
    "hyperbolic (squashed S^3) reduction of the SP(2N) duality, one flavor integrated out",
    "N, K, Nf, omega1, omega2, a1..a_{2(Nf-1)}", 1e-4,
    lambda P, pol, d: sp_hyperbolic_lhs(*_sp_hyp(P), None, pol, d),
    lambda P, pol, d: sp_hyperbolic_rhs(*_sp_hyp(P), None, pol, d),
    "alphas free (pair sum eliminated); Re alpha_i > 0; N, dual rank <= 1",
))
_register(Identity(
    "reduction_limit",
    "v -> 0 limit turning the elliptic gamma function into the hyperbolic gamma function",
    "z, omega1, omega2, v1..vk", 1e-3,
    _reduction_lhs, _reduction_rhs,
    "scaled nomes inside the unit disk; v list descending",
    accept=lambda diag: diag.get("monotone_decreasing", True),
))
_register(Identity(
    "e6_expansion",
    "4d/5d coupled index with E6 enhancement: exact t-expansion vs. numeric contour integral",
    "t, y, order", 1e-6,
    lambda P, pol, d: e6_index_numeric(_get(P, "t").real, complex(P.get("y", 1.0)), None, pol, d),
    _e6_rhs,
    "p = t^3 y, q = t^3 / y, flavor fugacities 1",
    tolerance_for=_e6_tolerance,
))


def get_identity(identity_id: str) -> Identity:
    try:
        return REGISTRY[identity_id]
    except KeyError:
        raise UnknownIdentity(f"unknown identity {identity_id!r}; known: {sorted(REGISTRY)}") from None

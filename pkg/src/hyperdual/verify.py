"""Verification harness: constrained sampling, two-sided evaluation, reports.

Samplers draw from a seeded numpy Generator and build every constrained
vector by solving its last entry from the balancing condition, so accepted
parameter sets satisfy the constraint to rounding. Draws that leave the
pole-safe domain are discarded and redrawn.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import DimensionTooLarge, DomainTooTight, HyperdualError
from .identities import (
    REGISTRY,
    Balancing,
    FugacityVector,
    axis_decay_rate,
    get_identity,
    sp_elliptic_balancing,
    sp_u,
)
from .quad import MAX_TORUS_DIM
from .specfun import DEFAULT_POLICY, EllipticBase, ModularPair, TruncationPolicy

# rejection sampling gives up once this fraction of draws is discarded
MAX_REJECTION = 0.99

DEFAULT_DOMAINS: dict[str, tuple[float, float]] = {
    "nome": (0.05, 0.5),
    "sp_nome": (0.05, 0.3),
    "fugacity": (0.2, 0.8),
    "mirror_q": (0.1, 0.6),
    "e6_t": (0.05, 0.15),
    "reduction_z": (0.3, 0.5),
    "hyperbolic_angle": (math.pi / 12, math.pi / 4),
}

DEFAULT_OPTIONS: dict[str, dict[str, int]] = {
    "sp_elliptic": {"N": 1, "K": 1, "Nf": 4},
    "sp_hyperbolic": {"N": 1, "K": 1, "Nf": 4},
    "e6_expansion": {"order": 6},
}

REDUCTION_V = (0.1, 0.05, 0.025)


@dataclass(frozen=True)
class SamplerConfig:
    seed: int
    n_samples: int
    domains: Mapping[str, tuple[float, float]] = field(default_factory=dict)
    options: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    def domain(self, name: str) -> tuple[float, float]:
        return tuple(self.domains.get(name, DEFAULT_DOMAINS[name]))

    def option(self, identity_id: str, name: str) -> int:
        return int(self.options.get(name, DEFAULT_OPTIONS[identity_id][name]))


@dataclass(frozen=True)
class IdentityReport:
    identity_id: str
    parameters: tuple  # ((name, complex), ...) in evaluation order
    lhs: complex | None
    rhs: complex | None
    abs_error: float | None
    rel_error: float | None
    tolerance: float | None
    convergence: dict
    verdict: str  # "pass" | "fail" | "rejected(<ErrorCode>)"
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    @property
    def rejected(self) -> bool:
        return self.verdict.startswith("rejected")


@dataclass(frozen=True)
class SweepReport:
    identity_id: str
    seed: int
    reports: tuple

    @property
    def n_pass(self) -> int:
        return sum(r.passed for r in self.reports)

    @property
    def n_fail(self) -> int:
        return sum(r.verdict == "fail" for r in self.reports)

    @property
    def n_rejected(self) -> int:
        return sum(r.rejected for r in self.reports)

    @property
    def max_rel_error(self) -> float:
        errs = [r.rel_error for r in self.reports if r.rel_error is not None]
        return max(errs) if errs else float("nan")

    @property
    def all_pass(self) -> bool:
        return self.n_pass == len(self.reports)


# --- samplers -------------------------------------------------------------------


def _phase(rng) -> complex:
    return complex(np.exp(2j * np.pi * rng.random()))


def _nome(rng, lo_hi) -> complex:
    return rng.uniform(*lo_hi) * _phase(rng)


def _log_moduli(rng, n: int, log_product: float, lo_hi) -> np.ndarray | None:
    """n moduli in [lo, hi] whose logs sum to log_product, or None."""
    lo, hi = np.log(lo_hi[0]), np.log(lo_hi[1])
    x = rng.uniform(lo, hi, n)
    x += (log_product - x.sum()) / n
    if np.all((x >= lo) & (x <= hi)):
        return np.exp(x)
    return None


def _balanced_head(rng, n, target, lo_hi):
    """First n-1 entries of a vector with product target and moduli in lo_hi."""
    mods = _log_moduli(rng, n, math.log(abs(target)), lo_hi)
    if mods is None:
        return None
    return [m * _phase(rng) for m in mods[:-1]]


def _in_band(values, lo_hi) -> bool:
    lo, hi = lo_hi
    return all(lo * (1 - 1e-12) <= abs(v) <= hi * (1 + 1e-12) for v in values)


def _off_cut(base: EllipticBase) -> bool:
    # principal-branch roots of pq stay continuous away from the negative axis
    return abs(np.angle(base.pq)) < math.pi - 0.3


def _named(prefix: str, values) -> list[tuple[str, complex]]:
    return [(f"{prefix}{i}", complex(v)) for i, v in enumerate(values, 1)]


def _draw_elliptic_beta(rng, cfg: SamplerConfig):
    base = EllipticBase(_nome(rng, cfg.domain("nome")), _nome(rng, cfg.domain("nome")))
    head = _balanced_head(rng, 6, base.pq, cfg.domain("fugacity"))
    if head is None:
        return None
    t = FugacityVector.balanced(head, Balancing("product", base.pq))
    if not _in_band(t, cfg.domain("fugacity")):
        return None
    return [("p", base.p), ("q", base.q)] + _named("t", t)


def _draw_nassrallah_rahman(rng, cfg: SamplerConfig):
    q = _nome(rng, cfg.domain("nome"))
    lo, hi = cfg.domain("fugacity")
    t = [rng.uniform(lo, hi) * _phase(rng) for _ in range(5)]
    return [("q", q)] + _named("t", t)


def _draw_seiberg_sqcd(rng, cfg: SamplerConfig):
    base = EllipticBase(_nome(rng, cfg.domain("nome")), _nome(rng, cfg.domain("nome")))
    if not _off_cut(base):
        return None
    shift = base.pq ** (1 / 6)
    head = _balanced_head(rng, 6, base.pq, cfg.domain("fugacity"))
    if head is None:
        return None
    t = FugacityVector.balanced([h / shift for h in head], Balancing("product", 1.0))
    if not _in_band([shift * x for x in t], cfg.domain("fugacity")):
        return None
    return [("p", base.p), ("q", base.q)] + _named("t", t)


def _draw_mirror(rng, cfg: SamplerConfig):
    return [("q", complex(rng.uniform(*cfg.domain("mirror_q"))))]


def _ranks(identity_id: str, cfg: SamplerConfig, cap: int):
    N, K, Nf = (cfg.option(identity_id, k) for k in ("N", "K", "Nf"))
    dual = K * (Nf - 2) - N
    if dual < 0:
        raise ValueError(f"dual rank K(Nf-2)-N = {dual} is negative")
    if max(N, dual) > cap:
        raise DimensionTooLarge(f"ranks N={N}, dual={dual} exceed the cap {cap}")
    return N, K, Nf, dual


def _draw_sp_elliptic(rng, cfg: SamplerConfig):
    N, K, Nf, dual = _ranks("sp_elliptic", cfg, MAX_TORUS_DIM)
    dom = cfg.domain("sp_nome")
    base = EllipticBase(_nome(rng, dom), _nome(rng, dom))
    if not _off_cut(base):
        return None
    bal = sp_elliptic_balancing(base, N, K, Nf)
    band = cfg.domain("fugacity")
    head = _balanced_head(rng, 2 * Nf, bal.target, band)
    if head is None:
        return None
    s = FugacityVector.balanced(head, bal)
    if not _in_band(s, band):
        return None
    U = sp_u(base, K)
    if dual > 0 and not all(abs(U / x) <= band[1] for x in s):
        return None
    return [("N", N), ("K", K), ("Nf", Nf), ("p", base.p), ("q", base.q)] + _named("s", s)


def _draw_sp_hyperbolic(rng, cfg: SamplerConfig):
    N, K, Nf, dual = _ranks("sp_hyperbolic", cfg, 1)
    phi = rng.uniform(*cfg.domain("hyperbolic_angle"))
    rho = math.exp(rng.uniform(-0.2, 0.2))
    pair = ModularPair(rho * np.exp(1j * phi), np.exp(-1j * phi) / rho)
    w = pair.total
    c = w / (K + 1)
    m = 2 * (Nf - 1)
    # window for Re(sum a) in which both integrands decay along the axis
    hi = (m - 2) / 2 * w.real
    lo = max(0.0, m * c.real - hi) if dual > 0 else 0.0
    if not hi > lo:
        raise DomainTooTight(f"no alpha window where both sides decay (N={N}, K={K}, Nf={Nf})")
    total = lo + rng.uniform(0.2, 0.8) * (hi - lo)
    a = rng.dirichlet(np.full(m, 4.0)) * total + 1j * rng.uniform(-0.2, 0.2, m)
    if min(a.real) < 0.15 * c.real or (dual > 0 and max(a.real) > 0.85 * c.real):
        return None
    if axis_decay_rate(a, pair) < 1.0 or (dual > 0 and axis_decay_rate(c - a, pair) < 1.0):
        return None
    singlets = [w * (Nf - (2 * N + 2 * K - l + 1) / (K + 1)) - a.sum() for l in range(1, K + 1)]
    if min(x.real for x in singlets) < 0.05:
        return None
    return ([("N", N), ("K", K), ("Nf", Nf), ("omega1", pair.omega1), ("omega2", pair.omega2)]
            + _named("a", a))


def _draw_reduction(rng, cfg: SamplerConfig):
    z = rng.uniform(*cfg.domain("reduction_z"))
    return ([("z", complex(z)), ("omega1", 1j), ("omega2", 1.0)]
            + _named("v", REDUCTION_V))


def _draw_e6(rng, cfg: SamplerConfig):
    t = rng.uniform(*cfg.domain("e6_t"))
    return [("t", complex(t)), ("y", _phase(rng)), ("order", cfg.option("e6_expansion", "order"))]


SAMPLERS: dict[str, Callable] = {
    "elliptic_beta": _draw_elliptic_beta,
    "nassrallah_rahman": _draw_nassrallah_rahman,
    "seiberg_sqcd": _draw_seiberg_sqcd,
    "mirror_u1": _draw_mirror,
    "sp_elliptic": _draw_sp_elliptic,
    "sp_hyperbolic": _draw_sp_hyperbolic,
    "reduction_limit": _draw_reduction,
    "e6_expansion": _draw_e6,
}


def sample_params(identity_id: str, config: SamplerConfig) -> list[dict[str, complex]]:
    """Deterministic constrained parameter sets for an identity."""
    get_identity(identity_id)
    draw = SAMPLERS[identity_id]
    rng = np.random.default_rng(int(config.seed))
    out: list[dict[str, complex]] = []
    attempts = 0
    budget = math.ceil(config.n_samples / (1 - MAX_REJECTION))
    while len(out) < config.n_samples:
        if attempts >= budget:
            raise DomainTooTight(
                f"{identity_id}: {attempts - len(out)} of {attempts} draws rejected"
            )
        attempts += 1
        drawn = draw(rng, config)
        if drawn is not None:
            out.append(dict(drawn))
    return out


# --- evaluation -----------------------------------------------------------------


def _check_params(params: Mapping) -> tuple:
    if not isinstance(params, Mapping):
        raise TypeError("params must be a mapping name -> number")
    items = []
    for name, value in params.items():
        if not isinstance(name, str):
            raise TypeError(f"parameter name {name!r} is not a string")
        if isinstance(value, bool) or not isinstance(value, (int, float, complex, np.number)):
            raise TypeError(f"parameter {name!r} has non-numeric value {value!r}")
        items.append((name, complex(value)))
    return tuple(items)


def rel_error(lhs: complex, rhs: complex) -> float:
    """|lhs - rhs| / max(|lhs|, |rhs|), 0 when both vanish."""
    scale = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) / scale if scale else 0.0


def verify_identity(identity_id: str, params: Mapping,
                    policy: TruncationPolicy = DEFAULT_POLICY,
                    tolerance: float | None = None) -> IdentityReport:
    """Evaluate both sides and grade them.

    Numerical mismatch yields a "fail" verdict and domain or convergence
    problems a "rejected(<code>)" verdict; only malformed input raises.
    """
    identity = get_identity(identity_id)
    items = _check_params(params)
    values = dict(items)
    try:
        tol = tolerance if tolerance is not None else identity.tolerance_at(values)
        lhs, rhs, diag = identity.evaluate(values, policy)
    except HyperdualError as exc:
        return IdentityReport(identity_id, items, None, None, None, None, tolerance, {},
                              f"rejected({exc.code})", str(exc))
    lhs, rhs = complex(lhs), complex(rhs)
    abs_err = abs(lhs - rhs)
    rel = rel_error(lhs, rhs)
    reason = ""
    if not (math.isfinite(abs_err) and math.isfinite(rel)):
        verdict, reason = "fail", "non-finite side"
    elif rel > tol:
        verdict, reason = "fail", f"rel_error {rel:.3g} exceeds tolerance {tol:.3g}"
    elif identity.accept is not None and not identity.accept(diag):
        verdict, reason = "fail", "convergence condition not met"
    else:
        verdict = "pass"
    return IdentityReport(identity_id, items, lhs, rhs, abs_err, rel, tol, diag, verdict, reason)


def _verify_task(args):
    return verify_identity(*args)


def sweep(identity_id: str, config: SamplerConfig,
          policy: TruncationPolicy = DEFAULT_POLICY, workers: int = 1,
          tolerance: float | None = None) -> SweepReport:
    """verify_identity over sampled parameters; reports keep the sample order."""
    samples = sample_params(identity_id, config)
    tasks = [(identity_id, s, policy, tolerance) for s in samples]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_verify_task, tasks))
    else:
        reports = [_verify_task(t) for t in tasks]
    return SweepReport(identity_id, int(config.seed), tuple(reports))


def known_identities() -> list[str]:
    return list(REGISTRY)

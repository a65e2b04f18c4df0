import cmath
import itertools
import math

import numpy as np
import pytest

from hyperdual.errors import (
    ConstraintViolated,
    DimensionTooLarge,
    NomeOutOfDomain,
    PoleProximity,
    SumNotConverged,
    TailNotDecaying,
    UnknownIdentity,
)
from hyperdual.identities import (
    REGISTRY,
    Balancing,
    FugacityVector,
    MonopoleSumSpec,
    ReductionScaling,
    SPDualityParams,
    _elliptic_bc_integrand,
    _hyperbolic_bc_integrand,
    e6_index_numeric,
    elliptic_beta_lhs,
    elliptic_beta_rhs,
    get_identity,
    mirror_lhs,
    mirror_rhs,
    nassrallah_rahman_lhs,
    nassrallah_rahman_rhs,
    reduction_check,
    seiberg_sqcd_lhs,
    seiberg_sqcd_rhs,
    sp_elliptic_balancing,
    sp_elliptic_lhs,
    sp_elliptic_params,
    sp_elliptic_rhs,
    sp_hyperbolic_balancing,
    sp_hyperbolic_lhs,
    sp_hyperbolic_rhs,
    sp_u,
)
from hyperdual.specfun import DEFAULT_POLICY, EllipticBase, ModularPair, double_pochhammer


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def phased(mod, angles):
    return [mod * cmath.exp(1j * a) for a in angles]


def beta_vector(base, head):
    return FugacityVector.balanced(head, Balancing("product", base.pq))


# --- elliptic beta integral -----------------------------------------------------------


def test_elliptic_beta_symmetric_point():
    base = EllipticBase(0.05, 0.05)
    t = [base.pq ** (1 / 6)] * 6
    assert rel(elliptic_beta_lhs(base, t), elliptic_beta_rhs(base, t)) < 1e-9


def test_elliptic_beta_random_point():
    base = EllipticBase(0.1 * cmath.exp(0.7j), 0.1 * cmath.exp(-2.1j))
    t = beta_vector(base, phased(0.45, [0.3, 1.1, 2.0, -1.4, -2.7]))
    assert rel(elliptic_beta_lhs(base, t), elliptic_beta_rhs(base, t)) < 1e-9


def test_elliptic_beta_unbalanced():
    base = EllipticBase(0.1, 0.1)
    t = list(beta_vector(base, [0.4, 0.5, 0.3, 0.6, 0.5]))
    t[5] *= 1.01
    with pytest.raises(ConstraintViolated):
        elliptic_beta_lhs(base, t)


def test_fugacity_vector_balancing_residual():
    base = EllipticBase(0.3j, 0.2)
    t = beta_vector(base, phased(0.5, [0.1, 0.2, 0.3, 0.4, 0.5]))
    assert abs(math.prod(t.values) - base.pq) / abs(base.pq) < 1e-14


def test_elliptic_beta_permutation_symmetry():
    base = EllipticBase(0.2, 0.15j)
    t = list(beta_vector(base, phased(0.55, [0.3, 1.1, 2.0, -1.4, -2.7])))
    ref = elliptic_beta_lhs(base, t)
    for perm in [(5, 4, 3, 2, 1, 0), (1, 0, 3, 2, 5, 4)]:
        assert rel(elliptic_beta_lhs(base, [t[i] for i in perm]), ref) < 1e-13


def test_elliptic_integrands_invariant_under_inversion():
    base = EllipticBase(0.2, 0.3j)
    params = np.array(phased(0.5, [0.1, 0.9, 2.0, -1.0, -2.5, 3.0]))
    f = _elliptic_bc_integrand(base, params, 1, DEFAULT_POLICY)
    rng = np.random.default_rng(3)
    z = np.exp(2j * np.pi * rng.random(10))
    assert np.allclose(f(z), f(1 / z), rtol=1e-13, atol=0)


# --- Nassrallah-Rahman -------------------------------------------------------------------


def test_nassrallah_rahman_random():
    t = phased(0.5, [0.2, 1.3, 2.4, -0.8, -2.0])
    assert rel(nassrallah_rahman_lhs(0.3, t), nassrallah_rahman_rhs(0.3, t)) < 1e-10


def test_nassrallah_rahman_symmetric():
    t = [0.45] * 5
    assert rel(nassrallah_rahman_lhs(0.2, t), nassrallah_rahman_rhs(0.2, t)) < 1e-10


def test_elliptic_beta_tends_to_nassrallah_rahman():
    q = 0.3
    head = phased(0.5, [0.2, 1.3, 2.4, -0.8, -2.0])
    target = nassrallah_rahman_rhs(q, head)
    devs = []
    for p in (1e-2, 1e-3, 1e-4):
        base = EllipticBase(p, q)
        devs.append(abs(elliptic_beta_lhs(base, beta_vector(base, head)) - target))
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] < 1e-3 * abs(target)


# --- Seiberg duality ------------------------------------------------------------------------


def test_sqcd_symmetric_point():
    base = EllipticBase(0.1, 0.1)
    assert rel(seiberg_sqcd_lhs(base, [1] * 6), seiberg_sqcd_rhs(base, [1] * 6)) < 1e-9


def test_sqcd_random_and_rescaled():
    base = EllipticBase(0.2 * cmath.exp(0.4j), 0.15)
    unit = Balancing("product", 1.0)
    t = FugacityVector.balanced(phased(1.1, [0.3, -1.2, 2.2, 0.7, -2.9]), unit)
    c = FugacityVector.balanced([0.9, 1.2j, 1.05, 0.8 * cmath.exp(0.5j), 1.0], unit)
    moved = [a * b for a, b in zip(t, c)]
    for vec in (t, moved):
        assert rel(seiberg_sqcd_lhs(base, vec), seiberg_sqcd_rhs(base, vec)) < 1e-9


def test_sqcd_rejects_poles_on_contour():
    base = EllipticBase(0.1, 0.1)
    big = 1.2 / base.pq ** (1 / 6)
    t = FugacityVector.balanced([big, 1, 1, 1, 1], Balancing("product", 1.0))
    with pytest.raises(PoleProximity):
        seiberg_sqcd_lhs(base, t)


# --- mirror symmetry ------------------------------------------------------------------------


@pytest.mark.parametrize("q, tol", [(1e-3, 1e-10), (0.3, 1e-9), (0.5, 1e-9)])
def test_mirror(q, tol):
    diag = {}
    assert rel(mirror_lhs(q, diag=diag), mirror_rhs(q)) < tol
    assert diag["monopole_cutoff"] <= 40


def test_mirror_rhs_matches_brute_force():
    q = 0.5
    num = den = 1.0
    for i in range(400):
        num *= 1 - q ** (2 / 3) * q**i
        den *= 1 - q ** (1 / 3) * q**i
    assert rel(mirror_rhs(q), (num / den) ** 3) < 1e-13


def test_mirror_fixed_cutoff_without_tail():
    q = 0.2
    plain = mirror_lhs(q, MonopoleSumSpec(cutoff=60, adaptive=False, tail_correction=False))
    assert rel(plain, mirror_rhs(q)) < 1e-12
    with pytest.raises(SumNotConverged):
        mirror_lhs(0.5, MonopoleSumSpec(max_cutoff=3, tail_correction=False))


def test_mirror_domain():
    with pytest.raises(NomeOutOfDomain):
        mirror_rhs(1.0)


# --- SP(2N) elliptic ------------------------------------------------------------------------


BASE_SP = EllipticBase(0.1 * cmath.exp(0.4j), 0.15 * cmath.exp(-0.7j))


def test_sp_elliptic_rank_zero_dual():
    params = sp_elliptic_params(1, 1, 3, BASE_SP, [0.5, 0.4j, -0.6, 0.55 * cmath.exp(1j), 0.45])
    assert params.dual_rank == 0
    assert rel(sp_elliptic_lhs(params, BASE_SP), sp_elliptic_rhs(params, BASE_SP)) < 1e-7


def test_sp_elliptic_rank_one_dual():
    head = phased(0.35, [0.1, 1.3, 2.2, 3.0, -2.5, -1.1, -0.3])
    params = sp_elliptic_params(1, 1, 4, BASE_SP, head)
    assert params.dual_rank == 1
    assert rel(sp_elliptic_lhs(params, BASE_SP), sp_elliptic_rhs(params, BASE_SP)) < 1e-6


def test_sp_elliptic_k2():
    base = EllipticBase(0.2, 0.25j)
    U = sp_u(base, 2)
    assert abs(U**3 - base.pq) < 1e-15
    params = sp_elliptic_params(1, 2, 3, base, phased(0.6, [0.3, 1.5, 2.5, -2.0, -0.7]))
    assert params.dual_rank == 1
    assert rel(sp_elliptic_lhs(params, base), sp_elliptic_rhs(params, base)) < 1e-10


def test_sp_elliptic_rank_two_torus():
    base = EllipticBase(0.1, 0.12j)
    params = sp_elliptic_params(2, 1, 4, base, phased(0.58, [0.3, 1.5, 2.5, -2.0, -0.7, 0.9, 2.9]))
    assert params.dual_rank == 0
    assert rel(sp_elliptic_lhs(params, base), sp_elliptic_rhs(params, base)) < 1e-10


def test_sp_elliptic_broken_balancing():
    params = sp_elliptic_params(1, 1, 3, BASE_SP, [0.5, 0.4j, -0.6, 0.55, 0.45])
    s = list(params.fugacities)
    s[0] *= 1.001
    broken = SPDualityParams(1, 1, 3, FugacityVector(tuple(s)))
    with pytest.raises(ConstraintViolated):
        sp_elliptic_lhs(broken, BASE_SP)
    with pytest.raises(ConstraintViolated):
        FugacityVector(tuple(s), sp_elliptic_balancing(BASE_SP, 1, 1, 3))


def test_sp_params_validation():
    with pytest.raises(ValueError):
        SPDualityParams(3, 1, 3, FugacityVector((1,) * 6))


def test_sp_elliptic_dimension_cap():
    base = EllipticBase(0.1, 0.1)
    params = sp_elliptic_params(3, 1, 5, base, [0.5] * 9)
    with pytest.raises(DimensionTooLarge):
        sp_elliptic_lhs(params, base)


# --- SP(2N) hyperbolic ------------------------------------------------------------------------


PAIR = ModularPair(cmath.exp(1j * math.pi / 8), cmath.exp(-1j * math.pi / 8))


def hyp_params(Nf, alphas, N=1, K=1):
    return SPDualityParams(N, K, Nf, FugacityVector(tuple(alphas),
                                                    sp_hyperbolic_balancing(PAIR, N, K, Nf)))


def test_sp_hyperbolic_rank_zero_dual():
    params = hyp_params(3, [0.3, 0.35 + 0.1j, 0.4 - 0.2j, 0.25])
    diag = {}
    lhs = sp_hyperbolic_lhs(params, PAIR, diag=diag)
    assert rel(lhs, sp_hyperbolic_rhs(params, PAIR)) < 1e-4
    assert diag["lhs_quadrature"]["axis_cutoff"] > 6


def test_sp_hyperbolic_rank_one_dual():
    params = hyp_params(4, [0.46, 0.45 + 0.1j, 0.5 - 0.2j, 0.42, 0.47 + 0.05j, 0.44])
    assert rel(sp_hyperbolic_lhs(params, PAIR), sp_hyperbolic_rhs(params, PAIR)) < 1e-4


def test_sp_hyperbolic_pole_on_contour():
    params = hyp_params(3, [0.0, 0.35, 0.4, 0.25])
    with pytest.raises(PoleProximity):
        sp_hyperbolic_lhs(params, PAIR)


def test_sp_hyperbolic_growing_integrand():
    # sum of the four alphas above w1 + w2: the LHS integrand grows along the axis
    params = hyp_params(3, [0.6, 0.6, 0.6, 0.6])
    with pytest.raises(TailNotDecaying):
        sp_hyperbolic_lhs(params, PAIR)


def test_hyperbolic_integrand_even():
    f = _hyperbolic_bc_integrand(PAIR, np.array([0.3, 0.35 + 0.1j, 0.4 - 0.2j, 0.25]),
                                 DEFAULT_POLICY)
    u = 1j * np.array([0.3, 1.1, 2.5])
    assert np.allclose(f(u), f(-u), rtol=1e-12, atol=0)


# --- reduction -------------------------------------------------------------------------------


def test_reduction_deviation_decreases():
    pair = ModularPair(1j, 1)
    devs = [reduction_check(ReductionScaling(v, pair, 0.4)) for v in (0.1, 0.05, 0.025)]
    assert devs[0] > devs[1] > devs[2]
    # the deviation is first order in v
    assert devs[1] / devs[2] == pytest.approx(2, rel=0.02)


def test_reduction_literal_real_v_leaves_domain():
    with pytest.raises(NomeOutOfDomain):
        reduction_check(ReductionScaling(0.1, ModularPair(1j, 1), 0.4, rotation=1))


def test_reduction_direction_independent():
    pair = ModularPair(1j, 1)
    a = reduction_check(ReductionScaling(0.05, pair, 0.4))
    b = reduction_check(ReductionScaling(0.05, pair, 0.4, rotation=cmath.exp(0.6j)))
    assert a == pytest.approx(b, rel=0.05)


# --- E6 index and registry ------------------------------------------------------------------


def test_e6_numeric_matches_closed_form():
    t = 0.1
    closed = 1 / double_pochhammer(t * t, EllipticBase(t**3, t**3)) ** 27
    assert rel(e6_index_numeric(t), closed) < 1e-13


def test_registry_ids():
    assert set(REGISTRY) == {"elliptic_beta", "nassrallah_rahman", "seiberg_sqcd", "mirror_u1",
                             "sp_elliptic", "sp_hyperbolic", "reduction_limit", "e6_expansion"}
    with pytest.raises(UnknownIdentity):
        get_identity("no_such_identity")


def test_registry_evaluates_missing_last_fugacity():
    params = {"p": 0.1, "q": 0.2, "t1": 0.5, "t2": 0.4, "t3": 0.6, "t4": 0.5, "t5": 0.5}
    lhs, rhs, diag = get_identity("elliptic_beta").evaluate(params)
    assert rel(lhs, rhs) < 1e-12
    assert diag["lhs_quadrature"]["n_points"] >= 16

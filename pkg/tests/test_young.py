import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from orlicz_qha.errors import (
    ConditionViolated,
    DegenerateFunction,
    DimensionMismatch,
    ExponentOrderViolated,
    ExponentOutOfRange,
    InfeasibleTheta,
    NotAInc1,
)
from orlicz_qha.young import (
    BoundSpec,
    InverseProduct,
    PiecewisePower,
    Power,
    PowerLog,
    Sampled,
    Scaled,
    SimplexPoint,
    YoungFunction,
    check_equivalence,
    collapse_identity_check,
    construct_phi,
    convexify,
    doubling_constant,
    grid_exponents,
    interpolate,
    pair_interpolate,
    strong_type_bound,
    theta_solver,
    verify_young_relation,
    young_from_json,
    young_relation_source,
)


def sampled_exp_minus_one(knots=4001):
    """exp(t)-1 on a log grid, stored in log form so huge values survive:
    log(e^t - 1) = t + log1p(-e^{-t})."""
    t = np.geomspace(1e-8, 1e8, knots)
    log_v = t + np.log1p(-np.exp(-np.minimum(t, 700.0)))
    return Sampled(np.log(t), log_v)


class TestEvaluate:
    def test_power_closed_form(self):
        assert Power(2).evaluate(3.0) == 9.0

    def test_powerlog_at_zero(self):
        assert PowerLog(2, 1).evaluate(0.0) == 0.0

    def test_powerlog_at_one(self):
        # t^2 log(1+t) at t=1 is log 2
        assert PowerLog(2, 1).evaluate(1.0) == pytest.approx(
            0.6931471805599453, rel=1e-14
        )

    def test_infinity_maps_to_infinity(self):
        assert Power(2).evaluate(np.inf) == np.inf

    def test_vectorized(self):
        out = Power(3).evaluate(np.array([0.0, 1.0, 2.0]))
        assert np.allclose(out, [0.0, 1.0, 8.0])


class TestLeftInverse:
    def test_power_closed_form(self):
        assert Power(2).left_inverse(9.0) == 3.0

    @pytest.mark.parametrize(
        "phi", [Power(2), PowerLog(2, 1), PiecewisePower(2, 3, 1.0)]
    )
    def test_zero(self, phi):
        assert phi.left_inverse(0.0) == 0.0
        assert phi.left_inverse(np.inf) == np.inf

    def test_powerlog_inverts_evaluate(self):
        # independent root oracle for t^2 log(1+t) = log 2
        phi = PowerLog(2, 1)
        s = 0.6931471805599453
        oracle = brentq(lambda t: phi.evaluate(t) - s, 0.5, 2.0, xtol=1e-14)
        assert phi.left_inverse(s) == pytest.approx(1.0, abs=1e-9)
        assert phi.left_inverse(s) == pytest.approx(oracle, rel=1e-11)

    @pytest.mark.parametrize(
        "phi",
        [
            Power(1.7),
            PowerLog(1.4, 0.6),
            PiecewisePower(1.5, 2.5, 0.7),
            Scaled(PowerLog(2, 1), 0.6),
            sampled_exp_minus_one(),
        ],
    )
    def test_galois_contract(self, phi, rng):
        t = np.exp(rng.uniform(-10, 10, size=200))
        ev = phi.evaluate(t)
        finite = np.isfinite(ev)  # fast-growing families overflow floats
        assert np.all(phi.left_inverse(ev[finite]) <= t[finite] * (1 + 1e-10))
        s = np.exp(rng.uniform(-10, 10, size=200))
        assert np.all(phi.evaluate(phi.left_inverse(s)) >= s * (1 - 1e-10))


class TestExponents:
    @pytest.mark.parametrize("p", [1.1, 4 / 3, 2.0, 3.0, 10.0])
    def test_power_exact(self, p):
        assert Power(p).exponents() == (p, p)

    def test_powerlog(self):
        assert PowerLog(2, 1).exponents() == (2, 3)

    def test_powerlog_grid_oracle(self):
        # the difference-quotient grid oracle: the sup end converges fast
        # (ratio -> 3 like 1 - O(t)); the inf end decays like 1/log t and
        # can only reach 2 + 1/log(1e8) on the standard grid
        q, p = grid_exponents(PowerLog(2, 1))
        assert p == pytest.approx(3.0, abs=1e-3)
        assert 2.0 <= q <= 2.06

    def test_piecewise(self):
        assert PiecewisePower(2, 3, 1.0).exponents() == (2, 3)
        q, p = grid_exponents(PiecewisePower(2, 3, 1.0))
        assert q == pytest.approx(2.0, abs=1e-3)
        assert p == pytest.approx(3.0, abs=1e-3)

    def test_scaled_exponents(self):
        q, p = Scaled(PowerLog(2, 1), 0.5).exponents()
        assert (q, p) == (1.0, 1.5)

    def test_delta2(self):
        assert Power(2).is_delta2()
        assert PowerLog(2, 1).is_delta2()
        assert not sampled_exp_minus_one().is_delta2()

    def test_q_le_p_across_families(self):
        for phi in [
            Power(1.3),
            PowerLog(1.5, 0.7),
            PiecewisePower(1.2, 4.0, 2.0),
            Scaled(Power(3), 0.5),
        ]:
            q, p = phi.exponents()
            assert q <= p

    def test_degenerate_raises(self):
        class Vanishing(YoungFunction):
            def _log_ev(self, logt):
                return np.where(logt < 0, -np.inf, logt)

        with pytest.raises(DegenerateFunction):
            grid_exponents(Vanishing())


class TestInterpolate:
    def test_power_pair(self):
        out = interpolate([Power(2), Power(4)], (0.5, 0.5))
        assert isinstance(out, Power) and out.p == pytest.approx(8 / 3)

    def test_identity(self):
        phi = PowerLog(2, 1)
        assert interpolate([phi], (1.0,)) is phi

    def test_power_pair_weighted(self):
        out = interpolate([Power(2), Power(1)], (2 / 3, 1 / 3))
        assert out.p == pytest.approx(1.5)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            interpolate([Power(2)], (0.5, 0.5))

    def test_swap_symmetry(self):
        # [phi0, phi1]_theta = [phi1, phi0]_{1-theta} at the inverse level
        phi0, phi1 = PowerLog(2, 1), Power(3)
        a = pair_interpolate(phi0, phi1, 0.3)
        b = pair_interpolate(phi1, phi0, 0.7)
        logs = np.linspace(np.log(1e-8), np.log(1e8), 2001)
        assert np.max(np.abs(np.expm1(a._log_inv(logs) - b._log_inv(logs)))) <= 1e-12

    def test_simplex_validation(self):
        with pytest.raises(ValueError):
            SimplexPoint((0.5, 0.6))
        with pytest.raises(ValueError):
            SimplexPoint((1.2, -0.2))


class TestThetaSolver:
    def test_pair(self):
        assert theta_solver([Power(4 / 3), Power(4 / 3)]).theta == (0.5, 0.5)

    def test_condition_violated(self):
        with pytest.raises(ConditionViolated):
            theta_solver([Power(2), Power(2)])

    def test_triple_by_rule(self):
        # m = (1/6, 1/3, 1/3), M = 5/6, w = (5, 4, 4)/13
        # theta = m + (1/6) w = (3/13, 5/13, 5/13)
        th = theta_solver([Power(6 / 5), Power(3 / 2), Power(3 / 2)])
        assert th.theta == pytest.approx((3 / 13, 5 / 13, 5 / 13), rel=1e-12)

    def test_exponent_range(self):
        with pytest.raises(ExponentOutOfRange):
            theta_solver([Power(1.0), Power(1.5)])  # q = 1
        with pytest.raises(ExponentOutOfRange):
            theta_solver([sampled_exp_minus_one()])  # p = inf

    def test_feasibility_invariant(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 4))
            psis = [Power(rng.uniform(1.05, 1.0 + 1.0 / n + 0.3)) for _ in range(n)]
            try:
                th = theta_solver(psis)
            except ConditionViolated:
                continue
            assert sum(th.theta) == pytest.approx(1.0, abs=1e-12)
            for theta_j, psi in zip(th, psis):
                assert theta_j > 1 - 1 / psi.exponents()[1]


class TestConstructPhi:
    def test_power_closed_form(self):
        out = construct_phi(Power(4 / 3), 0.5)
        assert isinstance(out, Power) and out.p == pytest.approx(2.0)

    def test_near_critical_blowup(self):
        p, eps = 2.0, 1e-3
        theta = 1 - 1 / p + eps
        out = construct_phi(Power(p), theta)
        assert out.p == pytest.approx(theta / eps, rel=1e-9)

    def test_infeasible(self):
        with pytest.raises(InfeasibleTheta):
            construct_phi(Power(2), 0.25)


class TestYoungRelation:
    def test_exact_power_tuple(self):
        res = verify_young_relation(Power(2), [Power(4 / 3), Power(4 / 3)])
        assert res <= 1e-12

    def test_mismatch_detected(self):
        res = verify_young_relation(Power(2), [Power(2), Power(2)])
        assert res > 0.1

    def test_pipeline_roundtrip(self):
        psis = [PowerLog(1.2, 0.3), Power(1.4)]
        psi0 = young_relation_source(psis)
        assert verify_young_relation(psi0, psis) <= 1e-12
        th = theta_solver(psis)
        phis = [construct_phi(psi, t) for psi, t in zip(psis, th)]
        rebuilt = interpolate(phis, th)
        logs = np.linspace(np.log(1e-6), np.log(1e6), 4001)
        resid = np.max(
            np.abs(np.expm1(rebuilt._log_inv(logs) - psi0._log_inv(logs)))
        )
        assert resid <= 1e-8


class TestCollapseIdentity:
    def test_power(self):
        assert collapse_identity_check(Power(2), 0.5, 0.5) <= 1e-12

    def test_powerlog(self):
        assert collapse_identity_check(PowerLog(2, 1), 0.3, 0.7) <= 1e-10

    def test_nu_to_zero_limit(self):
        phi = PowerLog(2, 1)
        lhs = pair_interpolate(pair_interpolate(Power(1), phi, 0.4), Power(1), 1e-9)
        ref = pair_interpolate(Power(1), phi, 0.4)
        logs = np.linspace(np.log(1e-6), np.log(1e6), 501)
        assert np.max(np.abs(np.expm1(lhs._log_inv(logs) - ref._log_inv(logs)))) <= 1e-6


class TestConvexify:
    def test_power2(self):
        psi, L = convexify(Power(2))
        assert L == pytest.approx(math.sqrt(2), rel=1e-12)
        for t in (0.3, 1.0, 7.0):
            assert psi.evaluate(t) == pytest.approx(t * t / 2, rel=1e-6)

    def test_power1_is_fixed_point(self):
        psi, L = convexify(Power(1))
        assert L == 1.0
        assert psi.evaluate(2.0) == pytest.approx(2.0, rel=1e-6)

    def test_powerlog_bounded_constant(self):
        psi, L = convexify(PowerLog(2, 1))
        assert L <= 2.0

    def test_not_ainc1(self):
        with pytest.raises(NotAInc1):
            convexify(PiecewisePower(2.0, 0.5, 1.0))


class TestEquivalence:
    def test_half_square(self):
        half_sq = Sampled.from_callable(lambda t: t * t / 2, 1e-9, 1e9, 4001)
        assert check_equivalence(Power(2), half_sq) == pytest.approx(math.sqrt(2))

    def test_self(self):
        phi = PowerLog(2, 1)
        assert check_equivalence(phi, phi) == 1.0

    def test_inequivalent(self):
        assert check_equivalence(Power(2), Power(3)) is None


class TestStrongTypeBound:
    def test_endpoint_corollary(self):
        assert strong_type_bound(BoundSpec(1, math.inf), 2, 2) == 4.0

    def test_two_sided(self):
        assert strong_type_bound(BoundSpec(1, 4, C_K=4), 2, 2) == 12.0

    def test_exponent_order(self):
        with pytest.raises(ExponentOrderViolated):
            strong_type_bound(BoundSpec(2, 4), 2, 2)

    def test_quasi_young_root(self):
        base = strong_type_bound(BoundSpec(1, math.inf), 2, 2)
        assert strong_type_bound(BoundSpec(1, math.inf), 2, 2, r=0.5) == base**2

    def test_doubling_constant(self):
        assert doubling_constant(Power(2), 2.0) == pytest.approx(4.0, rel=1e-9)


class TestSerialization:
    @pytest.mark.parametrize(
        "phi",
        [
            Power(2.5),
            PowerLog(1.7, 0.4),
            PiecewisePower(1.5, 3.0, 0.8),
            Scaled(PowerLog(2, 1), 0.7),
            sampled_exp_minus_one(101),
            InverseProduct(-0.5, [(PowerLog(1.3, 0.2), 1.8)]),
        ],
    )
    def test_json_roundtrip(self, phi):
        rebuilt = young_from_json(json.loads(json.dumps(phi.to_json_dict())))
        t = np.exp(np.linspace(-6, 6, 101))
        np.testing.assert_allclose(
            rebuilt.evaluate(t), phi.evaluate(t), rtol=1e-12
        )

    def test_inline_params_accepted(self):
        phi = young_from_json({"family": "Power", "p": 2})
        assert isinstance(phi, Power) and phi.p == 2.0


@given(st.floats(0.1, 1e6), st.floats(0.1, 1e6))
def test_powerlog_convexity_on_pairs(s, t):
    # Young functions are midpoint convex; checked for a log-perturbed power
    phi = PowerLog(2, 1)
    lhs = phi.evaluate(0.5 * (s + t))
    rhs = 0.5 * (phi.evaluate(s) + phi.evaluate(t))
    assert lhs <= rhs * (1 + 1e-12)


@given(st.floats(0.2, 0.8), st.floats(0.2, 0.8))
def test_collapse_identity_property(rho, nu):
    assert collapse_identity_check(PowerLog(1.5, 0.5), rho, nu) <= 1e-10

import dataclasses

import numpy as np
import pytest

from chondrosim import (
    MesoParams,
    ModelParams,
    ParameterError,
    default_params,
    reaction_rhs,
    steady_state,
    upscale_coefficients,
)
from chondrosim.model import reaction_jacobian


class TestUpscaleCoefficients:
    def test_identity_case(self):
        a1, a2, b = upscale_coefficients(MesoParams(s1=1, s2=1, lambda0=1, lambda2=1, phi=1, n=1))
        assert (a1, a2, b) == (1.0, 1.0, 1.0)

    def test_direct_arithmetic(self):
        # s1^2/(n l0) = 4/2, s2^2/(n l2) = 1/4, s1^2 phi/n = 4*0.5/2
        a1, a2, b = upscale_coefficients(MesoParams(s1=2, s2=1, lambda0=1, lambda2=2, phi=0.5, n=2))
        assert (a1, a2, b) == pytest.approx((2.0, 0.25, 1.0), rel=1e-15)

    def test_zero_bias_gives_zero_taxis(self):
        # phi must stay positive; the limit is approached, not attained.
        _, _, b = upscale_coefficients(MesoParams(s1=1.3, s2=0.7, lambda0=2.0, lambda2=1.0, phi=1e-12, n=3))
        assert b == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("bad", [dict(s1=-1), dict(lambda0=0.0), dict(phi=float("nan")), dict(n=4)])
    def test_invalid_inputs_rejected(self, bad):
        kwargs = dict(s1=1.0, s2=1.0, lambda0=1.0, lambda2=1.0, phi=0.1, n=2)
        kwargs.update(bad)
        with pytest.raises(ParameterError):
            MesoParams(**kwargs)


class TestSteadyState:
    def test_baseline_closed_form(self, baseline):
        ss = steady_state(baseline)
        assert ss.c1 == pytest.approx(0.8, rel=1e-14)
        assert ss.c2 == pytest.approx(0.2, rel=1e-14)
        assert ss.h == pytest.approx(2.5, rel=1e-14)

    def test_symmetric_rates(self):
        p = ModelParams(a1=1, a2=1, b=0, alpha=0.3, delta=0.3, beta=0.1, gamma1=0.2, gamma2=0.5, kc1=1, kc2=1)
        ss = steady_state(p)
        assert ss.c1 == pytest.approx(0.5, rel=1e-14)
        assert ss.c2 == pytest.approx(0.5, rel=1e-14)
        assert ss.h == pytest.approx(2 * p.gamma2 / (3 * p.gamma1), rel=1e-14)

    def test_zero_reaction_residual_for_random_params(self, rng):
        from chondrosim.verify import random_params

        for _ in range(300):
            p = random_params(rng)
            ss = steady_state(p)
            dc1, dc2, dh = reaction_rhs(p, ss.c1, ss.c2, ss.h)
            scale = max(1.0, abs(ss.c1), abs(ss.c2), abs(ss.h))
            assert max(abs(dc1), abs(dc2), abs(dh)) <= 1e-12 * scale
            assert ss.c1 > 0 and ss.c2 > 0 and ss.h > 0
            assert ss.c2 == pytest.approx(p.alpha / p.delta * ss.c1, rel=1e-12)

    def test_k2_variant_keeps_zero_residual(self, rng):
        from chondrosim.verify import random_params

        for _ in range(100):
            p = dataclasses.replace(random_params(rng), logistic_k2_variant=True)
            ss = steady_state(p)
            residuals = reaction_rhs(p, ss.c1, ss.c2, ss.h)
            assert max(abs(r) for r in residuals) <= 1e-12

    def test_capacity_scale_covariance(self, baseline):
        ss1 = steady_state(baseline)
        p2 = dataclasses.replace(baseline, kc1=2 * baseline.kc1)
        ss2 = steady_state(p2)
        assert ss2.c1 == pytest.approx(2 * ss1.c1, rel=1e-14)
        assert ss2.c2 == pytest.approx(2 * ss1.c2, rel=1e-14)
        expected_h = p2.gamma2 / (p2.gamma1 * (p2.kc2 + ss2.c2))
        assert ss2.h == pytest.approx(expected_h, rel=1e-14)


class TestReactionRhs:
    def test_equilibrium_is_a_zero(self, baseline):
        ss = steady_state(baseline)
        assert max(abs(v) for v in reaction_rhs(baseline, ss.c1, ss.c2, ss.h)) <= 1e-12

    def test_extinction_state_invariant(self, baseline):
        dc1, dc2, dh = reaction_rhs(baseline, 0.0, 0.0, 1.7)
        assert (dc1, dc2, dh) == (0.0, 0.0, 0.0)

    def test_direct_substitution(self):
        # At c1=1, c2=0, h=0 with kc1=1 the crowding factor vanishes, so the
        # proliferation term drops out regardless of beta.
        p = ModelParams(a1=1, a2=1, b=0, alpha=0.15, delta=0.6, beta=0.05, gamma1=0.1, gamma2=0.3)
        dc1, dc2, dh = reaction_rhs(p, 1.0, 0.0, 0.0)
        assert dc1 == pytest.approx(-0.15, rel=1e-14)
        assert dc2 == pytest.approx(0.15, rel=1e-14)
        assert dh == 0.0

    def test_exchange_terms_cancel_in_sum(self, rng):
        # dc1 + dc2 equals the proliferation term alone, for any state.
        from chondrosim.verify import random_params

        for _ in range(50):
            p = random_params(rng)
            c1, c2, h = rng.uniform(0.0, 5.0, size=3)
            dc1, dc2, _ = reaction_rhs(p, c1, c2, h)
            logistic = p.beta * c1 * (1.0 - c1 / p.kc1 - c2 / p.kc1)
            scale = max(1.0, abs(dc1), abs(dc2), abs(logistic))
            assert abs(dc1 + dc2 - logistic) <= 1e-14 * scale
        # and in bulk on arrays
        p = random_params(rng)
        c1 = rng.uniform(0.0, 5.0, size=10_000)
        c2 = rng.uniform(0.0, 5.0, size=10_000)
        h = rng.uniform(0.0, 5.0, size=10_000)
        dc1, dc2, _ = reaction_rhs(p, c1, c2, h)
        logistic = p.beta * c1 * (1.0 - c1 / p.kc1 - c2 / p.kc1)
        scale = np.maximum(1.0, np.abs(logistic))
        assert np.all(np.abs(dc1 + dc2 - logistic) <= 1e-14 * scale)

    def test_attractant_sign_structure(self, rng):
        from chondrosim.verify import random_params

        for _ in range(200):
            p = random_params(rng)
            c2 = float(rng.uniform(0.0, 5.0))
            h = float(rng.uniform(0.0, 5.0))
            _, _, dh = reaction_rhs(p, 1.0, c2, h)
            expected_sign = np.sign(c2 * (p.gamma2 / (p.kc2 + c2) - p.gamma1 * h))
            assert np.sign(dh) == expected_sign
            if h >= p.gamma2 / (p.gamma1 * p.kc2):
                assert dh <= 0.0

    def test_accepts_arrays(self, baseline):
        ss = steady_state(baseline)
        c1 = np.full((4, 5), ss.c1)
        c2 = np.full((4, 5), ss.c2)
        h = np.full((4, 5), ss.h)
        dc1, dc2, dh = reaction_rhs(baseline, c1, c2, h)
        assert dc1.shape == (4, 5)
        assert np.max(np.abs(dc1)) <= 1e-12


class TestReactionJacobian:
    def test_matches_finite_differences(self, baseline):
        ss = steady_state(baseline)
        J = reaction_jacobian(baseline, ss)
        state = np.array([ss.c1, ss.c2, ss.h])
        eps = 1e-7
        for j in range(3):
            up = state.copy()
            dn = state.copy()
            up[j] += eps
            dn[j] -= eps
            fd = (np.array(reaction_rhs(baseline, *up)) - np.array(reaction_rhs(baseline, *dn))) / (2 * eps)
            assert np.allclose(J[:, j], fd, rtol=1e-6, atol=1e-8)


class TestParameterValidation:
    @pytest.mark.parametrize(
        "bad",
        [dict(a1=0.0), dict(alpha=-0.1), dict(gamma2=float("inf")), dict(b=-1.0), dict(kc2=0.0)],
    )
    def test_rejects_out_of_domain(self, bad):
        kwargs = dict(a1=0.015, a2=0.007, b=3.7, alpha=0.15, delta=0.6, beta=0.05, gamma1=0.1, gamma2=0.3)
        kwargs.update(bad)
        with pytest.raises(ParameterError):
            ModelParams(**kwargs)

    def test_b_zero_is_allowed(self):
        assert default_params(b=0.0).b == 0.0

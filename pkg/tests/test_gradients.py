import numpy as np
import pytest

from charblow import coords, gradients as gr, solver as sv
from charblow.errors import GridError
from charblow.pressure import Domain, make_gamma_law, make_isentropic_law, make_mhd_law
from charblow.profiles import make_profile


def mhd_sin():
    return make_mhd_law(make_profile("sinusoidal", base=1.0, amp=0.1),
                        domain=Domain(x_min=-8.0, x_max=8.0))


class TestAlphaBeta:
    def test_stationary_state_is_neutral(self):
        # u_x = 0 and h_x = -p_mu/c (constant pressure) gives alpha = beta = 0
        law = mhd_sin()
        ch = coords.chart_for(law)
        x = np.linspace(0.0, 2.0 * np.pi, 201)
        h = sv.stationary_profile(ch, 1.0, x)
        g = gr.gradient_field(ch, x, h, np.zeros_like(x), periodic=False)
        assert np.max(np.abs(g.alpha[2:-2])) <= 1e-8
        assert np.max(np.abs(g.beta[2:-2])) <= 1e-8

    def test_riemann_invariant_gradients(self):
        # isentropic chart: s_x = alpha, r_x = beta; s_x = 2, r_x = 0
        u_x, h_x = 1.0, 1.0
        a, b = gr.alpha_beta(u_x, h_x, 0.0, np.sqrt(2.0))
        assert a == pytest.approx(2.0, abs=0)
        assert b == pytest.approx(0.0, abs=0)

    def test_pure_velocity_gradient(self):
        a, b = gr.alpha_beta(1.0, 0.0, 0.0, 1.0)
        assert (a, b) == (1.0, 1.0)


class TestYQ:
    def test_homogeneous_plug(self):
        y, q = gr.y_q(3.0, 0.0, 2.0, 0.0)
        assert y == pytest.approx(3.0 * np.sqrt(2.0), rel=1e-15)

    def test_stationary_with_integral(self):
        y, q = gr.y_q(0.0, 0.0, 1.7, 0.5)
        assert (y, q) == (-0.5, 0.5)

    def test_mhd_cross_check_both_forms(self):
        # both closed expressions for y at u_x = h_x = 0 must agree
        law = make_mhd_law(make_profile("linear", base=1.0, slope=1.0),
                           domain=Domain(x_min=-0.5, x_max=6.0))
        ch = coords.chart_for(law, h0=0.0)
        h, mu = 1.0, 0.0
        c = float(ch.c(h, mu))
        p_mu = float(ch.p_mu(h, mu))
        I = float(ch.I(h, mu))
        alpha, beta = gr.alpha_beta(0.0, 0.0, p_mu, c)
        y, q = gr.y_q(alpha, beta, c, I)
        B, B1 = 1.0, 1.0
        y_closed = (h**1.5 / (4.0 * np.sqrt(B))) * (0.0 + 0.0 - (h / 5.0) * B1 / B)
        assert y == pytest.approx(y_closed, rel=1e-12)
        assert y == pytest.approx(-1.0 / 20.0, rel=1e-12)

    def test_reconstruction_round_trip(self):
        rng = np.random.default_rng(0)
        u_x = rng.normal(size=200)
        h_x = rng.normal(size=200)
        c = rng.uniform(0.5, 3.0, 200)
        p_mu = rng.normal(size=200) * 0.2
        I = rng.normal(size=200) * 0.1
        a, b = gr.alpha_beta(u_x, h_x, p_mu, c)
        y, q = gr.y_q(a, b, c, I)
        u_back, h_back = gr.recover_gradients(y, q, c, I, p_mu)
        assert np.max(np.abs(u_back - u_x)) <= 1e-12
        assert np.max(np.abs(h_back - h_x)) <= 1e-12

    def test_sum_and_difference_identities(self):
        rng = np.random.default_rng(1)
        u_x = rng.normal(size=100)
        h_x = rng.normal(size=100)
        c = rng.uniform(0.5, 3.0, 100)
        p_mu = rng.normal(size=100)
        I = rng.normal(size=100)
        a, b = gr.alpha_beta(u_x, h_x, p_mu, c)
        assert np.allclose(a + b, 2.0 * u_x, atol=1e-13)
        assert np.allclose(a - b, 2.0 * (h_x + p_mu / c), atol=1e-13)
        y, q = gr.y_q(a, b, c, I)
        assert np.allclose(y + q, np.sqrt(c) * (a + b), atol=1e-13)
        assert np.allclose(y - q, np.sqrt(c) * (a - b) - 2.0 * I, atol=1e-13)


class TestClassify:
    def test_table(self):
        fwd, bwd = gr.classify(np.array([1.0, 0.0, -0.5]), np.array([-1.0, 0.0, -0.5]))
        assert list(fwd) == ["R", "N", "C"]
        assert list(bwd) == ["C", "N", "C"]

    def test_scale_invariance(self):
        rng = np.random.default_rng(2)
        a = rng.normal(size=500)
        b = rng.normal(size=500)
        lam = rng.uniform(0.01, 100.0, 500)
        f1, b1 = gr.classify(a, b)
        f2, b2 = gr.classify(lam * a, lam * b)
        assert np.array_equal(f1, f2)
        assert np.array_equal(b1, b2)


class TestDirectionalResiduals:
    def test_constant_state_zero(self):
        law = make_isentropic_law(2.0)
        ch = coords.chart_for(law)
        x = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
        f, b = gr.directional_residuals(ch, x, np.full_like(x, 2.0), np.zeros_like(x))
        assert max(f, b) <= 1e-15  # roundoff of the constant pressure field

    def test_refinement_ratio_on_solver_fields(self):
        law = make_isentropic_law(2.0)
        ch = coords.chart_for(law)

        def resid(n):
            x = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
            h, u = sv.initial_data(ch, x, "sine", p_star=1.0, amplitude=0.1)
            st = sv.make_grid_state(0.0, 2.0 * np.pi, n, "periodic", h=h, u=u)
            res = sv.run(ch, st, 0.4, cfl=0.4, history_stride=10**9, trace_critical=False)
            f, b = gr.directional_residuals(ch, x, res.final.h, res.final.u)
            return max(f, b)

        r1, r2 = resid(200), resid(400)
        assert r1 / r2 >= 3.5

    def test_stationary_entropy_state_small(self):
        law = mhd_sin()
        ch = coords.chart_for(law)
        n = int(round(2.0 * np.pi * 400))  # dx = 1/400
        x = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        h = sv.stationary_profile(ch, 1.0, x)
        f, b = gr.directional_residuals(ch, x, h, np.zeros_like(x))
        assert max(f, b) <= 1e-8

    def test_small_grid_raises(self):
        law = make_isentropic_law(2.0)
        ch = coords.chart_for(law)
        x = np.linspace(0.0, 1.0, 5)
        with pytest.raises(GridError):
            gr.directional_residuals(ch, x, np.ones(5), np.zeros(5))


class TestRcTransition:
    def test_signs(self):
        assert gr.rc_transition_sign(1.0, 1.0) == 1.0     # backward C -> R
        assert gr.rc_transition_sign(0.0, 1.0) == 0.0     # no forced transition
        assert gr.rc_transition_sign(-1.0, 1.0) == -1.0   # opposite direction

    def test_consistency_identity_isentropic(self):
        law = make_isentropic_law(1.4)
        lhs, rhs, diff = gr.rc_consistency_check(law, 1.0, 0.0)
        assert lhs == 0.0 and rhs == 0.0 and diff == 0.0

    def test_consistency_identity_entropy_law(self):
        S = make_profile("linear", base=0.0, slope=0.1)
        law = make_gamma_law(1.4, 1.0, entropy=S)
        _, _, diff = gr.rc_consistency_check(law, 1.0, 0.0)
        assert float(diff) <= 1e-8

    def test_consistency_identity_mhd(self):
        law = make_mhd_law(make_profile("linear", base=1.0, slope=1.0),
                           domain=Domain(x_min=-0.5, x_max=6.0))
        _, _, diff = gr.rc_consistency_check(law, 1.0, 0.0)
        assert float(diff) <= 1e-8


class TestBlowupEquivalenceBounds:
    def test_two_sided_affine_bounds_on_run(self):
        """Gradient variables and raw gradients control each other with
        constants from the recorded solution range."""
        law = mhd_sin()
        ch = coords.chart_for(law)
        n = 400
        x = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        h, u = sv.initial_data(ch, x, "sine", p_star=1.0, amplitude=0.3)
        st = sv.make_grid_state(0.0, 2.0 * np.pi, n, "periodic", h=h, u=u)
        res = sv.run(ch, st, 0.8, cfl=0.45, history_stride=4, trace_critical=False)
        c_all = np.array([ch.c(res.H[k], x) for k in range(res.times.size)])
        pmu_all = np.array([ch.p_mu(res.H[k], x) for k in range(res.times.size)])
        c_inf, c_sup = float(np.min(c_all)), float(np.max(c_all))
        pmu_sup = float(np.max(np.abs(pmu_all)))
        # sup |v_mu| over the occupied range: v_mu = (dh/dx at fixed v) / c
        vmu_sup = 0.0
        for k in range(res.times.size):
            v = ch.v_of_h(res.H[k], x)
            vmu_sup = max(vmu_sup, float(np.max(np.abs(ch.dh_dx(v, x) / ch.c(res.H[k], x)))))
        for k in range(res.times.size):
            g = gr.gradient_field(ch, x, res.H[k], res.U[k])
            big = np.maximum(np.abs(g.alpha), np.abs(g.beta))
            raw = np.maximum(np.abs(g.u_x), np.abs(g.v_x))
            up = raw + c_sup * raw + c_sup * vmu_sup + pmu_sup / c_inf
            assert np.all(big <= up + 1e-9)
            down = big / c_inf + pmu_sup / c_inf**2 + vmu_sup + big
            assert np.all(raw <= down + 1e-9)

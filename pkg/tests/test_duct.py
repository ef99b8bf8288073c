import numpy as np
import pytest

from charblow import coords, duct as dt, gradients as gr
from charblow.errors import ModelError
from charblow.pressure import make_gamma_law
from charblow.profiles import make_profile


def params2():
    return dt.DuctParams(gamma=2.0, K=1.0, c_v=1.0)


class TestTransform:
    def test_constants(self):
        p = params2()
        assert p.K_v == pytest.approx(8.0, rel=1e-14)
        assert p.K_p == pytest.approx(1.0 / 64.0, rel=1e-14)
        assert p.K_c == pytest.approx(1.0 / 16.0, rel=1e-14)

    def test_constants_satisfy_defining_relations(self):
        # the chart maps are mutually consistent only when
        # K_c = (2g/(g-1)) K_p = ((g-1)/2) / K_v
        for g in (1.4, 5.0 / 3.0, 2.0, 3.0):
            p = dt.DuctParams(gamma=g, K=1.7)
            assert p.K_c == pytest.approx(2.0 * g / (g - 1.0) * p.K_p, rel=1e-12)
            assert p.K_c == pytest.approx((g - 1.0) / 2.0 / p.K_v, rel=1e-12)

    def test_z_value(self):
        z, m = dt.zm_transform(params2(), 1.0, 0.0)
        assert float(z) == pytest.approx(2.0 * np.sqrt(2.0), rel=1e-14)
        assert float(m) == 1.0

    def test_round_trip(self):
        p = dt.DuctParams(gamma=1.4, K=2.0)
        rng = np.random.default_rng(0)
        vhat = rng.uniform(0.1, 5.0, 100)
        S = rng.uniform(-0.5, 0.5, 100)
        z, m = dt.zm_transform(p, vhat, S)
        vhat2, S2 = dt.zm_inverse(p, z, m)
        assert np.max(np.abs(vhat2 - vhat) / vhat) <= 1e-12
        assert np.max(np.abs(S2 - S)) <= 1e-12

    def test_gamma_must_exceed_one(self):
        with pytest.raises(ModelError):
            dt.DuctParams(gamma=1.0)

    def test_chart_consistency_with_direct_wavespeed(self):
        # c(z, m) matches the wavespeed computed from (vhat, S) directly
        p = dt.DuctParams(gamma=1.4, K=1.3, c_v=0.9)
        rng = np.random.default_rng(1)
        vhat = rng.uniform(0.2, 3.0, 50)
        S = rng.uniform(-0.4, 0.4, 50)
        a = rng.uniform(0.5, 2.0, 50)
        z, m = dt.zm_transform(p, vhat, S)
        c_chart = p.c(z, m, a)
        g, K = 1.4, 1.3
        c_direct = np.sqrt(K * g) * a ** (-(g - 1) / 2) * vhat ** (-(g + 1) / 2) * np.exp(
            S / (2 * 0.9))
        assert np.max(np.abs(c_chart - c_direct) / c_direct) <= 1e-10


class TestCoefficients:
    def test_uniform_duct_only_quadratic_survives(self):
        co = dt.duct_coeffs(params2(), z=2.0, m=1.0, m_x=0.0, u=0.3, a=1.0,
                            a_d1=0.0, a_d2=0.0)
        assert float(co.k1) > 0.0
        assert float(co.k2) == 0.0
        assert float(co.k3) == 0.0
        assert float(co.A) == 0.0

    def test_example_values(self):
        p = params2()
        z = 2.0 * np.sqrt(2.0)
        co = dt.duct_coeffs(p, z=z, m=1.0, m_x=0.0, u=0.0, a=1.0, a_d1=1.0, a_d2=0.0)
        assert float(co.A) == pytest.approx(-1.0 / (4.0 * p.K_c), rel=1e-13)
        assert float(co.k3_sym) == pytest.approx(0.375 * z, rel=1e-13)

    def test_geometry_term_even_in_slope(self):
        # with a'' = 0 and m_x = 0, A depends on a' only through a'^2
        p = params2()
        co_p = dt.duct_coeffs(p, 2.0, 1.0, 0.0, 0.0, 1.0, +0.7, 0.0)
        co_m = dt.duct_coeffs(p, 2.0, 1.0, 0.0, 0.0, 1.0, -0.7, 0.0)
        assert float(co_p.A) == pytest.approx(float(co_m.A), rel=0, abs=0)


class TestAlphaBeta:
    def test_uniform_duct_reduces_to_quadratic_form(self):
        p = params2()
        co = dt.duct_coeffs(p, 2.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0)
        a, b, ra, rb = dt.duct_alpha_beta(p, u_x=0.4, z_x=0.2, m_x=0.0, z=2.0, m=1.0,
                                          a=1.0, coeffs=co)
        k1 = float(co.k1)
        assert ra == pytest.approx(k1 * (a * b - a**2), rel=1e-13)
        assert rb == pytest.approx(k1 * (a * b - b**2), rel=1e-13)

    def test_stationary_uniform_state_is_fixed(self):
        p = params2()
        co = dt.duct_coeffs(p, 2.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0)
        a, b, ra, rb = dt.duct_alpha_beta(p, 0.0, 0.0, 0.0, 2.0, 1.0, 1.0, coeffs=co)
        assert (a, b, ra, rb) == (0.0, 0.0, 0.0, 0.0)

    def test_geometry_term_enters_both_equations_equally(self):
        # the A-term contribution to alpha' and beta` is identical; the
        # u a'/a drag is the antisymmetric piece (verified symbolically
        # against the duct system; the printed +A/-A pairing fails it)
        p = params2()
        co = dt.duct_coeffs(p, 2.0, 1.0, 0.3, 0.5, 1.2, 0.4, 0.2)
        a, b, ra, rb = dt.duct_alpha_beta(p, 0.1, -0.2, 0.3, 2.0, 1.0, 1.2, coeffs=co)
        co0 = dt.DuctCoefficients(k1=co.k1, k2=co.k2, k3_sym=co.k3_sym,
                                  k3_anti=co.k3_anti, A=np.zeros_like(co.A))
        _, _, ra0, rb0 = dt.duct_alpha_beta(p, 0.1, -0.2, 0.3, 2.0, 1.0, 1.2, coeffs=co0)
        assert (ra - ra0) == pytest.approx(float(co.A), rel=1e-13)
        assert (rb - rb0) == pytest.approx(float(co.A), rel=1e-13)

    def test_matches_euler_path_with_unit_area(self):
        gamma, K, c_v = 2.0, 1.0, 1.0
        p = dt.DuctParams(gamma=gamma, K=K, c_v=c_v)
        S = make_profile("sinusoidal", base=0.0, amp=0.2, wavenumber=0.7)
        law = make_gamma_law(gamma, K, entropy=S, c_v=c_v)
        ch = coords.chart_for(law)
        rng = np.random.default_rng(3)
        n = 100
        x = rng.uniform(-2.0, 2.0, n)
        m = np.exp(S.value(x) / (2.0 * c_v))
        m_x = m * S.d1(x) / (2.0 * c_v)
        z = rng.uniform(1.5, 4.0, n)
        u = rng.uniform(-0.5, 0.5, n)
        z_x = rng.uniform(-0.5, 0.5, n)
        u_x = rng.uniform(-0.5, 0.5, n)
        ones = np.ones(n)
        co = dt.duct_coeffs(p, z, m, m_x, u, ones, np.zeros(n), np.zeros(n))
        al_d, be_d, ra_d, rb_d = dt.duct_alpha_beta(p, u_x, z_x, m_x, z, m, ones, coeffs=co)
        h = m * z
        h_x = m_x * z + m * z_x
        c = ch.c(h, x)
        al_e, be_e = gr.alpha_beta(u_x, h_x, ch.p_mu(h, x), c)
        ra_e, rb_e = gr.alpha_beta_rhs(ch, h, x, al_e, be_e)
        assert np.max(np.abs(al_d - al_e)) <= 1e-10
        assert np.max(np.abs(be_d - be_e)) <= 1e-10
        assert np.max(np.abs(ra_d - ra_e)) <= 1e-10
        assert np.max(np.abs(rb_d - rb_e)) <= 1e-10


def pulse_state(params, area, n, amp=0.05, width=0.6):
    x = np.linspace(-8.0, 8.0, n)
    st = dt.duct_stationary_state(params, area, x, p_star=1.0)
    st.u = amp * np.exp(-(st.x**2) / (2.0 * width**2))
    return st


class TestMetricIdentities:
    def test_uniform_duct_all_zero(self):
        p = params2()
        area = make_profile("constant", level=1.0)
        st = pulse_state(p, area, 200)
        res = dt.run_duct(p, area, st, 0.3, cfl=0.5)
        m = dt.metric_identities_residual(res)
        assert max(m.values()) <= 1e-12

    def test_stationary_gas_time_terms_vanish(self):
        # u = 0 keeps the geometry static: time residuals at machine level
        p = params2()
        area = make_profile("linear", base=1.0, slope=0.1)
        x = np.linspace(-8.0, 8.0, 400)
        st = dt.duct_stationary_state(p, area, x, p_star=1.0)
        res = dt.run_duct(p, area, st, 0.2, cfl=0.5)
        m = dt.metric_identities_residual(res)
        assert m["a_t"] <= 1e-10
        assert m["ad_t"] <= 1e-10

    def test_linear_nozzle_residual_convergence(self):
        p = params2()
        area = make_profile("linear", base=1.0, slope=0.1)

        def worst(n):
            res = dt.run_duct(p, area, pulse_state(p, area, n), 0.5, cfl=0.5)
            m = dt.metric_identities_residual(res)
            return max(m["a_t"], m["a_x"])

        r1, r2 = worst(200), worst(400)
        assert np.log2(r1 / r2) >= 1.8

    def test_curved_nozzle_second_derivative_identities(self):
        # tanh area has a'' != 0, so the (a')_t and (a')_x identities are
        # nontrivial and must converge as well
        p = params2()
        area = make_profile("tanh", base=1.0, amp=0.08, center=0.0, width=2.0)

        def worst(n):
            res = dt.run_duct(p, area, pulse_state(p, area, n), 0.5, cfl=0.5)
            m = dt.metric_identities_residual(res)
            return max(m.values())

        r1, r2 = worst(200), worst(400)
        assert np.log2(r1 / r2) >= 1.8


class TestDuctTrace:
    @pytest.mark.parametrize("family", ["forward", "backward"])
    def test_gradient_residual_convergence(self, family):
        p = params2()
        area = make_profile("linear", base=1.0, slope=0.1)

        def worst(n):
            res = dt.run_duct(p, area, pulse_state(p, area, n), 0.6, cfl=0.5)
            tr = dt.trace_duct(res, 0.0 if family == "forward" else 2.0, family=family)
            return float(np.max(np.abs(tr.residual[3:-3])))

        r1, r2 = worst(200), worst(400)
        assert np.log2(r1 / r2) >= 1.8

    def test_k2_normalization_discriminated_by_residual(self):
        # with the g^(g+1) reading of the m_x coupling the characteristic
        # residual stalls instead of converging (see module docs)
        p = dt.DuctParams(gamma=2.0, K=1.0)
        area = make_profile("constant", level=1.0)
        m_prof = make_profile("sinusoidal", base=1.0, amp=0.25, wavenumber=1.0)
        x = np.linspace(-8.0, 8.0, 800)
        st = dt.duct_stationary_state(p, area, x, p_star=1.0, m_profile=m_prof)
        st.u = 0.15 * np.exp(-(st.x**2) / (2.0 * 0.8**2))
        res = dt.run_duct(p, area, st, 0.6, cfl=0.5)
        tr = dt.trace_duct(res, 0.0)
        good = float(np.max(np.abs(tr.residual[3:-3])))

        # recompute the residual with the wrong k2 normalization: scale the
        # k2 term by g(g+1)/g^(g+1) = 6/8 at gamma = 2
        wrong = None
        fields = [dt._duct_fields(res, k) for k in range(res.times.size)]
        # rebuild rhs with scaled k2 contribution at the sampled points
        from charblow.numerics import deriv_nonuniform, gradient_4th, interp_cubic
        dx = res.x[1] - res.x[0]
        rhs_bad = []
        for k in range(res.times.size):
            z, u, m, xt = res.Z[k], res.U[k], res.m, res.XT[k]
            a = area.value(xt)
            m_x = gradient_4th(m, dx, periodic=False)
            z_x = gradient_4th(z, dx, periodic=False)
            u_x = gradient_4th(u, dx, periodic=False)
            co = dt.duct_coeffs(p, z, m, m_x, u, a, area.d1(xt), area.d2(xt))
            bad_co = dt.DuctCoefficients(k1=co.k1, k2=co.k2 * (6.0 / 8.0),
                                         k3_sym=co.k3_sym, k3_anti=co.k3_anti, A=co.A)
            _, _, ra, _ = dt.duct_alpha_beta(p, u_x, z_x, m_x, z, m, a, coeffs=bad_co)
            rhs_bad.append(ra)
        tr_t, tr_x = tr.t, tr.x
        bad_at = np.array([
            float(interp_cubic(res.x[0], dx, rhs_bad[k], np.array([tr_x[k]]), False)[0])
            for k in range(tr_t.size)
        ])
        wrong = float(np.max(np.abs(deriv_nonuniform(tr_t, tr.value) - bad_at)[3:-3]))
        assert good * 5.0 < wrong  # the correct reading wins decisively

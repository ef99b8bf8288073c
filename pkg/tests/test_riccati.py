import numpy as np
import pytest
from scipy.integrate import solve_ivp

from charblow import coords, gradients as gr, riccati as rc
from charblow.errors import HyperbolicityError, NotApplicableError
from charblow.pressure import Domain, make_isentropic_law, make_mhd_law
from charblow.profiles import make_profile


def mhd_linear():
    return make_mhd_law(make_profile("linear", base=1.0, slope=1.0),
                        domain=Domain(x_min=-0.5, x_max=6.0))


def mhd_sin():
    return make_mhd_law(make_profile("sinusoidal", base=1.0, amp=0.1),
                        domain=Domain(x_min=-8.0, x_max=8.0))


class TestCoefficients:
    def test_homogeneous_law_degenerates(self):
        ch = coords.chart_for(make_isentropic_law(2.0, 1.0))
        h = np.linspace(0.5, 6.0, 200)
        co = rc.coefficients(ch, h, np.zeros_like(h))
        assert np.all(co.a0 == 0.0)
        assert np.all(co.a1 == 0.0)
        assert np.all(co.a2 > 0.0)

    def test_isentropic_a2_value(self):
        # a2 = c_h / (2 sqrt c) with c = sqrt 2, c_h = 3/2 at v = 1; equals
        # the field-model closed form (3/8) sqrt(h/B) at h = 2 sqrt 2, B = 1
        ch = coords.chart_for(make_isentropic_law(2.0, 1.0))
        h = 2.0 * np.sqrt(2.0)
        co = rc.coefficients(ch, h, 0.0)
        expected = 0.75 * 2.0 ** (-0.25)
        assert float(co.a2) == pytest.approx(expected, rel=1e-13)
        assert float(co.a2) == pytest.approx(0.375 * np.sqrt(h), rel=1e-13)

    def test_mhd_linear_field_closed_values(self):
        # B = 1, B' = 1, B'' = 0 at mu = 0, h = 1, h0 = 0:
        # a1 = 1/40, I = -1/80, a0 = -6 (sqrt h / sqrt B) G I^2 with G = 1
        ch = coords.chart_for(mhd_linear(), h0=0.0)
        co = rc.coefficients(ch, 1.0, 0.0)
        assert float(co.a1) == pytest.approx(1.0 / 40.0, rel=1e-12)
        assert float(co.a0) == pytest.approx(-6.0 / 6400.0, rel=1e-12)
        assert float(ch.I(1.0, 0.0)) == pytest.approx(-1.0 / 80.0, rel=1e-12)

    def test_a1_is_minus_derivative_of_weighted_integral(self):
        # a1 = -(2 sqrt(c) I)_h checked by central differences
        ch = coords.chart_for(mhd_sin(), h0=0.0)
        h, mu = 2.5, 1.3
        co = rc.coefficients(ch, h, mu)
        d = 1e-5

        def g(hh):
            return 2.0 * np.sqrt(float(ch.c(hh, mu))) * float(ch.I(hh, mu))

        fd = -(g(h + d) - g(h - d)) / (2.0 * d)
        assert float(co.a1) == pytest.approx(fd, rel=1e-8)

    def test_gamma2_closed_forms_match_spec_shapes(self):
        # a1 = (1/40) (B'/B^2) h^3 and a0 = (h^{11/2}/1280)[B''/B^{5/2} - (6/5)B'^2/B^{7/2}]
        B = make_profile("sinusoidal", base=1.0, amp=0.1)
        ch = coords.chart_for(make_mhd_law(B, domain=Domain(x_min=-8, x_max=8)), h0=0.0)
        rng = np.random.default_rng(0)
        h = rng.uniform(0.8, 4.0, 200)
        mu = rng.uniform(-6.0, 6.0, 200)
        co = rc.coefficients(ch, h, mu)
        Bv, B1, B2 = B.value(mu), B.d1(mu), B.d2(mu)
        a1c = (1.0 / 40.0) * (B1 / Bv**2) * h**3
        a0c = (h**5.5 / 1280.0) * (B2 / Bv**2.5 - 1.2 * B1**2 / Bv**3.5)
        a2c = 0.375 * np.sqrt(h / Bv)
        assert np.max(np.abs(co.a1 - a1c)) <= 1e-12 * max(1, np.max(np.abs(a1c)))
        assert np.max(np.abs(co.a0 - a0c)) <= 1e-12 * max(1, np.max(np.abs(a0c)))
        assert np.max(np.abs(co.a2 - a2c)) <= 1e-12 * np.max(a2c)


class TestPhaseLine:
    def test_symmetric_roots(self):
        pl = rc.phase_roots(1.0, 0.0, 1.0, nu=0.0, branch=+1)
        assert pl.roots == pytest.approx((-1.0, 1.0))

    def test_double_root_at_origin(self):
        pl = rc.phase_roots(0.0, 0.0, 1.0, nu=0.0)
        assert pl.roots == pytest.approx((0.0, 0.0))

    def test_no_real_roots(self):
        pl = rc.phase_roots(-1.0, 0.0, 1.0, nu=0.0)
        assert pl.roots is None
        assert np.all(rc.psi(np.linspace(-5, 5, 11), -1.0, 0.0, 1.0) < 0.0)

    def test_sign_pattern_between_roots(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            a0, a1, a2 = rng.normal(), rng.normal(), rng.uniform(0.1, 2.0)
            nu = rng.uniform(0.0, 0.5)
            br = 1 if rng.random() < 0.5 else -1
            pl = rc.phase_roots(a0, a1, a2, nu=nu, branch=br)
            if pl.roots is None:
                continue
            x1, x2 = pl.roots
            if x2 - x1 > 1e-10:
                mid = 0.5 * (x1 + x2)
                assert rc.psi(mid, a0, a1, a2, nu, br) > 0.0
            assert rc.psi(x2 + 1.0 + abs(x2), a0, a1, a2, nu, br) < 0.0
            assert rc.psi(x1 - 1.0 - abs(x1), a0, a1, a2, nu, br) < 0.0


class TestThreshold:
    def test_homogeneous_case_zero(self):
        assert rc.threshold(rc.KBounds(0.0, 0.0, 1.0, 1.0), nu=0.01) == 0.0

    def test_pure_a0(self):
        assert rc.threshold(rc.KBounds(0.0, 1.0, 1.0, 1.0), nu=0.0) == pytest.approx(-1.0)

    def test_pure_a1_with_nu(self):
        assert rc.threshold(rc.KBounds(1.0, 0.0, 1.0, 1.0), nu=0.5) == pytest.approx(-2.0)

    def test_requires_positive_inf_a2(self):
        with pytest.raises(HyperbolicityError):
            rc.threshold(rc.KBounds(1.0, 1.0, 1.0, 0.0), nu=0.01)

    def test_bounds_over_box(self):
        ch = coords.chart_for(mhd_sin(), h0=0.0)
        b = rc.coefficient_bounds(ch, (1.0, 3.0), (-6.0, 6.0))
        assert b.inf_a2 > 0.0
        assert b.sup_a2 >= b.inf_a2
        N = rc.threshold(b, nu=0.01)
        assert N < 0.0


class TestLifespan:
    def test_exact_homogeneous_blowup(self):
        # y' = -a2 y^2 with a2 = 1, y0 = -2 blows up exactly at t = 0.5
        traj = rc.integrate_reference(lambda t: (0.0, 0.0, 1.0), +1, -2.0, 2.0)
        assert traj.blowup_time == pytest.approx(0.5, abs=1e-6)

    def test_plugin_bound(self):
        assert rc.lifespan_bound(-2.0, -1.0, 1.0, 0.5) == pytest.approx(1.0)

    def test_limit_small_data(self):
        assert rc.lifespan_bound(-1e9, -1e-6, 1.0, 0.5) <= 1e-8

    def test_hypothesis_unmet(self):
        with pytest.raises(NotApplicableError):
            rc.lifespan_bound(-0.5, -1.0, 1.0, 0.5)


class TestReferenceIntegration:
    def test_decay_branch(self):
        traj = rc.integrate_reference(lambda t: (0.0, 0.0, 1.0), +1, 1.0, 1.0)
        assert traj.y[-1] == pytest.approx(0.5, rel=1e-8)

    def test_tanh_solution(self):
        traj = rc.integrate_reference(lambda t: (1.0, 0.0, 1.0), +1, 0.0, 1.0)
        assert traj.y[-1] == pytest.approx(np.tanh(1.0), rel=1e-8)

    def test_invariant_region_above_lower_root(self):
        rng = np.random.default_rng(7)
        count = 0
        while count < 100:
            a0, a1, a2 = rng.normal(), rng.normal(), rng.uniform(0.2, 2.0)
            pl = rc.phase_roots(a0, a1, a2, nu=0.0, branch=+1)
            if pl.roots is None:
                continue
            count += 1
            x1, _ = pl.roots
            y0 = x1 + rng.uniform(0.05, 3.0)
            traj = rc.integrate_reference(lambda t: (a0, a1, a2), +1, y0, 10.0)
            assert traj.blowup_time is None
            assert np.min(traj.y) >= x1 - 1e-6

    def test_branch_symmetry(self):
        # backward dynamics equals forward dynamics under a1 -> -a1
        coeffs = lambda t: (0.3, 0.8 * np.sin(t), 1.0 + 0.1 * np.cos(t))
        flipped = lambda t: (0.3, -0.8 * np.sin(t), 1.0 + 0.1 * np.cos(t))
        fwd = rc.integrate_reference(coeffs, -1, 0.7, 3.0)
        bwd = rc.integrate_reference(flipped, +1, 0.7, 3.0)
        y_at = np.interp(fwd.t, bwd.t, bwd.y)
        assert np.max(np.abs(fwd.y - y_at)) <= 1e-7


class TestEndToEndDecoupling:
    @pytest.mark.parametrize("law_fn,h_bar", [(mhd_sin, 2.6), (mhd_linear, 2.0)])
    def test_alpha_form_matches_y_form_along_path(self, law_fn, h_bar):
        """Integrating the coupled alpha dynamics and mapping through
        y = sqrt(c) alpha - I agrees with integrating the decoupled y
        dynamics directly (validates the integrating-factor construction)."""
        law = law_fn()
        ch = coords.chart_for(law, h0=0.0)

        h_of_t = lambda t: h_bar + 0.3 * np.sin(1.3 * t)
        dh_of_t = lambda t: 0.3 * 1.3 * np.cos(1.3 * t)

        def rhs(t, state):
            x, alpha, y = state
            h = h_of_t(t)
            c = float(ch.c(h, x))
            p_mu = float(ch.p_mu(h, x))
            beta = -(dh_of_t(t) + p_mu) / c
            a_rhs, _ = gr.alpha_beta_rhs(ch, h, x, alpha, beta)
            co = rc.coefficients(ch, h, x)
            y_rhs = float(co.a0) + float(co.a1) * y - float(co.a2) * y**2
            return [c, float(a_rhs), y_rhs]

        alpha0 = 0.4
        x0 = 0.5
        y0 = float(np.sqrt(ch.c(h_of_t(0.0), x0))) * alpha0 - float(ch.I(h_of_t(0.0), x0))
        sol = solve_ivp(rhs, (0.0, 1.0), [x0, alpha0, y0], rtol=1e-10, atol=1e-12,
                        dense_output=True)
        assert sol.success
        x1, alpha1, y1 = sol.y[:, -1]
        h1 = h_of_t(1.0)
        y_from_alpha = float(np.sqrt(ch.c(h1, x1))) * alpha1 - float(ch.I(h1, x1))
        assert y_from_alpha == pytest.approx(y1, abs=1e-6)

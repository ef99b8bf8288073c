import numpy as np
import pytest

from charblow.errors import DomainError, HyperbolicityError, ModelError
from charblow.pressure import (
    Domain,
    make_gamma_law,
    make_isentropic_law,
    make_mhd_law,
    make_tabulated_law,
    validate_law,
)
from charblow.profiles import make_profile


def fd_central(f, x0, d):
    return (f(x0 + d) - f(x0 - d)) / (2.0 * d)


class TestEvaluate:
    def test_isentropic_gamma2_point(self):
        law = make_isentropic_law(2.0, 1.0)
        r = law.evaluate(1.0, 0.0)
        assert r.p == pytest.approx(1.0, abs=0)
        assert r.p_v == pytest.approx(-2.0, abs=0)
        assert r.c == pytest.approx(np.sqrt(2.0), rel=1e-15)

    def test_mhd_unit_field_wavespeed(self):
        law = make_mhd_law(make_profile("constant", level=1.0))
        assert law.evaluate(1.0, 0.0).c == pytest.approx(np.sqrt(2.0), rel=1e-15)

    def test_mhd_plug_values(self):
        law = make_mhd_law(make_profile("constant", level=1.0))
        assert law.evaluate(2.0, 0.0).p == pytest.approx(0.25, abs=0)
        lin = make_mhd_law(make_profile("linear", base=1.0, slope=1.0),
                           domain=Domain(x_min=-0.5, x_max=5.0))
        r = lin.evaluate(1.0, 1.0)
        assert r.p == pytest.approx(2.0, abs=0)
        assert r.p_x == pytest.approx(1.0, abs=0)

    def test_derivative_consistency_fd(self):
        # reported p_v agrees with a central difference of p at 1e-8 relative
        for law in (make_isentropic_law(1.4, 0.8),
                    make_gamma_law(1.4, 1.0, entropy=make_profile("sinusoidal", base=0.0, amp=0.2)),
                    make_mhd_law(make_profile("sinusoidal", base=1.0, amp=0.1))):
            v0, x0 = 1.3, 0.7
            d = 1e-5
            fd = fd_central(lambda v: law.evaluate(v, x0).p, v0, d)
            assert law.evaluate(v0, x0).p_v == pytest.approx(fd, rel=1e-8)

    def test_domain_violation_names_bound(self):
        law = make_isentropic_law(2.0, domain=Domain(v_min=0.1, v_max=10.0))
        with pytest.raises(DomainError, match="v_min"):
            law.evaluate(0.01, 0.0)
        with pytest.raises(DomainError, match="x_max"):
            law.evaluate(1.0, 1e7)

    def test_hyperbolicity_error_on_bad_table(self):
        v = np.linspace(0.5, 2.0, 16)
        x = np.linspace(0.0, 1.0, 6)
        p = 1.0 + np.outer(v, np.ones_like(x))  # p increasing in v
        law = make_tabulated_law(v, x, p)
        with pytest.raises(HyperbolicityError):
            law.evaluate(1.0, 0.5)


class TestMhdBuilder:
    def test_degenerates_to_isentropic_bit_for_bit(self):
        K = 1.3
        iso = make_isentropic_law(2.0, K)
        mhd = make_mhd_law(make_profile("constant", level=K))
        rng = np.random.default_rng(0)
        v = rng.uniform(0.4, 3.0, 256)
        x = rng.uniform(-1.0, 1.0, 256)
        a = iso.evaluate(v, x)
        b = mhd.evaluate(v, x)
        assert np.array_equal(a.p, b.p)
        assert np.array_equal(a.p_v, b.p_v)
        assert np.array_equal(a.p_vv, b.p_vv)

    def test_nonpositive_field_rejected(self):
        with pytest.raises(ModelError):
            make_mhd_law(make_profile("linear", base=1.0, slope=-1.0),
                         domain=Domain(x_min=0.0, x_max=5.0))


class TestInvariants:
    def test_wavespeed_and_curvature_consistency(self):
        rng = np.random.default_rng(42)
        laws = [
            make_isentropic_law(2.0, 1.0),
            make_gamma_law(1.4, 2.0, entropy=make_profile("tanh", base=0.0, amp=0.3)),
            make_mhd_law(make_profile("sinusoidal", base=1.0, amp=0.1)),
        ]
        for law in laws:
            v = rng.uniform(0.3, 4.0, 1000)
            x = rng.uniform(-3.0, 3.0, 1000)
            r = law.evaluate(v, x)
            # c^2 + p_v = 0 exactly by construction
            assert np.max(np.abs(r.c**2 + r.p_v)) <= 1e-13 * np.max(np.abs(r.p_v))
            d = 1e-5
            fd = (law.evaluate(v + d, x).p_v - law.evaluate(v - d, x).p_v) / (2 * d)
            assert np.all(np.abs(r.p_vv - fd) <= 1e-6 * (1.0 + np.abs(r.p_vv)))
            # c_v consistent with -p_vv / (2c)
            assert np.max(np.abs(r.c_v + r.p_vv / (2 * r.c))) <= 1e-10 * np.max(np.abs(r.c_v) + 1)


class TestValidateLaw:
    @staticmethod
    def _grid(v_lo, v_hi, x_lo, x_hi, n=12):
        v = np.linspace(v_lo, v_hi, n)
        x = np.linspace(x_lo, x_hi, n)
        V, X = np.meshgrid(v, x)
        return np.column_stack([V.ravel(), X.ravel()])

    def test_isentropic_passes_and_reports_wavespeed_range(self):
        law = make_isentropic_law(2.0, 1.0)
        rep = validate_law(law, self._grid(0.5, 2.0, -1.0, 1.0))
        assert rep.ok
        c_lo, c_hi = rep.bounds["c"]
        # closed form: c = sqrt(2) v^{-3/2}, extremes at the v-endpoints
        assert c_lo == pytest.approx(np.sqrt(2.0) * 2.0 ** (-1.5), rel=1e-12)
        assert c_hi == pytest.approx(np.sqrt(2.0) * 0.5 ** (-1.5), rel=1e-12)

    def test_violation_detected_at_node(self):
        v = np.linspace(0.5, 2.0, 24)
        x = np.linspace(0.0, 1.0, 8)
        p = np.exp(-np.outer(v, np.ones_like(x)))  # p_v < 0 but p_vv > 0 fails nowhere
        p[10:, :] += 5.0 * np.subtract.outer(v[10:] ** 2, np.zeros_like(x))  # convexity flip
        law = make_tabulated_law(v, x, -p)  # force p_v > 0 somewhere
        with pytest.raises(HyperbolicityError):
            validate_law(law, self._grid(0.6, 1.9, 0.1, 0.9))

    def test_mhd_sup_p_mu_matches_closed_form(self):
        B = make_profile("sinusoidal", base=1.0, amp=0.1)
        law = make_mhd_law(B)
        grid = self._grid(0.5, 2.0, 0.0, 2.0 * np.pi, n=21)
        rep = validate_law(law, grid)
        # |p_mu| = |B'(x)| v^{-2} in this model; maximize over the same samples
        v, x = grid[:, 0], grid[:, 1]
        expected = np.max(np.abs(B.d1(x)) * v ** (-2.0))
        assert rep.bounds["abs_p_mu"][1] == pytest.approx(expected, rel=1e-8)

    def test_empty_grid_rejected(self):
        with pytest.raises(ModelError):
            validate_law(make_isentropic_law(2.0), np.empty((0, 2)))

import numpy as np
import pytest

from lyapcert import damping
from lyapcert.errors import DomainError

ALL_BOUNDED = [damping.linear(), damping.norm_saturation(1.0), damping.clamp(1.0),
               damping.tanh_saturation(1.0), damping.arctan_saturation(1.0)]


class TestApply:
    def test_norm_saturation_branches(self):
        ns = damping.norm_saturation(1.0)
        assert np.allclose(ns.apply([0.3, 0.4]), [0.3, 0.4])     # inside the ball
        assert np.allclose(ns.apply([3.0, 4.0]), [0.6, 0.8])     # rescaled, ||s|| = 5

    def test_zero_maps_to_zero(self):
        for spec in ALL_BOUNDED + [damping.weak_damping(1.0, 0.5)]:
            assert np.allclose(spec.apply(np.zeros(3)), 0.0)

    def test_odd_symmetry_exact(self):
        rng = np.random.default_rng(0)
        s = rng.standard_normal(6) * 10
        for spec in ALL_BOUNDED + [damping.weak_damping(2.0, 0.3)]:
            assert np.array_equal(spec.apply(-s), -spec.apply(s))

    def test_norm_saturation_output_norm(self):
        ns = damping.norm_saturation(2.0)
        rng = np.random.default_rng(1)
        for _ in range(200):
            s = rng.standard_normal(4) * 10 ** rng.uniform(-2, 2)
            out = np.linalg.norm(ns.apply(s))
            assert abs(out - min(np.linalg.norm(s), 2.0)) <= 1e-12 * max(1.0, out)

    def test_weak_damping_entrywise(self):
        wd = damping.weak_damping(c=2.0, q=0.5)
        assert np.allclose(wd.apply([4.0, -9.0]), [4.0, -6.0])


class TestH:
    def test_saturations_have_unit_h(self):
        assert damping.tanh_saturation(1.0).h_eval(7.3) == 1.0

    def test_weak_damping_power(self):
        wd = damping.weak_damping(1.0, 0.5)
        assert abs(wd.h_eval(4.0) - 0.5) < 1e-15

    def test_h_positive_at_zero(self):
        for spec in ALL_BOUNDED:
            assert spec.h_eval(0.0) == 1.0 > 0

    def test_weak_damping_singular_at_zero(self):
        with pytest.raises(DomainError):
            damping.weak_damping(1.0, 0.5).h_eval(0.0)

    def test_h_nondecreasing_for_bounded_kinds(self):
        grid = np.linspace(0.0, 50.0, 101)
        for spec in ALL_BOUNDED:
            vals = [spec.h_eval(x) for x in grid]
            assert all(b >= a for a, b in zip(vals, vals[1:]))


class TestKIntegral:
    def test_constant_h_closed_form(self):
        cl = damping.clamp(1.0)
        assert abs(cl.k_integral(4.0, 1.0) - 16.0 / 3.0) < 1e-14
        assert cl.k_integral(0.0, 1.0) == 0.0

    def test_weak_damping_quadrature_oracle(self):
        # int_0^1 sqrt(v) (sqrt(v))^(q-1) dv = 1/(q/2 + 1) = 0.8 at q = 1/2,
        # frozen from an adaptive-quadrature run ahead of the build
        wd = damping.weak_damping(1.0, 0.5)
        assert abs(wd.k_integral(1.0, 1.0) - 0.8) < 1e-12

    def test_strictly_increasing(self):
        cl = damping.tanh_saturation(2.0)
        grid = np.linspace(0.0, 9.0, 40)
        vals = [cl.k_integral(x, 0.7) for x in grid]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_tabulated_h_quadrature(self):
        # a flat table must reproduce the constant-h closed form through the
        # adaptive-quadrature branch
        spec = damping.DampingSpec(kind="componentwise_saturation",
                                   scalar_rule="clamp", s0=1.0, C1=1.0, C2=1.0,
                                   h_kind="table",
                                   h_table=(np.array([0.0, 100.0]),
                                            np.array([1.0, 1.0])))
        assert abs(spec.k_integral(4.0, 1.0) - 16.0 / 3.0) < 1e-9 * 16.0 / 3.0


class TestVerifyDefinition:
    def test_linear_passes_everything(self):
        rep = damping.verify_definition(damping.linear(), dim=4, trials=2000, seed=0)
        assert rep.item1_pass and rep.item2_pass and rep.item3_pass
        assert rep.sector_margin >= 0.0       # sigma - C1 s vanishes identically

    def test_clamp_scalar_inequality(self):
        rep = damping.verify_definition(damping.clamp(1.0), dim=1, trials=2000, seed=1)
        assert rep.item3_pass and rep.sector_margin >= -1e-12

    def test_monotonicity_ten_thousand_pairs(self):
        for spec in ALL_BOUNDED:
            rep = damping.verify_definition(spec, dim=4, trials=10000, seed=2)
            assert rep.monotonicity_min >= -1e-12

    def test_weak_damping_flags_singularity(self):
        wd = damping.weak_damping(1.0, 0.5)
        rep = damping.verify_definition(wd, dim=1, trials=2000, seed=3)
        assert any("unbounded" in f for f in rep.flags)

    def test_weak_damping_scalar_scan(self):
        # brute-force scan of the sector inequality over a log grid of s:
        # margins are computed only away from zero and h matches |s|^(q-1)
        wd = damping.weak_damping(1.0, 0.5)
        grid = np.logspace(-6, 2, 200)
        for x in grid:
            assert abs(wd.h_eval(x) - x ** (-0.5)) <= 1e-12 * x ** (-0.5)
        # the scalar inequality |x^q - x| <= C2 x^{2q} fails near zero, which is
        # exactly what the report must surface rather than hide
        lhs = np.abs(grid**0.5 - grid)
        rhs_coeff = lhs / grid ** 1.0        # needed C2 at each sample (2q = 1)
        assert rhs_coeff.max() > 1.0         # no uniform C2 = 1 on the log grid

    def test_trials_floor(self):
        with pytest.raises(ValueError):
            damping.verify_definition(damping.linear(), dim=2, trials=50)

    def test_report_rows_shape(self):
        rep = damping.verify_definition(damping.clamp(1.0), dim=2, trials=500, seed=4)
        rows = rep.rows()
        assert [r[0] for r in rows] == ["lipschitz_max_ratio", "monotonicity_min",
                                        "sector_margin_min"]
        assert all(isinstance(r[2], bool) for r in rows)


class TestCatalogueValidation:
    def test_bad_kind(self):
        with pytest.raises(ValueError):
            damping.DampingSpec(kind="dry_friction")

    def test_bad_saturation_level(self):
        with pytest.raises(ValueError):
            damping.clamp(0.0)

    def test_bad_weak_exponent(self):
        with pytest.raises(ValueError):
            damping.weak_damping(1.0, 1.5)

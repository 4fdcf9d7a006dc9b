import numpy as np
import pytest

from modelrisk import (
    ConfigError,
    DomainError,
    FamilyParams,
    GridMismatchError,
    Neighbourhood,
    NumericError,
    OutputFunctional,
    RiskRequest,
    TruncationError,
    apply_functional,
    discretize,
    evaluate_risk,
    from_targets,
    make_profile,
    pull_forward,
    risk_l1,
    risk_l2,
    risk_linf,
    risk_sobolev,
    sample_geodesics,
    shared_grid,
)
from oracles import RayOracle, dense_riemann_risk

VAR = OutputFunctional("var", beta=0.999)


def toy_kernel(example_nb, kind="constant", t_samples=2):
    nb = Neighbourhood(example_nb.base, example_nb.directions, t_samples=t_samples)
    return nb, pull_forward(make_profile(kind), nb)


class TestToyCases:
    def test_two_node_l2_is_sqrt2(self, example_nb, example_p0):
        # weights {0.5, 0.5}, deviations {0, 2}
        nb, kern = toy_kernel(example_nb)
        f = OutputFunctional("user_table", table=(np.array([0.0, 2.0]),))
        np.testing.assert_array_equal(kern.weights[0], [0.5, 0.5])
        assert risk_l2(f, example_p0, kern) == np.sqrt(2.0)
        assert risk_l1(f, example_p0, kern) == 1.0

    def test_two_node_linf(self, example_nb, example_p0):
        nb, kern = toy_kernel(example_nb)
        f = OutputFunctional("user_table", table=(np.array([0.0, 2.0]),))
        z, di, tt = risk_linf(f, example_p0, kern)
        assert (z, di, tt) == (2.0, 0, nb.directions[0].rho)

    def test_constant_functional_all_norms_zero(self, example_p0, example_kernel):
        f = lambda q: 7.0
        assert risk_l1(f, example_p0, example_kernel) == 0.0
        assert risk_l2(f, example_p0, example_kernel) == 0.0
        z, di, tt = risk_linf(f, example_p0, example_kernel)
        assert (z, di, tt) == (0.0, 0, 0.0)
        for s, p in ((0, 1.0), (1, 2.0), (2, 2.0)):
            assert risk_sobolev(f, example_p0, example_kernel, s=s, p=p) == 0.0


class TestMeanAlongSigmaRay:
    def test_near_invariance_matches_oracle(self):
        base = FamilyParams("normal", 0.0, 1.0)
        target = FamilyParams("normal", 0.0, 2.0)
        grid = shared_grid([base, target])
        p0 = discretize(base, grid)
        p1 = discretize(target, grid)
        nb = from_targets(p0, [p1])
        kern = pull_forward(make_profile("linear_decreasing"), nb)
        z1 = risk_l1(OutputFunctional("mean"), p0, kern)
        assert z1 <= 1e-3

        ray = RayOracle(
            dict(family="normal", mu=0.0, sigma=1.0),
            dict(family="normal", mu=0.0, sigma=2.0),
            grid.x0,
            grid.x1,
        )
        oracle = dense_riemann_risk(ray, ray.functional("mean"), cells=2000)
        assert z1 == pytest.approx(oracle["l1"], abs=1e-6)


class TestRunningExampleAgainstOracle:
    def test_var_l1_l2_sanity(self, example_p0, example_kernel, example_grid):
        # a coarse independent check; the tight dense-oracle comparison
        # runs in the acceptance suite at high t resolution
        ray = RayOracle(
            dict(family="normal", mu=2.0, sigma=10.0),
            dict(family="skew_normal", mu=1.95, sigma=9.98, s=2.0),
            example_grid.x0,
            example_grid.x1,
        )
        oracle = dense_riemann_risk(ray, ray.functional("var", beta=0.999), cells=2000)
        z1 = risk_l1(VAR, example_p0, example_kernel)
        z2 = risk_l2(VAR, example_p0, example_kernel)
        assert z1 == pytest.approx(oracle["l1"], rel=3e-3)
        assert z2 == pytest.approx(oracle["l2"], rel=3e-3)


class TestLinfMonotoneRay:
    def test_argmax_at_boundary(self):
        # VaR along an increasing-sigma ray grows monotonically, so with a
        # kernel that keeps the boundary node (constant profile) the max
        # sits at t = rho
        base = FamilyParams("normal", 2.0, 10.0)
        target = FamilyParams("normal", 2.0, 12.0)
        grid = shared_grid([base, target])
        p0 = discretize(base, grid)
        nb = from_targets(p0, [discretize(target, grid)])
        kern = pull_forward(make_profile("constant"), nb)

        f0 = apply_functional(VAR, p0)
        devs = [abs(apply_functional(VAR, n.density) - f0) for n in sample_geodesics(nb)]
        assert all(b >= a for a, b in zip(devs, devs[1:]))

        z, di, tt = risk_linf(VAR, p0, kern)
        assert di == 0
        assert tt == kern.t[0][-1]
        assert z == pytest.approx(devs[-1], rel=1e-12)


class TestSobolevClosedForm:
    def test_linear_table_constant_kernel(self, example_nb, example_p0):
        nb, kern = toy_kernel(example_nb, kind="constant", t_samples=65)
        t = nb.t_grid(0)
        f = OutputFunctional("user_table", table=(t,))
        z = risk_sobolev(f, example_p0, kern, s=1, p=2.0)

        rho = nb.directions[0].rho
        dt = rho / (nb.t_samples - 1)
        # trapezoid on t^2 carries its exact rho dt^2/6 defect
        discrete = np.sqrt(rho**2 / 3.0 + dt**2 / 6.0 + 1.0)
        assert z == pytest.approx(discrete, rel=1e-12)
        assert z == pytest.approx(np.sqrt(rho**2 / 3.0 + 1.0), rel=1e-4)


class TestIdentities:
    def test_sobolev_0_1_is_l1(self, example_p0, example_kernel):
        assert risk_sobolev(VAR, example_p0, example_kernel, s=0, p=1.0) == risk_l1(
            VAR, example_p0, example_kernel
        )

    def test_sobolev_0_2_is_l2(self, example_p0, example_kernel):
        assert risk_sobolev(VAR, example_p0, example_kernel, s=0, p=2.0) == risk_l2(
            VAR, example_p0, example_kernel
        )

    def test_ordering_chain(self, example_p0, example_kernel):
        for f in (VAR, OutputFunctional("mean"), OutputFunctional("std_dev")):
            z1 = risk_l1(f, example_p0, example_kernel)
            z2 = risk_l2(f, example_p0, example_kernel)
            zi, _, _ = risk_linf(f, example_p0, example_kernel)
            assert z1 <= z2 + 1e-9
            assert z2 <= zi + 1e-9

    def test_all_norms_nonnegative(self, example_p0, example_kernel):
        assert risk_l1(VAR, example_p0, example_kernel) >= 0.0
        assert risk_l2(VAR, example_p0, example_kernel) >= 0.0
        assert risk_linf(VAR, example_p0, example_kernel)[0] >= 0.0
        assert risk_sobolev(VAR, example_p0, example_kernel, s=2, p=2.0) >= 0.0


class TestScalingEquivariance:
    def test_affine_functional(self, example_p0, example_kernel):
        a, b = -3.0, 100.0
        f = lambda q: apply_functional(VAR, q)
        g = lambda q: a * apply_functional(VAR, q) + b
        assert risk_l1(g, example_p0, example_kernel) == pytest.approx(
            abs(a) * risk_l1(f, example_p0, example_kernel), rel=1e-12
        )
        assert risk_l2(g, example_p0, example_kernel) == pytest.approx(
            abs(a) * risk_l2(f, example_p0, example_kernel), rel=1e-12
        )
        zf, dif, ttf = risk_linf(f, example_p0, example_kernel)
        zg, dig, ttg = risk_linf(g, example_p0, example_kernel)
        assert zg == pytest.approx(abs(a) * zf, rel=1e-12)
        assert (dig, ttg) == (dif, ttf)
        assert risk_sobolev(g, example_p0, example_kernel, s=1, p=2.0) == pytest.approx(
            abs(a) * risk_sobolev(f, example_p0, example_kernel, s=1, p=2.0), rel=1e-12
        )


class TestRefinementStability:
    def test_doubling_t_samples(self, example_nb, example_p0):
        zs = {}
        for ts in (65, 129):
            nb = Neighbourhood(example_nb.base, example_nb.directions, t_samples=ts)
            kern = pull_forward(make_profile("linear_decreasing"), nb)
            zs[ts] = (risk_l1(VAR, example_p0, kern), risk_l2(VAR, example_p0, kern))
        for a, b in zip(zs[65], zs[129]):
            assert abs(a - b) / abs(b) < 1e-3


class TestDeviationForms:
    def test_relative_is_scaled_absolute(self, example_p0, example_kernel):
        f0 = apply_functional(VAR, example_p0)
        z_abs = risk_l1(VAR, example_p0, example_kernel)
        z_rel = risk_l1(VAR, example_p0, example_kernel, form="relative")
        assert z_rel == pytest.approx(z_abs / abs(f0), rel=1e-12)

    def test_ratio_form_near_one(self, example_p0, example_kernel):
        # f/f(p0) stays near one on a small neighbourhood
        z = risk_l1(VAR, example_p0, example_kernel, form="ratio")
        assert z == pytest.approx(1.0, abs=0.2)

    def test_zero_f0_guard(self, example_p0, example_kernel):
        f = lambda q: 0.0
        with pytest.raises(DomainError):
            risk_l1(f, example_p0, example_kernel, form="relative")
        with pytest.raises(DomainError):
            risk_l1(f, example_p0, example_kernel, form="ratio")

    def test_unknown_form(self, example_p0, example_kernel):
        with pytest.raises(DomainError):
            risk_l1(VAR, example_p0, example_kernel, form="log")


class TestValidation:
    def test_sobolev_needs_enough_nodes(self, example_nb, example_p0):
        nb, kern = toy_kernel(example_nb, t_samples=5)
        f = OutputFunctional("user_table", table=(np.linspace(0.0, 1.0, 5),))
        with pytest.raises(ConfigError):
            risk_sobolev(f, example_p0, kern, s=2, p=2.0)

    def test_sobolev_bad_order(self, example_p0, example_kernel):
        with pytest.raises(ConfigError):
            risk_sobolev(VAR, example_p0, example_kernel, s=3, p=2.0)
        with pytest.raises(ConfigError):
            risk_sobolev(VAR, example_p0, example_kernel, s=1, p=0.5)

    def test_user_table_shape(self, example_p0, example_kernel):
        bad_len = OutputFunctional("user_table", table=(np.zeros(7),))
        with pytest.raises(DomainError):
            risk_l1(bad_len, example_p0, example_kernel)
        bad_count = OutputFunctional("user_table", table=(np.zeros(65), np.zeros(65)))
        with pytest.raises(DomainError):
            risk_l1(bad_count, example_p0, example_kernel)

    def test_request_validation(self):
        with pytest.raises(ConfigError):
            RiskRequest(VAR, ())
        with pytest.raises(ConfigError):
            RiskRequest(VAR, ("l3",))
        with pytest.raises(ConfigError):
            RiskRequest(VAR, (("sobolev", 3, 2.0),))
        with pytest.raises(ConfigError):
            RiskRequest(VAR, (("sobolev", 1, 0.5),))
        with pytest.raises(ConfigError):
            RiskRequest(VAR, ("l1",), form="exotic")
        with pytest.raises(ConfigError):
            RiskRequest(42, ("l1",))

    def test_functional_failure_carries_node_coordinates(self, example_p0, example_kernel):
        calls = {"n": 0}

        def flaky(q):
            calls["n"] += 1
            if calls["n"] == 8:  # 7th node: the base call comes first
                raise TruncationError("synthetic failure")
            return 1.0

        with pytest.raises(NumericError, match=r"direction 0, t = "):
            risk_l1(flaky, example_p0, example_kernel)


class TestEvaluateRisk:
    def test_full_report(self, example_p0, example_kernel):
        req = RiskRequest(VAR, ("l1", "l2", "linf", ("sobolev", 1, 2.0)))
        rep = evaluate_risk(req, example_p0, example_kernel)
        assert set(rep.values) == {"l1", "l2", "linf", "sobolev_1_2"}
        assert rep.f_p0 == apply_functional(VAR, example_p0)
        assert rep.values["l1"] == risk_l1(VAR, example_p0, example_kernel)
        assert rep.values["l2"] == risk_l2(VAR, example_p0, example_kernel)
        zi, di, tt = risk_linf(VAR, example_p0, example_kernel)
        assert rep.values["linf"] == zi
        assert rep.linf_argmax == (di, tt)
        assert rep.kernel_residual == example_kernel.residual
        assert rep.distances == (example_kernel.neighbourhood.directions[0].rho,)

    def test_ray_table_diagnostics(self, example_p0, example_kernel):
        req = RiskRequest(VAR, ("l1",))
        rep = evaluate_risk(req, example_p0, example_kernel)
        ray = rep.rays[0]
        nb = example_kernel.neighbourhood
        assert ray.t.shape == ray.d.shape == ray.f.shape == ray.k.shape == ray.w.shape
        # recomputed sphere distances confirm unit-speed sampling
        np.testing.assert_allclose(ray.d, ray.t, atol=1e-6)
        np.testing.assert_array_equal(ray.t, nb.t_grid(0))
        np.testing.assert_array_equal(ray.k, example_kernel.k[0])
        np.testing.assert_array_equal(ray.w, example_kernel.weights[0])

    def test_duplicate_norms_deduped(self, example_p0, example_kernel):
        req = RiskRequest(VAR, ("l1", "l1", ("sobolev", 0, 1.0)))
        rep = evaluate_risk(req, example_p0, example_kernel)
        assert set(rep.values) == {"l1", "sobolev_0_1"}
        assert rep.values["sobolev_0_1"] == rep.values["l1"]

    def test_grid_mismatch(self, example_kernel):
        other = discretize(
            FamilyParams("normal", 0.0, 1.0),
            shared_grid([FamilyParams("normal", 0.0, 1.0)]),
        )
        with pytest.raises(GridMismatchError):
            evaluate_risk(RiskRequest(VAR, ("l1",)), other, example_kernel)

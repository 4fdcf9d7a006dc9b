import numpy as np
import pytest

from modelrisk import DomainError, FamilyParams, fisher_matrix, fisher_volume_element


class TestNormalAnalytic:
    def test_normal_2_10_matrix(self):
        I = fisher_matrix(FamilyParams("normal", 2.0, 10.0))
        np.testing.assert_array_equal(I, [[0.01, 0.0], [0.0, 0.02]])

    def test_standard_normal(self):
        I = fisher_matrix(FamilyParams("normal", 0.0, 1.0))
        np.testing.assert_array_equal(I, [[1.0, 0.0], [0.0, 2.0]])

    def test_analytic_refuses_skew(self):
        with pytest.raises(DomainError):
            fisher_matrix(FamilyParams("skew_normal", 0.0, 1.0, 1.0), "analytic")


class TestQuadraturePath:
    def test_agrees_with_analytic_across_scales(self):
        for mu, sigma in [(0.0, 0.5), (-3.0, 2.0), (2.0, 10.0), (0.0, 50.0)]:
            p = FamilyParams("normal", mu, sigma)
            Ia = fisher_matrix(p, "analytic")
            Iq = fisher_matrix(p, "quadrature")
            assert np.linalg.norm(Iq - Ia) <= 1e-4 * np.linalg.norm(Ia)

    def test_skew_zero_slant_normal_block(self):
        I = fisher_matrix(FamilyParams("skew_normal", 0.0, 1.0, 0.0))
        np.testing.assert_allclose(I[:2, :2], [[1.0, 0.0], [0.0, 2.0]], atol=1e-4)

    def test_skew_zero_slant_cross_term(self):
        # the mu-s entry at s=0 is sqrt(2/pi)/sigma, which makes the
        # (mu, s) block exactly singular there
        I = fisher_matrix(FamilyParams("skew_normal", 0.0, 1.0, 0.0))
        assert I[0, 2] == pytest.approx(np.sqrt(2.0 / np.pi), abs=1e-6)
        evals = np.linalg.eigvalsh(I)
        assert evals[0] >= -1e-8
        assert abs(np.linalg.det(I)) < 1e-10

    def test_symmetry(self):
        I = fisher_matrix(FamilyParams("skew_normal", 1.0, 2.0, 3.0))
        np.testing.assert_allclose(I, I.T, atol=1e-10)

    def test_strictly_positive_away_from_singular_locus(self):
        for p in [
            FamilyParams("normal", 0.0, 0.7),
            FamilyParams("normal", 5.0, 20.0),
            FamilyParams("skew_normal", 0.0, 1.0, 1.0),
            FamilyParams("skew_normal", -2.0, 3.0, -5.0),
        ]:
            evals = np.linalg.eigvalsh(fisher_matrix(p, "quadrature"))
            assert evals[0] > 0.0

    def test_auto_dispatch(self):
        n = FamilyParams("normal", 0.0, 1.0)
        np.testing.assert_array_equal(fisher_matrix(n, "auto"), fisher_matrix(n, "analytic"))
        sn = FamilyParams("skew_normal", 0.0, 1.0, 2.0)
        assert fisher_matrix(sn).shape == (3, 3)

    def test_unknown_method(self):
        with pytest.raises(DomainError):
            fisher_matrix(FamilyParams("normal", 0.0, 1.0), "montecarlo")


class TestVolumeElement:
    def test_example_value(self):
        v = fisher_volume_element(FamilyParams("normal", 2.0, 10.0))
        assert v == pytest.approx(0.0141421, abs=1e-6)

    def test_standard_normal(self):
        v = fisher_volume_element(FamilyParams("normal", 0.0, 1.0))
        assert v == pytest.approx(np.sqrt(2.0), abs=1e-9)

    def test_sigma_scaling_law(self):
        v1 = fisher_volume_element(FamilyParams("normal", 0.0, 1.0))
        v2 = fisher_volume_element(FamilyParams("normal", 0.0, 2.0))
        assert v2 == pytest.approx(v1 / 4.0, rel=1e-12)

    def test_singular_point_clips_to_zero(self):
        v = fisher_volume_element(FamilyParams("skew_normal", 0.0, 1.0, 0.0))
        assert 0.0 <= v < 1e-5

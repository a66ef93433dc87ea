import numpy as np
import pytest

from signshape import (
    ConvergenceError,
    EllipticalSampler,
    Spectrum,
    estimate_shape,
    sample_sscm,
    shape_eigenvalues,
    sscm_eigensystem,
    sscm_eigenvalues,
)
from signshape.estimators import SscmEstimate
from tests.conftest import random_spectrum


class TestShapeEigenvalues:
    def test_equal_spectrum_is_fixed_point(self):
        for p in (2, 3, 7):
            res = shape_eigenvalues(np.full(p, 1.0 / p))
            assert res.converged
            np.testing.assert_allclose(res.spectrum.values, 1.0 / p, atol=1e-12)

    def test_two_dim_closed_form(self):
        # inverse of the p=2 closed form: lam_i proportional to delta_i^2
        res = shape_eigenvalues([0.75, 0.25])
        assert res.converged
        np.testing.assert_allclose(res.spectrum.values, [0.9, 0.1], atol=1e-9)

    def test_round_trip_random_spectra(self):
        rng = np.random.default_rng(41)
        for p in (2, 3, 5, 10):
            for _ in range(5):
                lam = random_spectrum(rng, p)
                forward = sscm_eigenvalues(lam)
                res = shape_eigenvalues(forward)
                assert res.converged
                assert np.abs(res.spectrum.values - lam).max() < 1e-8

    def test_support_preservation(self):
        forward = sscm_eigenvalues([0.6, 0.4, 0.0])
        res = shape_eigenvalues(forward)
        assert res.converged
        assert res.spectrum.values[2] == 0.0
        np.testing.assert_allclose(res.spectrum.values[:2], [0.6, 0.4], atol=1e-9)

    def test_degenerate_target(self):
        res = shape_eigenvalues([1.0, 0.0, 0.0])
        assert res.converged
        np.testing.assert_array_equal(res.spectrum.values, [1.0, 0.0, 0.0])

    def test_tied_targets_give_tied_results(self):
        forward = sscm_eigenvalues([0.4, 0.2, 0.2, 0.2])
        res = shape_eigenvalues(forward)
        assert res.converged
        out = res.spectrum.values
        assert out[1] == out[2] == out[3]
        assert out[0] > out[1]

    def test_monotone_targets_give_monotone_results(self):
        rng = np.random.default_rng(42)
        lam = random_spectrum(rng, 6)
        res = shape_eigenvalues(sscm_eigenvalues(lam))
        assert np.all(np.diff(res.spectrum.values) < 0)

    def test_residual_definition(self):
        rng = np.random.default_rng(43)
        target = sscm_eigenvalues(random_spectrum(rng, 4))
        res = shape_eigenvalues(target, tol=1e-9)
        back = sscm_eigenvalues(res.spectrum)
        observed = np.abs(back.values - target.values).max()
        assert observed <= max(2.0 * res.residual, 1e-9)

    def test_non_convergence_reports_best_iterate(self):
        target = sscm_eigenvalues([0.97, 0.02, 0.01])
        res = shape_eigenvalues(target, tol=1e-13, max_iter=1)
        assert not res.converged
        assert res.iterations == 1
        assert res.residual > 0.0
        assert isinstance(res.spectrum, Spectrum)

    def test_rejects_bad_tolerance(self):
        with pytest.raises(ValueError):
            shape_eigenvalues([0.6, 0.4], tol=0.0)

    def test_rejects_invalid_simplex_point(self):
        with pytest.raises(ValueError):
            shape_eigenvalues([0.5, -0.5])


class TestSscmEigensystem:
    def test_clamps_negative_roundoff_with_warning(self):
        mat = np.diag([0.8, 0.2 + 1e-13, -1e-13])
        with pytest.warns(RuntimeWarning):
            spectrum, _ = sscm_eigensystem(mat)
        assert spectrum.values[-1] == 0.0
        assert abs(spectrum.values.sum() - 1.0) < 1e-12

    def test_rejects_asymmetric_matrix(self):
        with pytest.raises(ValueError):
            sscm_eigensystem(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_rejects_zero_matrix(self):
        with pytest.raises(ValueError):
            sscm_eigensystem(np.zeros((3, 3)))


class TestEstimateShape:
    def test_spherical_fixed_points(self):
        for p in (2, 5):
            est = SscmEstimate(matrix=np.eye(p) / p, kind="sscm", n_used=10, center=np.zeros(p))
            shape = estimate_shape(est)
            np.testing.assert_allclose(shape.matrix, np.eye(p) / p, atol=1e-10)
            assert shape.inversion.converged

    def test_eigenvector_passthrough_commutes(self):
        rng = np.random.default_rng(51)
        X = rng.standard_normal((300, 4)) * np.array([2.0, 1.0, 0.5, 0.25])
        est = sample_sscm(X)
        shape = estimate_shape(est)
        comm = shape.matrix @ est.matrix - est.matrix @ shape.matrix
        assert np.abs(comm).max() < 1e-10
        assert abs(np.trace(shape.matrix) - 1.0) < 1e-12

    def test_gaussian_simulation_recovers_shape(self):
        # single large Gaussian sample; tolerance from a nonparametric bootstrap
        lam_true = np.array([0.9, 0.1])
        sampler = EllipticalSampler(shape_root=np.diag(np.sqrt(lam_true)), seed=52)
        n = 50_000
        X = sampler.sample(n)
        est = sample_sscm(X)
        shape = estimate_shape(est)
        recovered = np.sort(np.linalg.eigvalsh(shape.matrix))[::-1]

        rng = np.random.default_rng(53)
        boot = np.empty((40, 2))
        for b in range(40):
            idx = rng.integers(0, n, size=n)
            boot_est = sample_sscm(X[idx])
            boot_shape = estimate_shape(boot_est)
            boot[b] = np.sort(np.linalg.eigvalsh(boot_shape.matrix))[::-1]
        se = boot.std(axis=0, ddof=1)
        assert np.all(np.abs(recovered - lam_true) < 4.0 * se)

    def test_failure_carries_partial_result(self):
        est = SscmEstimate(
            matrix=np.diag([0.97, 0.02, 0.01]), kind="sscm", n_used=100, center=np.zeros(3)
        )
        with pytest.raises(ConvergenceError) as err:
            estimate_shape(est, tol=1e-14, max_iter=1)
        partial = err.value.result
        assert partial is not None
        assert partial.matrix.shape == (3, 3)
        assert not partial.inversion.converged

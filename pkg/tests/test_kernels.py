import math

import numpy as np
import pytest

from eipvs import ElasticParams, TimeSeries, eip, eip_distance
from eipvs.kernels import (
    KernelSpec,
    centered_distance_matrix,
    check_psd,
    gram_matrix,
    jacobi_eigenvalues,
    kernel_eval,
    write_gram_csv,
    write_precomputed_kernel,
)

from helpers import random_series


class TestJacobi:
    def test_matches_lapack(self):
        rng = np.random.default_rng(0)
        for n in (1, 2, 5, 20, 40):
            X = rng.standard_normal((n, n))
            S = X + X.T
            np.testing.assert_allclose(jacobi_eigenvalues(S), np.linalg.eigvalsh(S), atol=1e-10 * max(1, np.abs(S).max()))

    def test_diagonal_input(self):
        np.testing.assert_array_equal(jacobi_eigenvalues(np.diag([3.0, -1.0, 2.0])), [-1.0, 2.0, 3.0])

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            jacobi_eigenvalues([[1.0, 2.0], [0.0, 1.0]])


class TestCheckPsd:
    def test_identity(self):
        rep = check_psd(np.eye(4))
        assert rep.is_psd and rep.min_eigenvalue == pytest.approx(1.0)

    def test_indefinite(self):
        rep = check_psd([[1.0, 2.0], [2.0, 1.0]])
        assert not rep.is_psd
        assert rep.min_eigenvalue == pytest.approx(-1.0)
        assert rep.max_eigenvalue == pytest.approx(3.0)

    def test_methods_agree(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((10, 4))
        a, b = check_psd(X @ X.T), check_psd(X @ X.T, method="numpy")
        assert a.is_psd and b.is_psd
        np.testing.assert_allclose(a.eigenvalues, b.eigenvalues, atol=1e-10)


class TestKernelEval:
    def test_gaussian_self_is_one(self):
        rng = np.random.default_rng(2)
        A = random_series(rng, 9)
        for sigma in (0.1, 1.0, 5.0):
            assert kernel_eval(KernelSpec("gaussian_eip", sigma=sigma), A, A) == 1.0

    def test_gaussian_value(self):
        A, B = TimeSeries([1.0], [0.0]), TimeSeries([2.0], [0.0])
        for nu in (0.0, 1.0, 50.0):
            v = kernel_eval(KernelSpec("gaussian_eip", ElasticParams(nu=nu), sigma=1.0), A, B)
            assert v == pytest.approx(math.exp(-0.5), rel=1e-15)

    def test_polynomial_degree_one(self):
        rng = np.random.default_rng(3)
        A, B = random_series(rng, 6), random_series(rng, 8)
        assert kernel_eval(KernelSpec("polynomial_eip", p=1), A, B) == eip(A, B)

    def test_exp_neg_distance(self):
        rng = np.random.default_rng(4)
        A, B = random_series(rng, 6), random_series(rng, 8)
        spec = KernelSpec("exp_neg_distance_p", p=1.5, rate=0.3)
        assert kernel_eval(spec, A, B) == pytest.approx(math.exp(-0.3 * eip_distance(A, B) ** 1.5), rel=1e-12)

    def test_gaussian_euclid(self):
        A, B = TimeSeries([1.0, 2.0]), TimeSeries([1.0, 4.0])
        assert kernel_eval(KernelSpec("gaussian_euclid", sigma=2.0), A, B) == pytest.approx(math.exp(-0.5))

    def test_symmetric(self):
        rng = np.random.default_rng(5)
        A, B = random_series(rng, 7, 2), random_series(rng, 7, 2)
        for kind in ("gaussian_eip", "polynomial_eip", "exp_eip", "exp_neg_distance_p"):
            spec = KernelSpec(kind, p=2)
            assert kernel_eval(spec, A, B) == kernel_eval(spec, B, A)

    @pytest.mark.parametrize("kw", [{"sigma": 0}, {"kind": "polynomial_eip", "p": 1.5},
                                    {"kind": "exp_neg_distance_p", "p": 3},
                                    {"kind": "exp_neg_distance_p", "rate": 0}, {"kind": "rbf"}])
    def test_invalid_spec(self, kw):
        with pytest.raises(ValueError):
            KernelSpec(**kw)


class TestGram:
    def test_single_item(self):
        A = TimeSeries([1.0, 2.0])
        K = gram_matrix(KernelSpec("exp_eip", ElasticParams(nu=0.5)), [A])
        assert K.shape == (1, 1) and K[0, 0] == pytest.approx(math.exp(eip(A, A, ElasticParams(nu=0.5))))

    def test_gaussian_diagonal_and_psd(self):
        rng = np.random.default_rng(6)
        items = [random_series(rng, int(rng.integers(2, 15))) for _ in range(10)]
        K = gram_matrix(KernelSpec("gaussian_eip", ElasticParams(nu=0.2), sigma=2.0), items, threads=2)
        np.testing.assert_array_equal(np.diag(K), np.ones(10))
        assert np.array_equal(K, K.T)
        ev = np.linalg.eigvalsh(K)
        assert ev[0] >= -1e-8 * ev[-1]

    def test_centered_distance_is_psd(self):
        rng = np.random.default_rng(7)
        items = [random_series(rng, int(rng.integers(2, 15))) for _ in range(20)]
        p = ElasticParams(nu=0.3)
        D = np.array([[eip_distance(a, b, p) for b in items] for a in items])
        rep = check_psd(centered_distance_matrix(D))
        assert rep.is_psd

    def test_exports(self, tmp_path):
        K = np.array([[1.0, 0.25], [0.25, 1.0]])
        write_gram_csv(tmp_path / "k.csv", K, ["x", "y"])
        assert (tmp_path / "k.csv").read_text().splitlines() == ["id,x,y", "x,1.0,0.25", "y,0.25,1.0"]
        write_precomputed_kernel(tmp_path / "k.svm", K, ["1", "-1"])
        assert (tmp_path / "k.svm").read_text().splitlines() == ["1 0:1 1:1.0 2:0.25", "-1 0:2 1:0.25 2:1.0"]

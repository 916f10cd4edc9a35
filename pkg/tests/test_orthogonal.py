import mpmath
import numpy as np
import pytest

from eipvs import ElasticParams, TimeSeries, eip, embed_on_grid, oplus, scale, validate
from eipvs.orthogonal import LinearDependenceError, gram_schmidt, make_sincos_basis, make_spike_basis

SPIKE_PARAMS = ElasticParams(nu=0.01, precision=80)


def dense_gram_schmidt(vectors, grid, nu, dps=80):
    """Modified Gram-Schmidt on grid vectors under <x, y> = x^T E y."""
    with mpmath.workdps(dps):
        n = len(grid)
        E = mpmath.matrix(n, n)
        for i in range(n):
            for j in range(n):
                d = mpmath.mpf(grid[i]) - mpmath.mpf(grid[j])
                E[i, j] = mpmath.exp(-mpmath.mpf(nu) * d * d)

        def ip(x, y):
            return (x.T * E * y)[0]

        out = []
        for v in vectors:
            w = mpmath.matrix([mpmath.mpf(x) for x in v])
            for q in out:
                w = w - ip(w, q) * q
            out.append(w / mpmath.sqrt(ip(w, w)))
        return [[x for x in q] for q in out]


@pytest.fixture(scope="module")
def spike_output():
    return gram_schmidt(make_spike_basis(11), SPIKE_PARAMS)


class TestBases:
    def test_spike_first_members(self):
        eps = 2.0 ** -52
        fam = make_spike_basis(11, eps)
        assert fam[0] == TimeSeries([1.0], [0.0])
        assert fam[1] == TimeSeries([eps, 1.0], [0.0, 0.1])
        assert all(validate(s).in_u_star for s in fam)
        assert make_spike_basis(1)[0] == TimeSeries([1.0], [0.0])

    def test_sincos_shape(self):
        fam = make_sincos_basis(1, 16)
        assert len(fam) == 2 and all(len(s) == 16 for s in fam)
        assert all(validate(s).in_u_star for s in make_sincos_basis(4, 128))

    def test_sincos_euclidean_orthogonal(self):
        fam = make_sincos_basis(4, 128)
        p = ElasticParams(nu=1e9)
        G = np.array([[eip(a, b, p) for b in fam] for a in fam])
        np.testing.assert_allclose(G, 64 * np.eye(8), atol=1e-9)

    def test_sincos_not_orthogonal_when_elastic(self):
        fam = make_sincos_basis(4, 128)
        p = ElasticParams(nu=0.01)
        G = np.array([[eip(a, b, p) for b in fam] for a in fam])
        assert np.abs(G - np.diag(np.diag(G))).max() > 1e-3


class TestGramSchmidt:
    def test_orthonormal_input_unchanged(self):
        fam = [TimeSeries([1.0], [float(k)]) for k in range(5)]
        out = gram_schmidt(fam, ElasticParams(nu=1e6))
        for a, b in zip(fam, out):
            np.testing.assert_allclose(b.values, a.values, atol=1e-12)
            np.testing.assert_array_equal(b.times, a.times)

    def test_dependent_pair(self):
        A = TimeSeries([1.0, -2.0, 0.5])
        with pytest.raises(LinearDependenceError) as info:
            gram_schmidt([A, scale(2, A)])
        assert info.value.index == 1

    def test_random_family(self):
        rng = np.random.default_rng(0)
        fam = [TimeSeries(rng.standard_normal(k + 3), np.sort(rng.choice(20, k + 3, replace=False)).astype(float))
               for k in range(6)]
        p = ElasticParams(nu=0.5)
        out = gram_schmidt(fam, p)
        G = np.array([[eip(a, b, p) for b in out] for a in out])
        np.testing.assert_allclose(G, np.eye(6), atol=1e-8)

    def test_spike_family_needs_extra_precision(self):
        # the elastic matrix of the spike grid is too ill-conditioned for doubles
        with pytest.raises(LinearDependenceError):
            gram_schmidt(make_spike_basis(11), ElasticParams(nu=0.01))

    def test_spike_orthonormal(self, spike_output):
        n = len(spike_output)
        assert n == 11
        with mpmath.workdps(80):
            for i in range(n):
                assert abs(eip(spike_output[i], spike_output[i], SPIKE_PARAMS) - 1) <= 1e-8
                for j in range(i + 1, n):
                    assert abs(eip(spike_output[i], spike_output[j], SPIKE_PARAMS)) <= 1e-8

    def test_spike_sign_pattern(self, spike_output):
        for k, q in enumerate(spike_output[1:], start=2):
            assert len(q) == k
            assert q.values[-1, 0] > 0
            assert q.values[-2, 0] < 0

    def test_spike_matches_dense_oracle(self, spike_output):
        grid = np.arange(11) / 10
        vecs = [embed_on_grid(s, grid) for s in make_spike_basis(11)]
        ref = dense_gram_schmidt(vecs, grid, 0.01, dps=100)
        for q, r in zip(spike_output, ref):
            got = embed_on_grid(q, grid)
            for x, y in zip(got, r):
                assert abs(x - y) <= 1e-8

    def test_span_preserved(self, spike_output):
        fam = make_spike_basis(11)
        with mpmath.workdps(80):
            for v in fam[::3]:
                hv = TimeSeries(np.vectorize(mpmath.mpf, otypes=[object])(v.values), v.times)
                rec = TimeSeries.empty()
                for q in spike_output:
                    rec = oplus(rec, scale(eip(hv, q, SPIKE_PARAMS), q))
                resid = oplus(hv, scale(-1, rec))
                err = mpmath.sqrt(abs(eip(resid, resid, SPIKE_PARAMS))) if not resid.is_empty else 0
                assert err <= 1e-6

    def test_requires_eip_mode(self):
        with pytest.raises(ValueError):
            gram_schmidt([TimeSeries([1.0])], ElasticParams(alpha=2))

import math
import time

import numpy as np
import pytest

from eipvs import ElasticParams, LabeledDataset, TimeSeries, eip, eip_distance
from eipvs.index import build_elastic_matrix, index_corpus, load_index, query_knn, query_scores, save_index

from helpers import random_series


class TestElasticMatrix:
    def test_zero_stiffness_all_ones(self):
        np.testing.assert_array_equal(build_elastic_matrix([1, 2, 3], 0).entries, np.ones((3, 3)))

    def test_large_stiffness_identity(self):
        np.testing.assert_array_equal(build_elastic_matrix(np.arange(6.0), 1e6).entries, np.eye(6))

    def test_two_points(self):
        E = build_elastic_matrix([0.0, 1.0], 1.0).entries
        np.testing.assert_allclose(E, [[1, math.exp(-1)], [math.exp(-1), 1]], rtol=1e-15)

    def test_laplace_and_symmetry(self):
        E = build_elastic_matrix(np.cumsum(np.random.default_rng(0).uniform(0.1, 1, 30)), 0.7, "laplace").entries
        assert np.array_equal(E, E.T)
        assert np.all(E > 0) and np.all(E <= 1) and np.all(np.diag(E) == 1)

    def test_bad_grid(self):
        with pytest.raises(ValueError):
            build_elastic_matrix([1.0, 1.0], 1.0)
        with pytest.raises(ValueError):
            build_elastic_matrix([], 1.0)


class TestIndex:
    def test_empty_dataset(self):
        idx = index_corpus(LabeledDataset([], []), grid=[1.0, 2.0])
        assert len(idx) == 0

    def test_identity_matrix_stores_input(self):
        b = TimeSeries([1.5, -2.0, 3.0])
        idx = index_corpus([b], nu=1e6)
        np.testing.assert_array_equal(idx.vectors[0], [1.5, -2.0, 3.0])
        assert idx.self_products[0] == 1.5 ** 2 + 4 + 9

    def test_all_ones_zero_stiffness(self):
        idx = index_corpus([TimeSeries([1.0, 1.0])], nu=0)
        np.testing.assert_array_equal(idx.vectors[0], [2.0, 2.0])
        assert idx.self_products[0] == 4.0

    def test_empty_query_scores_zero(self):
        rng = np.random.default_rng(1)
        idx = index_corpus([random_series(rng, 5, grid=np.arange(1.0, 9.0)) for _ in range(4)], grid=np.arange(1.0, 9.0))
        assert all(s == 0 for _, s in query_scores(idx, TimeSeries.empty()))

    def test_off_grid_rejected(self):
        idx = index_corpus([TimeSeries([1.0, 2.0])])
        with pytest.raises(ValueError):
            idx.scores(TimeSeries([1.0], [1.5]))

    def test_matrix_form_matches_recursion(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            n = int(rng.integers(2, 200))
            d = int(rng.choice([1, 2]))
            grid = np.arange(1.0, n + 1)
            nu = float(rng.choice([0.0, 0.01, 1.0]))
            A = random_series(rng, int(rng.integers(1, n + 1)), d, grid=grid)
            B = random_series(rng, int(rng.integers(1, n + 1)), d, grid=grid)
            idx = index_corpus([B], grid=grid, nu=nu)
            ref = eip(A, B, ElasticParams(nu=nu))
            assert abs(idx.scores(A)[0] - ref) <= 1e-8 * max(1.0, abs(ref))

    def test_knn_matches_brute_force(self):
        rng = np.random.default_rng(3)
        grid = np.arange(1.0, 41.0)
        items = [random_series(rng, 40, grid=grid) for _ in range(50)]
        data = LabeledDataset(items, [str(i % 3) for i in range(50)])
        p = ElasticParams(nu=0.1)
        idx = index_corpus(data, nu=0.1)
        for _ in range(10):
            q = random_series(rng, int(rng.integers(5, 41)), grid=grid)
            brute = min(range(50), key=lambda i: (eip_distance(q, items[i], p), str(i)))
            got = query_knn(idx, q, 1)[0]
            assert got[0] == str(brute)
            assert got[2] == pytest.approx(eip_distance(q, items[brute], p), rel=1e-6, abs=1e-9)

    def test_knn_self_and_all(self):
        rng = np.random.default_rng(4)
        items = [TimeSeries(rng.standard_normal(16)) for _ in range(8)]
        idx = index_corpus(items, nu=0.5)
        assert query_knn(idx, items[5], 1)[0][0] == "5"
        assert query_knn(idx, items[5], 1)[0][2] == pytest.approx(0.0, abs=1e-6)
        every = query_knn(idx, items[0], 8)
        assert len(every) == 8
        assert [r[2] for r in every] == sorted(r[2] for r in every)
        with pytest.raises(ValueError):
            query_knn(idx, items[0], 0)


class TestPersistence:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(5)
        grid = np.arange(1.0, 21.0)
        items = [random_series(rng, int(rng.integers(3, 21)), 2, grid=grid) for _ in range(6)]
        data = LabeledDataset(items, ["a", "b", "ü", "a", "b", "c"], ids=[f"s{i}" for i in range(6)])
        idx = index_corpus(data, nu=0.37, kernel="laplace")
        path = tmp_path / "x.eipx"
        save_index(idx, path)
        back = load_index(path)
        assert back.ids == idx.ids and back.labels == idx.labels and back.dim == 2
        assert back.matrix.kernel == "laplace" and back.matrix.nu == 0.37
        assert back.vectors.tobytes() == idx.vectors.tobytes()
        assert back.self_products.tobytes() == idx.self_products.tobytes()
        assert back.matrix.entries.tobytes() == idx.matrix.entries.tobytes()
        save_index(back, tmp_path / "y.eipx")
        assert (tmp_path / "y.eipx").read_bytes() == path.read_bytes()

    def test_header(self, tmp_path):
        idx = index_corpus([TimeSeries([1.0, 2.0])])
        save_index(idx, tmp_path / "h")
        raw = (tmp_path / "h").read_bytes()
        assert raw[:4] == b"EIPX"
        assert int.from_bytes(raw[4:8], "little") == 1

    def test_bad_magic(self, tmp_path):
        (tmp_path / "bad").write_bytes(b"NOPE" + bytes(40))
        with pytest.raises(ValueError):
            load_index(tmp_path / "bad")


def _median_time(fn, repeats=5):
    fn()
    out = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return sorted(out)[len(out) // 2]


class TestScaling:
    def test_query_linear_recursion_quadratic(self):
        rng = np.random.default_rng(6)
        q_times, r_times = [], []
        for n in (256, 512, 1024):
            grid = np.arange(1.0, n + 1)
            items = [TimeSeries(rng.standard_normal(n), grid) for _ in range(200)]
            idx = index_corpus(items, nu=0.1)
            q = TimeSeries(rng.standard_normal(n), grid)
            flat = idx.embed(q)
            V = idx.vectors
            # repeat the scoring so one sample is well above timer resolution
            q_times.append(_median_time(lambda: [V @ flat for _ in range(20)]))
            r_times.append(_median_time(lambda: eip(q, items[0], ElasticParams(nu=0.1)), 3))
        q_ratio = [b / a for a, b in zip(q_times, q_times[1:])]
        r_ratio = [b / a for a, b in zip(r_times, r_times[1:])]
        assert all(r < 3 for r in q_ratio), q_ratio
        assert all(r > 3.2 for r in r_ratio), r_ratio

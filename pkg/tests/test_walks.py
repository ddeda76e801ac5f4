import tracemalloc

import numpy as np
import pytest

from symbed.graph import from_arcs
from symbed.rng import CounterStream
from symbed.synth import random_graph
from symbed.walks import (HashVector, WalkConfig, dump_hashes, hash_all,
                          hash_node, hash_row, random_walk,
                          sample_walk_length, walk_lengths)


def point_mass(length, max_len=None):
    """Distribution putting all probability on one walk length."""
    m = max_len or length
    w = np.zeros(m)
    w[length - 1] = 1.0
    return w


class TestWalkConfig:
    def test_probs_must_sum_to_one(self):
        with pytest.raises(ValueError):
            WalkConfig(length_probs=np.array([0.5, 0.4]))

    def test_negative_prob_rejected(self):
        with pytest.raises(ValueError):
            WalkConfig(length_probs=np.array([1.5, -0.5]))

    def test_epsilon_range(self):
        with pytest.raises(ValueError):
            WalkConfig(epsilon=1.0)

    def test_defaults(self):
        cfg = WalkConfig()
        assert cfg.max_len == 5
        assert cfg.num_walks == 1024
        assert cfg.epsilon == 0.005
        assert cfg.mean_len == pytest.approx(3.0)


class TestSampleWalkLength:
    def test_point_mass_on_five(self):
        cfg = WalkConfig(length_probs=point_mass(5))
        rng = np.random.default_rng(0)
        assert all(sample_walk_length(cfg, rng) == 5 for _ in range(50))

    def test_single_length(self):
        cfg = WalkConfig(length_probs=np.array([1.0]))
        rng = np.random.default_rng(0)
        assert all(sample_walk_length(cfg, rng) == 1 for _ in range(50))

    def test_uniform_empirical_frequencies(self):
        # multinomial: each count ~ Binomial(n, 0.2), sigma = sqrt(n p (1-p))
        cfg = WalkConfig()
        rng = np.random.default_rng(42)
        n = 100_000
        draws = np.array([sample_walk_length(cfg, rng) for _ in range(n)])
        sigma = np.sqrt(n * 0.2 * 0.8)
        for length in range(1, 6):
            assert abs((draws == length).sum() - n * 0.2) < 3 * sigma

    def test_shared_length_array_is_deterministic(self):
        cfg = WalkConfig(num_walks=64, seed=9)
        assert np.array_equal(walk_lengths(cfg), walk_lengths(cfg))


class TestRandomWalk:
    def test_directed_path(self):
        g = from_arcs(3, [0, 1], [1, 2], directed=True)
        counts = random_walk(g, 0, 2, CounterStream(0, 0))
        assert counts == {0: 1, 1: 1, 2: 1}

    def test_dangling_start(self):
        g = from_arcs(8, [0], [1], directed=True)
        counts = random_walk(g, 7, 5, CounterStream(0, 7))
        assert counts == {7: 1}

    def test_two_cycle_alternation(self, two_cycle):
        counts = random_walk(two_cycle, 0, 3, CounterStream(0, 0))
        assert counts == {0: 2, 1: 2}

    def test_start_out_of_range(self, two_cycle):
        with pytest.raises(IndexError):
            random_walk(two_cycle, 2, 1, CounterStream(0, 2))

    def test_walk_visits_length_plus_one(self):
        g = random_graph(40, 6, seed=1)
        for wl in (1, 3, 5):
            counts = random_walk(g, 3, wl, CounterStream(5, 3))
            assert sum(counts.values()) == wl + 1


class TestHashNode:
    def test_threshold_strict_less(self):
        # 2-cycle, one walk of length 4 -> visits 0,1,0,1,0 -> counts {0:3, 1:2}
        g = from_arcs(2, [0, 1], [1, 0], directed=True)
        cfg = WalkConfig(length_probs=point_mass(4), num_walks=1, epsilon=0.4, seed=1)
        h = hash_node(g, 0, cfg)
        # threshold 5 * 0.4 = 2.0: count 2 is NOT dropped (strictly-less rule)
        assert h.to_dict() == {0: 0.6, 1: 0.4}

    def test_threshold_drops_minority(self):
        g = from_arcs(2, [0, 1], [1, 0], directed=True)
        cfg = WalkConfig(length_probs=point_mass(4), num_walks=1, epsilon=0.5, seed=1)
        h = hash_node(g, 0, cfg)
        # threshold 2.5 drops count 2, survivor renormalizes to 1
        assert h.to_dict() == {0: 1.0}

    def test_all_pruned_keeps_top_node(self):
        # deterministic chain: every node visited once, frequencies 1/5 < eps
        g = from_arcs(5, [0, 1, 2, 3], [1, 2, 3, 4], directed=True)
        cfg = WalkConfig(length_probs=point_mass(4), num_walks=1, epsilon=0.9, seed=0)
        h = hash_node(g, 0, cfg)
        assert h.to_dict() == {0: 1.0}  # tie broken by lowest node id

    def test_uniform_normalization_on_path(self):
        g = from_arcs(3, [0, 1], [1, 2], directed=True)
        cfg = WalkConfig(length_probs=point_mass(2), num_walks=8, epsilon=0.005, seed=3)
        h = hash_node(g, 0, cfg)
        assert h.indices.tolist() == [0, 1, 2]
        np.testing.assert_allclose(h.values, 1 / 3)

    def test_epsilon_zero_keeps_every_visited_node(self):
        g = random_graph(30, 5, seed=2)
        cfg = WalkConfig(num_walks=32, epsilon=0.0, seed=2)
        h = hash_node(g, 0, cfg)
        cfg_tiny = WalkConfig(num_walks=32, epsilon=1e-9, seed=2)
        h2 = hash_node(g, 0, cfg_tiny)
        assert np.array_equal(h.indices, h2.indices)

    def test_isolated_node_hashes_to_itself(self):
        g = from_arcs(4, [0], [1], directed=True)
        h = hash_node(g, 3, WalkConfig(num_walks=16, seed=0))
        assert h.to_dict() == {3: 1.0}


class TestHashAll:
    @pytest.mark.parametrize("weighted", [False, True])
    def test_matches_per_node_hashing(self, weighted):
        rng = np.random.default_rng(17)
        n = 50
        src = rng.integers(0, n, 300)
        dst = rng.integers(0, n, 300)
        w = rng.random(300) + 0.01 if weighted else None
        g = from_arcs(n, src, dst, w, directed=True)
        cfg = WalkConfig(num_walks=24, epsilon=0.01, seed=99, weighted=weighted)
        H = hash_all(g, cfg)
        for i in range(n):
            ref = hash_node(g, i, cfg)
            got = hash_row(H, i)
            assert np.array_equal(ref.indices, got.indices), f"node {i}"
            assert np.array_equal(ref.values, got.values), f"node {i}"

    def test_two_cycle_support(self, two_cycle):
        H = hash_all(two_cycle, WalkConfig(num_walks=16, seed=1))
        assert H.shape == (2, 2)
        for i in range(2):
            h = hash_row(H, i)
            assert set(h.indices.tolist()) <= {0, 1}
            assert h.values.sum() == pytest.approx(1.0, abs=1e-6)

    def test_same_seed_bitwise_identical(self):
        g = random_graph(60, 4, seed=0)
        cfg = WalkConfig(num_walks=32, seed=7)
        a, b = hash_all(g, cfg), hash_all(g, cfg)
        assert np.array_equal(a.indices, b.indices)
        assert np.array_equal(a.data, b.data)

    def test_worker_count_invariant(self):
        g = random_graph(80, 4, seed=3)
        cfg = WalkConfig(num_walks=16, seed=5)
        base = hash_all(g, cfg, workers=1)
        for workers in (2, 5):
            other = hash_all(g, cfg, workers=workers)
            assert np.array_equal(base.indptr, other.indptr)
            assert np.array_equal(base.indices, other.indices)
            assert np.array_equal(base.data, other.data)

    def test_support_bound_and_normalization(self):
        g = random_graph(120, 8, seed=4)
        eps = 0.02
        H = hash_all(g, WalkConfig(num_walks=64, epsilon=eps, seed=11))
        nnz_per_row = np.diff(H.indptr)
        assert nnz_per_row.max() <= int(1 / eps)
        assert nnz_per_row.min() >= 1
        sums = np.asarray(H.sum(axis=1)).ravel()
        np.testing.assert_allclose(sums, 1.0, atol=1e-6)
        assert H.data.min() > 0.0
        assert H.data.max() <= 1.0

    def test_peak_memory_scales_with_support_not_n_squared(self):
        n, eps, nw = 10_000, 0.01, 96
        g = random_graph(n, 5, seed=6)
        cfg = WalkConfig(num_walks=nw, epsilon=eps, seed=6)
        tracemalloc.start()
        H = hash_all(g, cfg)
        _, peak = tracemalloc.get_traced_memory()
        tracemalloc.stop()
        # retained hashes are O(n / eps) entries; the walk accumulator is a
        # fixed-size per-worker buffer
        accumulator = 32 * 600_000
        budget = 48 * n * int(1 / eps) + 2 * accumulator
        dense = n * n * 8
        assert peak < budget, f"peak {peak} above O(n/eps) budget {budget}"
        assert peak < dense // 10, f"peak {peak} not far below dense {dense}"
        assert H.shape == (n, n)


class TestDump:
    def test_dump_format(self, tmp_path, two_cycle):
        H = hash_all(two_cycle, WalkConfig(num_walks=8, seed=2))
        out = tmp_path / "hashes.tsv"
        dump_hashes(H, out)
        lines = out.read_text().splitlines()
        assert len(lines) == 2
        node, pairs = lines[0].split("\t")
        assert node == "0"
        for pair in pairs.split(","):
            idx, val = pair.split(":")
            int(idx)
            assert len(val.split(".")[1]) == 6

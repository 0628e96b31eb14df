import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cogsimp import ALL_OPS, OperationProfile, OperationSet, OperationToken as Op
from cogsimp.compare import (
    MAX_JSD,
    build_profile,
    cooccurrence_correlation,
    histograms_csv,
    jsd_bernoulli,
    l2_matrix_distance,
    mean_jsd,
    ops_histogram,
    pairwise_distances,
)

unit = st.floats(0, 1, allow_nan=False)


def profile(name, freqs, corr=None):
    corr = np.eye(9) if corr is None else corr
    return OperationProfile(name, 100, dict(zip(ALL_OPS, freqs)), corr, frozenset(), {})


def random_subset(rng, freqs, n=400, name="s"):
    draws = rng.random((n, 9)) < np.asarray(freqs)
    return build_profile([OperationSet(op for op, on in zip(ALL_OPS, row) if on) for row in draws], name)


class TestJsd:
    def test_anchor(self):
        assert jsd_bernoulli(0.557, 0.5) == pytest.approx(0.0403, abs=2e-4)

    def test_matches_scipy(self):
        spatial = pytest.importorskip("scipy.spatial.distance")
        for p, q in [(0.557, 0.5), (0.1, 0.9), (0.0, 0.3), (1.0, 0.0)]:
            ref = spatial.jensenshannon([p, 1 - p], [q, 1 - q])  # natural log by default
            assert jsd_bernoulli(p, q) == pytest.approx(ref, abs=1e-12)

    def test_extremes(self):
        assert jsd_bernoulli(0.3, 0.3) == 0.0
        kl = math.log(1 / 0.5)  # KL of a point mass against the 50/50 mixture
        assert jsd_bernoulli(1.0, 0.0) == pytest.approx(math.sqrt(kl)) == pytest.approx(MAX_JSD)

    @pytest.mark.parametrize("p", [-0.1, 1.2, float("nan")])
    def test_domain(self, p):
        with pytest.raises(ValueError):
            jsd_bernoulli(p, 0.5)

    def test_subnormal_frequencies(self):
        # the midpoint of 5e-324 and 0 underflows to zero
        assert jsd_bernoulli(5e-324, 0.0) == pytest.approx(0.0, abs=1e-150)
        assert jsd_bernoulli(5e-324, 5e-324) == 0.0

    @settings(max_examples=300)
    @given(unit, unit, unit)
    def test_metric_axioms(self, a, b, c):
        assert jsd_bernoulli(a, b) == pytest.approx(jsd_bernoulli(b, a), abs=1e-12)
        assert jsd_bernoulli(a, c) <= jsd_bernoulli(a, b) + jsd_bernoulli(b, c) + 1e-9
        assert 0 <= jsd_bernoulli(a, b) <= MAX_JSD + 1e-12


class TestMeanJsd:
    def test_one_differing_op(self):
        a = profile("a", [0.557] + [0.2] * 8)
        b = profile("b", [0.5] + [0.2] * 8)
        assert mean_jsd(a, b) == pytest.approx(jsd_bernoulli(0.557, 0.5) / 9)
        assert mean_jsd(a, a) == 0.0

    def test_all_ones_vs_all_zeros(self):
        assert mean_jsd(profile("a", [1] * 9), profile("b", [0] * 9)) == pytest.approx(MAX_JSD)


class TestL2:
    def test_symmetric_pair(self):
        a = np.eye(9)
        b = a.copy()
        b[2, 5] = b[5, 2] = 0.4
        assert l2_matrix_distance(profile("a", [0.5] * 9, a), profile("b", [0.5] * 9, b)) == pytest.approx(
            math.sqrt(2) * 0.4)

    def test_identity_vs_ones(self):
        d = l2_matrix_distance(profile("a", [0.5] * 9, np.eye(9)), profile("b", [0.5] * 9, np.ones((9, 9))))
        assert d == pytest.approx(math.sqrt(72))

    def test_self(self):
        p = random_subset(np.random.default_rng(0), [0.5] * 9)
        assert l2_matrix_distance(p, p) == 0.0


class TestProfile:
    def test_all_split(self):
        p = build_profile([OperationSet([Op.SPLIT])] * 4, "s")
        assert p.freqs[Op.SPLIT] == 1.0 and p.freqs[Op.DEL] == 0.0
        assert p.degenerate_ops == frozenset(ALL_OPS)
        assert np.array_equal(p.corr, np.eye(9))

    def test_uncorrelated_pair(self):
        x = np.zeros((4, 9))
        x[:, 0] = [1, 1, 0, 0]
        x[:, 1] = [1, 0, 1, 0]
        corr, degenerate = cooccurrence_correlation(x)
        assert corr[0, 1] == pytest.approx(0.0)
        assert degenerate == frozenset(range(2, 9))

    def test_self_correlation(self):
        x = np.zeros((4, 9))
        x[:, 0] = x[:, 1] = [1, 0, 1, 0]
        corr, _ = cooccurrence_correlation(x)
        assert corr[0, 1] == pytest.approx(1.0)

    def test_empty(self):
        with pytest.raises(ValueError):
            build_profile([], "x")

    @settings(max_examples=40)
    @given(st.lists(st.lists(st.booleans(), min_size=9, max_size=9), min_size=2, max_size=30), st.randoms())
    def test_correlation_contract(self, rows, rnd):
        sets = [OperationSet(op for op, on in zip(ALL_OPS, r) if on) for r in rows]
        p = build_profile(sets, "x")
        assert np.allclose(p.corr, p.corr.T)
        assert np.all(np.abs(p.corr) <= 1.0)
        live = [op.value for op in ALL_OPS if op not in p.degenerate_ops]
        assert np.all(np.diag(p.corr) == 1.0)
        sub = p.corr[np.ix_(live, live)]
        if live:
            assert np.linalg.eigvalsh(sub).min() >= -1e-9
        for op in ALL_OPS:
            assert p.freqs[op] == sum(op in s for s in sets) / len(sets)
        shuffled = sets[:]
        rnd.shuffle(shuffled)
        assert np.allclose(build_profile(shuffled, "y").corr, p.corr)


def test_histogram():
    assert ops_histogram([OperationSet()] * 3) == {0: 3}
    sizes = [OperationSet([Op.DEL]), OperationSet([Op.ADD]), OperationSet([Op.DEL, Op.ADD, Op.SPLIT])]
    assert ops_histogram(sizes) == {1: 2, 3: 1}
    p = build_profile(sizes, "x")
    assert histograms_csv([p]).splitlines()[1] == "x,0,2,0,1,0,0,0,0,0,0"


class TestPairwise:
    def test_same_twice(self):
        p = random_subset(np.random.default_rng(1), [0.3] * 9, name="a")
        q = random_subset(np.random.default_rng(1), [0.3] * 9, name="b")
        for metric in ("mean_jsd", "l2"):
            assert np.array_equal(pairwise_distances([p, q], metric).values, np.zeros((2, 2)))

    def test_contract(self):
        rng = np.random.default_rng(2)
        ps = [random_subset(rng, rng.random(9), name=n) for n in "abc"]
        for metric in ("mean_jsd", "l2"):
            m = pairwise_distances(ps, metric).values
            assert np.allclose(m, m.T) and np.all(np.diag(m) == 0) and np.all(m >= 0)
            if metric == "l2":
                assert m.max() <= 18

    def test_errors(self):
        p = profile("a", [0.1] * 9)
        with pytest.raises(ValueError):
            pairwise_distances([p])
        with pytest.raises(ValueError):
            pairwise_distances([p, p])
        with pytest.raises(ValueError):
            pairwise_distances([p, profile("b", [0.1] * 9)], "cosine")

    def test_clusters_separate(self):
        rng = np.random.default_rng(4)
        base = np.array([0.3, 0.6, 0.4, 0.2, 0.05, 0.1, 0.1, 0.2, 0.3])
        shifted = base.copy()
        shifted[[0, 3, 7]] += 0.15
        same = [random_subset(rng, base, 2000, f"same{i}") for i in range(3)]
        other = [random_subset(rng, shifted, 2000, f"other{i}") for i in range(3)]
        within = max(mean_jsd(a, b) for i, a in enumerate(same) for b in same[i + 1:])
        across = min(mean_jsd(a, b) for a in same for b in other)
        assert within < across

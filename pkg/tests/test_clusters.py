import math
from fractions import Fraction

import numpy as np
import pytest

from elephant_lab import clusters
from elephant_lab.exact import exact_law_1d
from elephant_lab.stats import pooled_chisquare
from elephant_lab.streams import stream
from oracles import mittag_leffler_moment


def _se(x):
    return x.std(ddof=1) / math.sqrt(x.size)


def test_mittag_leffler_moments():
    m = clusters.sample_mittag_leffler(0.75, stream(0, "test.ml"), 10**7)
    assert abs(m.mean() - mittag_leffler_moment(0.75, 1)) < 4 * _se(m)
    assert abs((m**2).mean() - 2 / math.gamma(2.5)) < 4 * _se(m**2)
    m = clusters.sample_mittag_leffler(0.99, stream(1, "test.ml"), 10**6)
    assert abs(m.mean() - 1 / math.gamma(1.99)) < 4 * _se(m)
    assert np.all(m > 0)


def test_mittag_leffler_rejects_bad_a():
    with pytest.raises(ValueError):
        clusters.sample_mittag_leffler(1.0, stream(0, "x"), 3)


def test_series_single_term():
    s = clusters.sample_cluster_series(0.75, 1.0, 1, stream(2, "test.s"), 10**6)
    x = s.partial_sum()
    assert s.marginal_faithful and np.all(s.tau[:, 0] == 1)
    assert abs(x.mean() - 1 / math.gamma(1.75)) < 4 * _se(x)


def test_series_symmetric_for_fair_first_sign():
    x = clusters.sample_cluster_series(0.75, 0.5, 30, stream(3, "test.s"), 2 * 10**5).partial_sum()
    for k in (1, 3):
        assert abs((x**k).mean()) < 4 * _se(x**k)


def test_series_cluster_means_decrease():
    s = clusters.sample_cluster_series(0.75, 1.0, 10, stream(4, "test.s"), 2 * 10**5)
    means = s.C.mean(axis=0)
    assert np.all(np.diff(means) < 0)


def test_series_gap_law():
    a = 0.75
    s = clusters.sample_cluster_series(a, 1.0, 6, stream(5, "test.s"), 2 * 10**5)
    for j in (2, 4, 6):
        t = s.tau[:, j - 1] - 1.0
        assert abs(t.mean() - clusters.expected_tau_minus_one(a, j)) < 4 * _se(t)
        # tau_j - j counts the failures before j - 1 successes
        assert abs((t - (j - 1)).mean() - (j - 1) * a / (1 - a)) < 4 * _se(t)


def test_percolation_extremes():
    t = clusters.simulate_rrt_percolation(50, 1.0, seed=1)
    assert list(t.cluster_sizes()) == [50]
    t = clusters.simulate_rrt_percolation(50, 0.0, seed=1)
    assert np.all(t.cluster_sizes() == 1) and len(t.cluster_sizes()) == 50


def test_tree_invariants():
    t = clusters.simulate_rrt_percolation(2000, 0.6, seed=2)
    i = np.arange(1, t.n)
    assert np.all(t.parent[1:] < i)
    assert np.all(t.root <= np.arange(t.n))
    assert np.all(t.root[1:][t.kept[1:]] == t.root[t.parent[1:][t.kept[1:]]])
    assert np.all(t.root[1:][~t.kept[1:]] == i[~t.kept[1:]])
    assert t.cluster_sizes().sum() == t.n


def test_reconstruction_single_cluster():
    t = clusters.simulate_rrt_percolation(30, 1.0, seed=3)
    vals = [clusters.reconstruct_walk_from_clusters(t, 0.7, seed=3, replica=r) for r in range(2000)]
    assert set(vals) == {30, -30}
    share = np.mean(np.array(vals) > 0)
    assert abs(share - 0.7) < 4 * math.sqrt(0.21 / 2000)


@pytest.mark.parametrize("a,q", [(Fraction(0), Fraction(3, 10)), (Fraction(37, 50), Fraction(9, 10))])
def test_ensemble_matches_exact_law(a, q):
    n = 15
    w, _ = clusters.rrt_walk_ensemble(n, float(a), float(q), 10**6, seed=4)
    res = pooled_chisquare(w, exact_law_1d(n, (1 + a) / 2, q).pmf)
    assert res.outside_support == 0 and res.pvalue > 0.001


def test_root_cluster_scaling():
    n, a = 10**4, 0.75
    _, root = clusters.rrt_walk_ensemble(n, a, 1.0, 10**5, seed=5)
    x = root / n**a
    assert abs(x.mean() - 1 / math.gamma(1.75)) < 4 * _se(x)


def test_tree_csv(tmp_path):
    t = clusters.simulate_rrt_percolation(5, 0.5, seed=0)
    assert t.to_csv(tmp_path / "t.csv").read_text().splitlines()[0] == "node,parent,kept,root"

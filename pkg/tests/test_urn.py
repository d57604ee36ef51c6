from fractions import Fraction

import numpy as np
import pytest
from scipy import stats as sps

from elephant_lab import urn, walk
from elephant_lab.exact import exact_law_1d
from elephant_lab.stats import pooled_chisquare
from elephant_lab.urn import UrnConfig


def test_identity_replacement_only_adds_initial_colour():
    path = urn.simulate_urn(UrnConfig(2, 1, (1, 0), 50, seed=2))
    assert tuple(path.compositions[-1]) == (51, 0)


def test_zero_memory_first_ball_is_other_colour():
    for r in range(30):
        path = urn.simulate_urn(UrnConfig(2, 0, (1, 0), 1, seed=3), replica=r)
        assert tuple(path.compositions[1]) == (1, 1)


def test_path_bookkeeping():
    path = urn.simulate_urn(UrnConfig(6, 0.7, (1, 0, 0, 0, 0, 0), 200, seed=4))
    assert np.array_equal(path.totals(), np.arange(1, 202))
    added = np.argmax(np.diff(path.compositions, axis=0), axis=1)
    assert np.array_equal(added, (path.drawn + path.shifts) % 6)
    assert set(np.unique(path.shifts)) <= set(range(6))


@pytest.mark.parametrize("bad", [dict(colors=3), dict(p=1.2), dict(initial=(0, 0)), dict(initial=(1,)),
                                 dict(initial=(-1, 2))])
def test_config_rejects_invalid(bad):
    kw = dict(colors=2, p=0.5, initial=(1, 0), n=5)
    kw.update(bad)
    with pytest.raises(ValueError):
        UrnConfig(**kw)


def test_urn_to_walk_position():
    assert tuple(urn.urn_to_walk_position((5, 3, 2, 2))) == (2, 0)
    assert tuple(urn.urn_to_walk_position((1, 0))) == (1,)
    with pytest.raises(ValueError):
        urn.urn_to_walk_position((1, 2, 3))


def test_two_colour_urn_matches_exact_walk_law():
    # n draws give n + 1 balls, the urn counterpart of S_{n+1}
    comps = urn.urn_ensemble(1, Fraction(87, 100), 19, 10**5, seed=5, initial_color=0)
    diff = urn.urn_to_walk_position(comps)[:, 0]
    res = pooled_chisquare(diff, exact_law_1d(20, Fraction(87, 100), 1).pmf)
    assert res.outside_support == 0 and res.pvalue > 0.001


def test_urn_positions_match_walk_moments_d2():
    n, p, q = 15, 0.8, (0.25,) * 4
    comps = urn.urn_ensemble(2, p, n - 1, 10**5, seed=6, q=q)
    u = urn.urn_to_walk_position(comps).astype(float)
    s = walk.walk_endpoints(walk.WalkConfig(2, p, q, n, seed=6), 10**5).astype(float)
    for k in range(1, 5):
        a, b = u**k, s**k
        se = np.sqrt(a.var(axis=0, ddof=1) / len(a) + b.var(axis=0, ddof=1) / len(b))
        assert np.all(np.abs(a.mean(axis=0) - b.mean(axis=0)) <= 4 * se + 1e-12)


def test_ensemble_thread_independent():
    a = urn.urn_ensemble(2, 0.8, 100, 3000, seed=1, initial_color=0, threads=1)
    b = urn.urn_ensemble(2, 0.8, 100, 3000, seed=1, initial_color=0, threads=3)
    assert np.array_equal(a, b)


def test_limit_coordinates():
    comps = np.array([[3, 1, 1, 0]])  # n = 4 draws
    Y = urn.centred_urn(comps, 1)
    assert np.allclose(Y, [[0.5, 0, 0, -0.25]])
    assert np.allclose(urn.urn_limit_W(comps, 1), [[0, 0, 0.5]])


def test_subtree_split_small_cases():
    s = urn.simulate_subtree_split(1, seed=0)
    assert (s.D1[0], s.D2[0]) == (1, 1)
    assert np.array_equal(s.D1 + s.D2, s.times + 1)
    firsts = [urn.simulate_subtree_split(1, seed=0, replica=r).D1[1] for r in range(2000)]
    assert set(firsts) == {1, 2}
    assert abs(np.mean(firsts) - 1.5) < 4 * 0.5 / np.sqrt(2000)


def test_subtree_split_is_uniform():
    frac = urn.subtree_split_fractions(10**4, 10**5, seed=8)
    assert sps.kstest(frac, "uniform").pvalue > 0.001

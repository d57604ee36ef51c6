import math
import warnings
from fractions import Fraction

import numpy as np
import pytest

from elephant_lab import walk
from elephant_lab.exact import law_1d_float
from elephant_lab.stats import pooled_chisquare
from elephant_lab.walk import WalkConfig


def test_exponent_exact_and_inverse():
    assert walk.exponent(1, Fraction(7, 8)) == Fraction(3, 4)
    assert walk.exponent(3, Fraction(4, 5)) == Fraction(19, 25)
    for d in (1, 2, 5):
        assert walk.memory_for_exponent(d, walk.exponent(d, Fraction(9, 10))) == Fraction(9, 10)


@pytest.mark.parametrize("bad", [
    dict(d=0, p=0.5, q=(1, 0), n=5),
    dict(d=1, p=1.5, q=(1, 0), n=5),
    dict(d=1, p=0.5, q=(0.5, 0.6), n=5),
    dict(d=2, p=0.5, q=(1, 0), n=5),
    dict(d=1, p=0.5, q=(1, 0), n=0),
])
def test_config_rejects_invalid(bad):
    with pytest.raises(ValueError):
        WalkConfig(**bad)


def test_boundary_memory_allowed_and_flagged():
    assert not WalkConfig(1, 0, (1, 0), 3).superdiffusive
    assert WalkConfig(1, 1, (1, 0), 3).superdiffusive


def test_full_memory_freezes_direction():
    traj = walk.simulate_walk(WalkConfig(1, 1, (1, 0), 100, seed=3))
    assert traj.endpoint()[0] == 100


def test_zero_memory_flips_second_step():
    for r in range(50):
        traj = walk.simulate_walk(WalkConfig(1, 0, (1, 0), 2, seed=1), replica=r)
        assert traj.endpoint()[0] == 0


def test_materialized_path_is_consistent():
    traj = walk.simulate_walk(WalkConfig(3, 0.7, (1 / 6,) * 6, 500, seed=5), materialize=True)
    pos = traj.positions
    assert pos.shape == (501, 3)
    assert np.all(np.abs(np.diff(pos, axis=0)).sum(axis=1) == 1)
    assert np.array_equal(pos[-1], traj.endpoint())


def test_reproducible_and_thread_independent():
    cfg = WalkConfig(2, 0.8, (0.25,) * 4, 300, seed=9)
    a = walk.walk_endpoints(cfg, 5000, threads=1)
    b = walk.walk_endpoints(cfg, 5000, threads=4)
    assert np.array_equal(a, b)
    assert np.array_equal(walk.simulate_walk(cfg, 3).steps, walk.simulate_walk(cfg, 3).steps)
    assert not np.array_equal(walk.walk_endpoints(WalkConfig(2, 0.8, (0.25,) * 4, 300, seed=10), 5000), a)


def test_normalized_endpoint_trivial_cases():
    traj = walk.simulate_walk(WalkConfig(2, 1, (1, 0, 0, 0), 64, seed=0))
    assert np.allclose(walk.normalized_endpoint(traj, 0.5), [64**0.5, 0])
    traj = walk.simulate_walk(WalkConfig(1, 1, (1, 0), 10**4, seed=0))
    assert walk.normalized_endpoint(traj, 1)[0] == 1.0
    with pytest.raises(ValueError):
        walk.normalized_endpoint(traj, 1.5)


def test_endpoint_law_matches_dp_at_n1000():
    n = 1000
    cfg = WalkConfig(1, 0.87, (0.9, 0.1), n, seed=21)
    ends = walk.walk_endpoints(cfg, 200_000)[:, 0]
    res = pooled_chisquare(ends, law_1d_float(n, 0.87, 0.9))
    assert res.outside_support == 0
    assert res.pvalue > 0.01


def test_ensemble_mean_limit():
    cfg = WalkConfig(1, Fraction(7, 8), (1, 0), 10**4, seed=4)
    ens = walk.walk_ensemble(cfg, 10**4)
    est = walk.estimate_limit_moments(ens)
    assert abs(est.mean[0] - 1 / math.gamma(1.75)) < 3 * est.mean_se[0]


def test_ensemble_second_moment_d1(walk_d1_limit):
    x = walk_d1_limit
    target = 1 / (0.5 * math.gamma(1.5))
    se = (x**2).std(ddof=1) / math.sqrt(x.size)
    assert abs((x**2).mean() - target) < 3 * se


def test_second_moment_matrix_d2_uniform(walk_d2_uniform_limit):
    x = walk_d2_uniform_limit
    est = walk.estimate_limit_moments(walk.LimitEnsemble(x, 0.75, 2 * 10**4))
    a, d = 0.75, 2
    diag = 1 / (d * (2 * a - 1) * math.gamma(2 * a))
    target = walk.limit_second_moment(2, a, (0.25,) * 4)
    assert np.allclose(target, diag * np.eye(2))
    assert np.all(np.abs(est.mean) < 3 * est.mean_se)
    assert abs(est.second[0, 1]) < 3 * est.second_se[0, 1]
    for i in range(2):
        assert abs(est.second[i, i] - diag) < 3 * est.second_se[i, i]


def test_limit_moment_formulas_reduce_correctly():
    a = 0.8
    assert np.isclose(walk.limit_second_moment(1, a, (1, 0))[0, 0], 1 / ((2 * a - 1) * math.gamma(2 * a)))
    assert np.isclose(walk.limit_mean(1, a, (0.9, 0.1))[0], 0.8 / math.gamma(1.8))
    # mixture over first steps: E[L L^T] is linear in q
    q1, q2 = np.array([1, 0, 0, 0, 0, 0.0]), np.array([0, 0, 0, 0, 0.5, 0.5])
    mix = walk.limit_second_moment(3, a, 0.3 * q1 + 0.7 * q2)
    assert np.allclose(mix, 0.3 * walk.limit_second_moment(3, a, q1) + 0.7 * walk.limit_second_moment(3, a, q2))


def test_moment_estimate_of_constant_ensemble():
    v = np.array([0.3, -1.2])
    est = walk.estimate_limit_moments(walk.LimitEnsemble(np.tile(v, (10, 1)), 0.75, 10))
    assert np.allclose(est.mean, v) and np.allclose(est.second, np.outer(v, v))
    assert np.allclose(est.mean_se, 0)


def test_subcritical_ensemble_warns():
    with pytest.warns(UserWarning):
        walk.walk_ensemble(WalkConfig(1, 0.6, (1, 0), 50), 10)


def test_ensemble_exponent_consistency_check():
    with pytest.raises(ValueError):
        walk.walk_ensemble(WalkConfig(1, 0.875, (1, 0), 50), 10, a=0.7)


def test_fluctuation_degenerate_and_deterministic():
    s = walk.fluctuation_sample(WalkConfig(1, 1, (1, 0), 10), 10, 11, 50)
    assert np.allclose(s.values, s.values[0]) and s.values.std() == 0
    s = walk.fluctuation_sample(WalkConfig(1, 0.875, (1, 0), 10), 999, 1000, 200)
    assert np.abs(s.values).max() < 0.2
    with pytest.raises(ValueError):
        walk.fluctuation_sample(WalkConfig(1, 0.875, (1, 0), 10), 100, 100, 5)


def test_trajectory_csv(tmp_path):
    traj = walk.simulate_walk(WalkConfig(2, 0.8, (0.25,) * 4, 20, seed=1))
    path = traj.to_csv(tmp_path / "t.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "t,step,x1,x2" and len(lines) == 22

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from discreg.metrics import kendall_tau_b, l2_value_loss, mean_ci, ranking_loss, tv_distance

from oracles import kendall_tau_b_bruteforce, random_rank_pair


def test_l2_loss_cases():
    assert l2_value_loss([1, 2, 3], [1, 2, 3]) == 0.0
    assert l2_value_loss([1, 2], [1, 0]) == 2.0
    a, b = np.array([1.0, -2.0, 0.5]), np.array([0.0, 1.0, 2.0])
    assert l2_value_loss(3 * a, 3 * b) == pytest.approx(3 * l2_value_loss(a, b))


def test_ranking_extremes():
    assert ranking_loss([1, 2, 3, 4], [10, 20, 30, 40]) == -1.0
    assert ranking_loss([4, 3, 2, 1], [1, 2, 3, 4]) == 1.0


def test_ranking_constant_is_nan():
    assert math.isnan(ranking_loss([1, 1, 1], [1, 2, 3]))


@pytest.mark.parametrize("seed", range(20))
def test_tau_matches_bruteforce_length8(seed):
    rng = np.random.default_rng(seed)
    x, y = random_rank_pair(rng, 8, ties=seed % 2 == 0)
    got, ref = kendall_tau_b(x, y), kendall_tau_b_bruteforce(x, y)
    assert got == ref or (math.isnan(got) and math.isnan(ref))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=2, max_size=16))
def test_tau_matches_scipy(pairs):
    x, y = map(np.array, zip(*pairs))
    ref = stats.kendalltau(x, y).statistic
    got = kendall_tau_b(x, y)
    if math.isnan(ref):
        assert math.isnan(got)
    else:
        assert got == pytest.approx(ref, abs=1e-12)


def test_tv_cases():
    p = np.array([0.2, 0.3, 0.5])
    assert tv_distance(p, p) == 0.0
    point = np.eye(16)[0]
    assert tv_distance(point, np.full(16, 1 / 16)) == pytest.approx(0.9375)
    q = np.array([0.6, 0.1, 0.3])
    assert tv_distance(p, q) == tv_distance(q, p)


def test_ci_cases():
    assert mean_ci([3.0, 3.0, 3.0]) == (3.0, 3.0, 3.0)
    mean, lo, hi = mean_ci([0.0, 2.0])
    assert mean == 1.0
    assert hi - mean == pytest.approx(12.706, abs=1e-3)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=30))
def test_ci_contains_mean(xs):
    mean, lo, hi = mean_ci(xs)
    assert lo <= mean <= hi


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-100, 100), min_size=2, max_size=12, unique=True))
def test_ranking_invariant_to_monotone_transform(xs):
    x = np.array(xs, dtype=float)
    y = np.random.default_rng(len(xs)).normal(size=len(xs))
    assert ranking_loss(np.exp(x / 50), y) == ranking_loss(x, y)
    assert ranking_loss(x, y ** 3 + 2 * y) == ranking_loss(x, y)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_tv_triangle_inequality(seed):
    p, q, r = np.random.default_rng(seed).dirichlet(np.ones(6), size=3)
    assert tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r) + 1e-15


def test_ci_width_shrinks_like_inverse_sqrt():
    rng = np.random.default_rng(0)
    widths = {}
    for n in (100, 400, 1600):
        _, lo, hi = mean_ci(rng.normal(size=n))
        widths[n] = hi - lo
    assert widths[100] / widths[400] == pytest.approx(2.0, rel=0.2)
    assert widths[400] / widths[1600] == pytest.approx(2.0, rel=0.2)

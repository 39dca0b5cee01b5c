import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from discreg.envs import (
    LEFT,
    STAY,
    UP,
    GridSpec,
    MixingRejected,
    augment_mixing_time,
    gridworld,
    mixing_time,
    sample_distribution_with_tv,
    spectral_gap,
    tv_from_uniform,
)
from discreg.mdp import induced_chain, uniform_policy


def test_gridworld_shape(rng):
    mdp = gridworld(GridSpec(), rng)
    assert mdp.transition.shape == (16, 5, 16)
    np.testing.assert_allclose(mdp.transition.sum(axis=2), 1.0)


def test_gridworld_stay_and_walls(rng):
    mdp = gridworld(GridSpec(), rng)
    for s in range(16):
        assert mdp.transition[s, STAY, s] == 1.0
    # top-left corner cannot move left or up
    assert mdp.transition[0, LEFT, 0] == 1.0
    assert mdp.transition[0, UP, 0] == 1.0


def test_gridworld_rewards(rng):
    mdp = gridworld(GridSpec(), rng)
    assert np.sum(mdp.reward_mean[:, 0] == 1.0) == 1
    assert np.all(np.abs(mdp.reward_mean[mdp.reward_mean[:, 0] != 1.0]) <= 0.5)


def test_gridworld_seeded():
    a = gridworld(GridSpec(), np.random.default_rng(7))
    b = gridworld(GridSpec(), np.random.default_rng(7))
    np.testing.assert_array_equal(a.transition, b.transition)


def test_gap_rank_one():
    P = np.full((4, 4), 0.25)
    assert spectral_gap(P) == pytest.approx(1.0)
    assert mixing_time(P) == pytest.approx(1.0)


def test_gap_identity():
    assert spectral_gap(np.eye(3)) == 0.0
    assert math.isinf(mixing_time(np.eye(3)))


def test_gap_two_state():
    p = 0.25
    P = np.array([[1 - p, p], [p, 1 - p]])
    assert spectral_gap(P) == pytest.approx(0.5)


def test_augment_to_one_gives_stationary_rows():
    P = np.array([[0.9, 0.1, 0.0], [0.2, 0.5, 0.3], [0.1, 0.1, 0.8]])
    out = augment_mixing_time(P, 1.0)
    w, v = np.linalg.eig(P.T)
    pi = np.real(v[:, np.argmin(np.abs(w - 1))])
    pi /= pi.sum()
    np.testing.assert_allclose(out, np.tile(pi, (3, 1)), atol=1e-10)


def test_augment_noop_when_at_target():
    P = np.array([[0.75, 0.25], [0.25, 0.75]])
    out = augment_mixing_time(P, 2.0)
    assert spectral_gap(out) == pytest.approx(0.5, rel=0.05)


def test_augment_two_state_to_ten():
    P = np.array([[0.75, 0.25], [0.25, 0.75]])
    gap = spectral_gap(augment_mixing_time(P, 10.0))
    assert 0.095 <= gap <= 0.105


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), tau=st.sampled_from([2.0, 5.0, 10.0, 20.0]))
def test_augment_output_stochastic_or_rejected(seed, tau):
    mdp = gridworld(GridSpec(), np.random.default_rng(seed))
    chain = induced_chain(mdp, uniform_policy(16, 5))
    try:
        out = augment_mixing_time(chain, tau)
    except MixingRejected as exc:
        assert abs(exc.achieved - tau) > 0.05 * tau
        return
    except ValueError:
        return  # defective chain
    assert np.all(out >= 0)
    np.testing.assert_allclose(out.sum(axis=1), 1.0)
    assert abs(mixing_time(out) - tau) <= 0.05 * tau


def test_tv_fast_paths(rng):
    d = sample_distribution_with_tv(16, 0.0, 1e-9, rng)
    np.testing.assert_allclose(d.probs, 1 / 16)
    d = sample_distribution_with_tv(16, 15 / 16, 1e-6, rng)
    assert d.tv_from_uniform == pytest.approx(15 / 16)


@pytest.mark.parametrize("target", [0.05, 0.3, 0.6, 0.8])
def test_tv_targeted(rng, target):
    d = sample_distribution_with_tv(16, target, 0.01, rng)
    assert abs(tv_from_uniform(d.probs) - target) <= 0.01
    assert d.probs.sum() == pytest.approx(1.0)


def test_tv_domain(rng):
    with pytest.raises(ValueError):
        sample_distribution_with_tv(16, 0.99, 0.001, rng)


def test_gridworld_always_valid_over_many_seeds():
    for seed in range(1000):
        mdp = gridworld(GridSpec(), np.random.default_rng(seed))
        assert np.all(mdp.transition >= 0)


def test_single_cell_grid():
    mdp = gridworld(GridSpec(1, 1), np.random.default_rng(0))
    assert mdp.n_states == 1
    assert mdp.reward_mean[0, 0] == 1.0


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), target=st.floats(0.02, 0.9))
def test_tv_window_always_respected(seed, target):
    d = sample_distribution_with_tv(16, target, 0.01, np.random.default_rng(seed))
    assert abs(tv_from_uniform(d.probs) - target) <= 0.01 + 1e-12 or d.tv_from_uniform in (0.0, 15 / 16)

import numpy as np
import pytest

from discreg.mdp import TabularMdp, uniform_policy
from discreg.metrics import tv_distance
from discreg.sampling import (
    NO_ACTION,
    Transition,
    TransitionDataset,
    collect_trajectories,
    iid_dataset,
    m_step_segments,
    rollout,
)

from conftest import random_mdp


def test_length_one(cycle, rng):
    d = rollout(cycle, np.ones((2, 1)), 1, rng)
    assert len(d) == 1


def test_deterministic_trajectory(cycle, rng):
    d = rollout(cycle, np.ones((2, 1)), 6, rng)
    np.testing.assert_array_equal(d.s, [0, 1, 0, 1, 0, 1])
    np.testing.assert_array_equal(d.s_next, [1, 0, 1, 0, 1, 0])
    np.testing.assert_array_equal(d.r, [0, 1, 0, 1, 0, 1])


def test_trajectory_is_connected(rng):
    mdp = random_mdp(rng, 5, 3, std=1.0)
    d = rollout(mdp, uniform_policy(5, 3), 200, rng)
    np.testing.assert_array_equal(d.s[1:], d.s_next[:-1])
    np.testing.assert_array_equal(d.a[1:], d.a_next[:-1])


def test_visit_frequencies_match_stationary(rng):
    p, q = 0.3, 0.1
    chain = np.array([[1 - p, p], [q, 1 - q]])
    mdp = TabularMdp(chain[:, None, :], np.zeros((2, 1)), np.zeros((2, 1)), np.array([0.5, 0.5]))
    d = rollout(mdp, np.ones((2, 1)), 100_000, rng)
    w, v = np.linalg.eig(chain.T)
    pi = np.real(v[:, np.argmin(np.abs(w - 1))])
    pi /= pi.sum()
    freq = np.bincount(d.s, minlength=2) / len(d)
    assert tv_distance(freq, pi) < 0.01


def test_collect_shapes(rng):
    mdp = random_mdp(rng)
    pi = uniform_policy(4, 3)
    assert len(collect_trajectories(mdp, pi, 4, 50, rng)) == 200
    assert len(collect_trajectories(mdp, pi, 2, 50, rng)) == 100
    with pytest.raises(ValueError, match="empty"):
        collect_trajectories(mdp, pi, 0, 50, rng)


def test_iid_shapes_and_point_mass(rng):
    mdp = random_mdp(rng)
    pi = uniform_policy(4, 3)
    dist = np.full(12, 1 / 12)
    assert len(iid_dataset(mdp, pi, dist, 400, rng)) == 400
    point = np.zeros(12)
    point[7] = 1.0
    d = iid_dataset(mdp, pi, point, 50, rng)
    assert set(zip(d.s, d.a)) == {(2, 1)}


def test_iid_frequencies(rng):
    mdp = random_mdp(rng)
    dist = rng.dirichlet(np.ones(12))
    d = iid_dataset(mdp, uniform_policy(4, 3), dist, 100_000, rng)
    freq = np.bincount(d.s * 3 + d.a, minlength=12) / len(d)
    assert tv_distance(freq, dist) < 0.01


def test_m_step_segments_respect_boundaries(rng):
    mdp = random_mdp(rng)
    d = collect_trajectories(mdp, uniform_policy(4, 3), 3, 5, rng)
    seg = m_step_segments(d, 2)
    assert seg.rewards.shape == (12, 2)  # 4 windows per trajectory
    seg1 = m_step_segments(d, 1)
    np.testing.assert_array_equal(seg1.s, d.s)
    np.testing.assert_array_equal(seg1.s_end, d.s_next)


def test_csv_round_trip(tmp_path):
    d = TransitionDataset.from_transitions([Transition(0, 1, 0.5, 2, NO_ACTION), Transition(2, 0, -1.25, 1, 3)])
    d.to_csv(tmp_path / "d.csv")
    back = TransitionDataset.from_csv(tmp_path / "d.csv")
    assert list(back) == list(d)
    assert not back.has_next_actions


def test_seeded_determinism():
    mdp = random_mdp(np.random.default_rng(3), std=1.0)
    a = collect_trajectories(mdp, uniform_policy(4, 3), 3, 20, np.random.default_rng(9))
    b = collect_trajectories(mdp, uniform_policy(4, 3), 3, 20, np.random.default_rng(9))
    assert list(a) == list(b)


def test_transitions_respect_support(rng):
    P = rng.dirichlet(np.ones(5), size=(5, 2)) * (rng.uniform(size=(5, 2, 5)) < 0.5)
    P[..., 0] += 1e-3  # keep every row nonempty
    P /= P.sum(axis=2, keepdims=True)
    mdp = TabularMdp(P, np.zeros((5, 2)), np.zeros((5, 2)), np.full(5, 0.2))
    for d in (rollout(mdp, uniform_policy(5, 2), 2000, rng),
              iid_dataset(mdp, uniform_policy(5, 2), np.full(10, 0.1), 2000, rng)):
        assert np.all(P[d.s, d.a, d.s_next] > 0)

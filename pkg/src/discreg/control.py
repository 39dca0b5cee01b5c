"""Approximate policy iteration with TD-style evaluation."""

import numpy as np

from .features import FeatureMap
from .lstd import lstdq
from .mdp import (
    TabularMdp,
    check_policy,
    epsilon_greedy,
    exact_value,
    greedy_policy,
    optimal_value,
    uniform_policy,
)
from .sampling import collect_trajectories
from .td import RegConfig, expected_sarsa_batch, sarsa_batch

EVALUATORS = ("sarsa", "expected_sarsa", "lstdq")


def optimality_loss(mdp: TabularMdp, policy, gamma_eval: float, v_star=None) -> float:
    """``||V^pi - V^*||_1`` under the true model.

    Pass a precomputed ``v_star`` to skip value iteration.
    """
    if v_star is None:
        v_star, _ = optimal_value(mdp, gamma_eval)
    v_pi = exact_value(mdp, policy, gamma_eval)
    return float(np.sum(np.abs(v_pi - v_star)))


def evaluate_q(dataset, policy, features: FeatureMap, config: RegConfig, evaluator: str, rng) -> np.ndarray:
    """Q estimate of ``policy`` from ``dataset`` as an (S, A) matrix."""
    if evaluator == "sarsa":
        theta = sarsa_batch(dataset, features, config, rng=rng)
    elif evaluator == "expected_sarsa":
        theta = expected_sarsa_batch(dataset, policy, features, config, rng=rng)
    elif evaluator == "lstdq":
        theta = lstdq(dataset, features, policy, config.gamma, config.l2)
    else:
        raise ValueError(f"unknown evaluator {evaluator!r}; expected one of {EVALUATORS}")
    return features.values(theta)


def approx_policy_iteration(
    mdp: TabularMdp,
    episodes: int = 5,
    n_traj: int = 16,
    traj_len: int = 10,
    epsilon: float = 0.1,
    eval_config: RegConfig | None = None,
    evaluator: str = "sarsa",
    rng: np.random.Generator | None = None,
    v_star=None,
    return_history: bool = False,
):
    """Alternate epsilon-greedy data collection, Q evaluation and greedy improvement.

    Starts from the uniform policy.  Each episode gathers fresh data and
    evaluates from a zero initialisation; nothing carries over except the
    policy.

    Returns
    -------
    policy : ndarray, shape (S, A)
    loss : float
        Optimality loss of ``policy`` at ``eval_config.gamma_eval``.
    behaviours : list of ndarray
        Only with ``return_history``: the behaviour policy of each episode.
    """
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    if eval_config is None:
        eval_config = RegConfig(gamma=0.99)
    rng = np.random.default_rng() if rng is None else rng
    features = FeatureMap.tabular_sa(mdp.n_states, mdp.n_actions)
    policy = uniform_policy(mdp.n_states, mdp.n_actions)
    behaviours = []
    for _ in range(episodes):
        behaviour = epsilon_greedy(policy, epsilon)
        behaviours.append(behaviour)
        data = collect_trajectories(mdp, behaviour, n_traj, traj_len, rng)
        q = evaluate_q(data, behaviour, features, eval_config, evaluator, rng)
        policy = greedy_policy(q)
    check_policy(policy, mdp)
    loss = optimality_loss(mdp, policy, eval_config.gamma_eval, v_star)
    if return_history:
        return policy, loss, behaviours
    return policy, loss

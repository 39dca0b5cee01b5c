"""Tabular MDPs, policies, and exact solvers.

Policies are plain ``(n_states, n_actions)`` arrays of action
probabilities; value vectors and Q matrices are plain arrays too.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

_STOCH_TOL = 1e-12


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


def _check_gamma(gamma: float) -> None:
    if not 0.0 <= gamma < 1.0:
        raise DomainError(f"discount must lie in [0, 1), got {gamma}")


def _check_stochastic(arr: np.ndarray, name: str) -> None:
    if np.any(arr < 0):
        raise ValueError(f"{name} has negative entries")
    if not np.allclose(arr.sum(axis=-1), 1.0, rtol=0.0, atol=_STOCH_TOL):
        raise ValueError(f"{name} rows do not sum to 1")


@dataclass(frozen=True, eq=False)
class TabularMdp:
    """Finite MDP with Gaussian rewards.

    Attributes
    ----------
    transition : ndarray, shape (S, A, S)
        ``transition[s, a, s2]`` is the probability of moving to ``s2``.
    reward_mean, reward_std : ndarray, shape (S, A)
    initial_dist : ndarray, shape (S,)
    """

    transition: np.ndarray
    reward_mean: np.ndarray
    reward_std: np.ndarray
    initial_dist: np.ndarray

    def __post_init__(self):
        for name in ("transition", "reward_mean", "reward_std", "initial_dist"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        P = self.transition
        if P.ndim != 3 or P.shape[0] != P.shape[2]:
            raise ValueError(f"transition must have shape (S, A, S), got {P.shape}")
        n_s, n_a = P.shape[:2]
        if n_s < 1 or n_a < 1:
            raise ValueError("need at least one state and one action")
        if self.reward_mean.shape != (n_s, n_a) or self.reward_std.shape != (n_s, n_a):
            raise ValueError("reward arrays must have shape (S, A)")
        if self.initial_dist.shape != (n_s,):
            raise ValueError("initial_dist must have shape (S,)")
        _check_stochastic(P, "transition")
        _check_stochastic(self.initial_dist, "initial_dist")
        if np.any(self.reward_std < 0):
            raise ValueError("reward_std must be nonnegative")
        if not np.all(np.isfinite(self.reward_mean)):
            raise ValueError("reward_mean must be finite")

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    @property
    def n_actions(self) -> int:
        return self.transition.shape[1]

    def to_dict(self) -> dict:
        return {
            "n_states": self.n_states,
            "n_actions": self.n_actions,
            "transition": self.transition.tolist(),
            "reward_mean": self.reward_mean.tolist(),
            "reward_std": self.reward_std.tolist(),
            "initial_dist": self.initial_dist.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TabularMdp":
        mdp = cls(
            transition=data["transition"],
            reward_mean=data["reward_mean"],
            reward_std=data["reward_std"],
            initial_dist=data["initial_dist"],
        )
        if (mdp.n_states, mdp.n_actions) != (data["n_states"], data["n_actions"]):
            raise ValueError("declared sizes disagree with array shapes")
        return mdp

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "TabularMdp":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def markov_reward_process(chain, reward_mean, reward_std, initial_dist=None) -> TabularMdp:
    """Wrap a Markov chain with per-state rewards as a single-action MDP."""
    chain = np.asarray(chain, dtype=np.float64)
    n = chain.shape[0]
    if initial_dist is None:
        initial_dist = np.full(n, 1.0 / n)
    return TabularMdp(
        transition=chain[:, None, :],
        reward_mean=np.asarray(reward_mean, dtype=np.float64).reshape(n, 1),
        reward_std=np.asarray(reward_std, dtype=np.float64).reshape(n, 1),
        initial_dist=initial_dist,
    )


def uniform_policy(n_states: int, n_actions: int) -> np.ndarray:
    return np.full((n_states, n_actions), 1.0 / n_actions)


def check_policy(policy, mdp: TabularMdp | None = None) -> np.ndarray:
    policy = np.asarray(policy, dtype=np.float64)
    if policy.ndim != 2:
        raise ValueError("policy must be a (S, A) matrix")
    if mdp is not None and policy.shape != (mdp.n_states, mdp.n_actions):
        raise ValueError(f"policy shape {policy.shape} does not match the MDP")
    _check_stochastic(policy, "policy")
    return policy


def induced_chain(mdp: TabularMdp, policy) -> np.ndarray:
    """State transition matrix of the Markov chain followed under ``policy``."""
    policy = check_policy(policy, mdp)
    return np.einsum("sa,sat->st", policy, mdp.transition)


def expected_reward(mdp: TabularMdp, policy) -> np.ndarray:
    policy = check_policy(policy, mdp)
    return np.sum(policy * mdp.reward_mean, axis=1)


def exact_value(mdp: TabularMdp, policy, gamma: float) -> np.ndarray:
    """Solve ``(I - gamma P_pi) V = r_pi`` directly."""
    _check_gamma(gamma)
    P = induced_chain(mdp, policy)
    r = expected_reward(mdp, policy)
    M = np.eye(mdp.n_states) - gamma * P
    try:
        V = np.linalg.solve(M, r)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - impossible for gamma < 1
        raise RuntimeError("Bellman system is singular") from exc
    return V


def q_from_value(mdp: TabularMdp, V: np.ndarray, gamma: float) -> np.ndarray:
    return mdp.reward_mean + gamma * mdp.transition @ V


def exact_q(mdp: TabularMdp, policy, gamma: float) -> np.ndarray:
    return q_from_value(mdp, exact_value(mdp, policy, gamma), gamma)


def greedy_policy(q) -> np.ndarray:
    """Deterministic argmax policy; ties go to the lowest action index."""
    q = np.asarray(q, dtype=np.float64)
    policy = np.zeros_like(q)
    policy[np.arange(q.shape[0]), np.argmax(q, axis=1)] = 1.0
    return policy


def epsilon_greedy(base, epsilon: float) -> np.ndarray:
    if not 0.0 <= epsilon <= 1.0:
        raise DomainError(f"epsilon must lie in [0, 1], got {epsilon}")
    base = check_policy(base)
    return (1.0 - epsilon) * base + epsilon / base.shape[1]


def optimal_value(mdp: TabularMdp, gamma: float, tol: float = 1e-10, max_iter: int = 1_000_000):
    """Value iteration until the Bellman optimality residual drops below ``tol``,
    then exact policy-iteration steps from the greedy policy, so ``V`` is the
    exact value of the returned policy.

    Returns
    -------
    V : ndarray, shape (S,)
    policy : ndarray, shape (S, A)
        Greedy (deterministic) policy with respect to ``V``.
    """
    _check_gamma(gamma)
    V = np.zeros(mdp.n_states)
    for _ in range(max_iter):
        V_new = q_from_value(mdp, V, gamma).max(axis=1)
        # residual of V_new bounded by gamma * ||V_new - V||
        if gamma * np.max(np.abs(V_new - V)) < tol:
            V = V_new
            break
        V = V_new
    else:  # pragma: no cover
        raise RuntimeError("value iteration did not converge")
    policy = greedy_policy(q_from_value(mdp, V, gamma))
    for _ in range(100):
        V = exact_value(mdp, policy, gamma)
        q = q_from_value(mdp, V, gamma)
        # only switch where the improvement is beyond round-off
        held = q[np.arange(mdp.n_states), policy.argmax(axis=1)]
        if np.all(q.max(axis=1) <= held + 1e-12 * (1.0 + np.abs(held))):
            break
        policy = greedy_policy(q)
    return V, policy

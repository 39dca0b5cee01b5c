"""Batch semi-gradient TD learners with discount, activation and L2 regularization.

All learners share one update rule (see :mod:`discreg.kernels`): sample a
transition uniformly from the dataset, then

    theta <- theta + a_i (xi r + gamma * next_estimate - estimate) grad
                   - a_i grad(Psi)

with ``Psi = activation * estimate**2 + l2 * ||theta||**2`` evaluated at the
sampled input and the bootstrap estimate held fixed.
"""

import csv
import dataclasses
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .features import FeatureMap
from .mdp import DomainError
from .sampling import Segments, TransitionDataset


def default_lr(i):
    return 500.0 / (1000.0 + i)


@dataclass(frozen=True)
class RegConfig:
    """Knobs of a regularized batch TD run.

    ``gamma`` is the discount the learner uses; ``gamma_eval`` the one that
    defines the target value (defaults to ``gamma``).
    """

    gamma: float
    gamma_eval: float | None = None
    activation: float = 0.0
    l2: float = 0.0
    reward_scale: float = 1.0
    lr_schedule: Callable | None = None
    n_iter: int = 5000

    def __post_init__(self):
        if self.gamma_eval is None:
            object.__setattr__(self, "gamma_eval", self.gamma)
        if not 0.0 <= self.gamma <= self.gamma_eval <= 1.0:
            raise DomainError(f"need 0 <= gamma <= gamma_eval <= 1, got {self.gamma}, {self.gamma_eval}")
        if self.activation < 0 or self.l2 < 0:
            raise DomainError("regularization factors must be nonnegative")
        if self.reward_scale <= 0:
            raise DomainError("reward_scale must be positive")
        if self.n_iter < 0:
            raise ValueError("n_iter must be nonnegative")

    def replace(self, **changes) -> "RegConfig":
        return dataclasses.replace(self, **changes)

    def learning_rates(self, n_iter: int | None = None) -> np.ndarray:
        n = self.n_iter if n_iter is None else n_iter
        sched = self.lr_schedule or default_lr
        steps = np.arange(n)
        try:
            lr = np.broadcast_to(np.asarray(sched(steps), dtype=np.float64), (n,))
        except (TypeError, ValueError):
            lr = np.array([sched(i) for i in range(n)], dtype=np.float64)
        return np.ascontiguousarray(lr)


@dataclass(frozen=True)
class EquivalenceParams:
    lam: float
    xi: float
    lr_scale: float
    m: int = 1


def equivalence_params(gamma_eval: float, gamma: float, m: int = 1) -> EquivalenceParams:
    """Activation factor, reward scale and step-size scale that turn an
    ``m``-step learner with discount ``gamma`` into one with ``gamma_eval``."""
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    if not gamma <= gamma_eval <= 1.0:
        raise DomainError("need gamma <= gamma_eval <= 1")
    if m < 1:
        raise DomainError("m must be >= 1")
    ge, g = gamma_eval**m, gamma**m
    return EquivalenceParams(lam=(ge - g) / (2.0 * g), xi=ge / g, lr_scale=g / ge, m=m)


def equivalent_config(config: RegConfig, m: int = 1) -> RegConfig:
    """Config running at ``gamma_eval`` that reproduces ``config``'s iterates.

    Only defined for unregularized, unscaled configs.
    """
    if config.activation or config.l2 or config.reward_scale != 1.0:
        raise ValueError("equivalence transform applies to plain discounted runs only")
    p = equivalence_params(config.gamma_eval, config.gamma, m)
    base = config.lr_schedule or default_lr
    return config.replace(
        gamma=config.gamma_eval,
        activation=p.lam,
        reward_scale=p.xi,
        lr_schedule=lambda i: p.lr_scale * base(i),
    )


def _indices(n: int, n_iter: int, rng, indices) -> np.ndarray:
    if n == 0:
        raise ValueError("empty dataset")
    if indices is not None:
        idx = np.ascontiguousarray(indices, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise ValueError("sample index out of range")
        return idx
    rng = np.random.default_rng() if rng is None else rng
    return rng.integers(0, n, size=n_iter)


def _theta0(theta0, k: int) -> np.ndarray:
    if theta0 is None:
        return np.zeros(k)
    theta0 = np.array(theta0, dtype=np.float64)
    if theta0.shape != (k,):
        raise ValueError(f"theta0 has shape {theta0.shape}, features have dimension {k}")
    return theta0


def _run(cur, nxt, target, features, config, boot, theta0, rng, indices, return_history):
    idx = _indices(len(target), config.n_iter, rng, indices)
    theta, hist = kernels.semi_gradient_td(
        _theta0(theta0, features.dimension),
        np.ascontiguousarray(cur),
        np.ascontiguousarray(nxt),
        np.ascontiguousarray(target, dtype=np.float64),
        idx,
        config.learning_rates(len(idx)),
        float(config.reward_scale),
        float(boot),
        float(config.activation),
        float(config.l2),
        bool(return_history),
    )
    return (theta, hist) if return_history else theta


def td0_batch(dataset: TransitionDataset, features: FeatureMap, config: RegConfig, theta0=None,
              rng=None, indices=None, return_history=False):
    """Generic regularized batch TD(0) for state values.

    Pass ``indices`` to fix the sample sequence (``n_iter`` is then its
    length).  With ``return_history`` the result is ``(theta, history)``
    where ``history[i]`` is the parameter vector after ``i`` updates.
    """
    if features.state_action:
        raise ValueError("TD(0) needs state features")
    return _run(features.evaluate(dataset.s), features.evaluate(dataset.s_next), dataset.r,
                features, config, config.gamma, theta0, rng, indices, return_history)


def sarsa_batch(dataset: TransitionDataset, features: FeatureMap, config: RegConfig, theta0=None,
                rng=None, indices=None, return_history=False):
    """Batch SARSA(0): bootstrap on the recorded next action."""
    if not features.state_action:
        raise ValueError("SARSA needs state-action features")
    if not dataset.has_next_actions:
        raise ValueError("SARSA needs recorded next actions")
    return _run(features.evaluate(dataset.s, dataset.a), features.evaluate(dataset.s_next, dataset.a_next),
                dataset.r, features, config, config.gamma, theta0, rng, indices, return_history)


def expected_sarsa_batch(dataset: TransitionDataset, policy, features: FeatureMap, config: RegConfig,
                         theta0=None, rng=None, indices=None, return_history=False):
    """Batch Expected SARSA(0): bootstrap on ``sum_a' pi(a'|s') Q(s', a')``."""
    if not features.state_action:
        raise ValueError("Expected SARSA needs state-action features")
    return _run(features.evaluate(dataset.s, dataset.a), features.policy_average(dataset.s_next, policy),
                dataset.r, features, config, config.gamma, theta0, rng, indices, return_history)


def m_step_td_batch(segments: Segments, features: FeatureMap, config: RegConfig, m: int, theta0=None,
                    rng=None, indices=None, return_history=False, reward_discount: float | None = None):
    """Batch m-step TD over precut segments.

    The target is ``xi * sum_t d**t r_t + gamma**m V(s_m)`` where ``d`` is
    ``reward_discount`` (default ``config.gamma``).  Running with
    ``gamma = gamma_eval`` and ``d`` set to the smaller discount gives the
    activation-regularized form.
    """
    rewards = np.asarray(segments.rewards, dtype=np.float64)
    if rewards.ndim != 2 or rewards.shape[1] != m:
        raise ValueError(f"segments must carry exactly m={m} rewards")
    d = config.gamma if reward_discount is None else reward_discount
    returns = rewards @ (d ** np.arange(m))
    return _run(features.evaluate(segments.s), features.evaluate(segments.s_end), returns,
                features, config, config.gamma**m, theta0, rng, indices, return_history)


# ---------------------------------------------------------------------------
# Equivalence checks
# ---------------------------------------------------------------------------


def _pair_configs(gamma_eval, gamma, m, n_iter, lr_schedule, lam_factor):
    base = RegConfig(gamma=gamma, gamma_eval=gamma_eval, n_iter=n_iter, lr_schedule=lr_schedule)
    if gamma == gamma_eval:
        return base, base.replace(gamma=gamma_eval)
    eq = equivalent_config(base, m)
    return base, eq.replace(activation=eq.activation * lam_factor)


def verify_prop1(dataset, features, gamma_eval, gamma, sample_sequence, theta0=None,
                 lr_schedule=None, lam_factor=1.0) -> float:
    """Max over iterations of the inf-norm gap between TD(0) at ``gamma`` and
    activation-regularized TD(0) at ``gamma_eval`` on a shared sample sequence.

    ``lam_factor`` scales the activation factor (1.0 is the exact transform).
    """
    a, b = _pair_configs(gamma_eval, gamma, 1, len(sample_sequence), lr_schedule, lam_factor)
    _, h1 = td0_batch(dataset, features, a, theta0, indices=sample_sequence, return_history=True)
    _, h2 = td0_batch(dataset, features, b, theta0, indices=sample_sequence, return_history=True)
    return float(np.max(np.abs(h1 - h2)))


def verify_prop2(dataset, policy, features, gamma_eval, gamma, sample_sequence, theta0=None,
                 lr_schedule=None, lam_factor=1.0) -> float:
    """As :func:`verify_prop1` for Expected SARSA."""
    a, b = _pair_configs(gamma_eval, gamma, 1, len(sample_sequence), lr_schedule, lam_factor)
    _, h1 = expected_sarsa_batch(dataset, policy, features, a, theta0, indices=sample_sequence,
                                 return_history=True)
    _, h2 = expected_sarsa_batch(dataset, policy, features, b, theta0, indices=sample_sequence,
                                 return_history=True)
    return float(np.max(np.abs(h1 - h2)))


def verify_prop3(segments, features, gamma_eval, gamma, m, sample_sequence, theta0=None,
                 lr_schedule=None, lam_factor=1.0) -> float:
    """As :func:`verify_prop1` for m-step TD."""
    a, b = _pair_configs(gamma_eval, gamma, m, len(sample_sequence), lr_schedule, lam_factor)
    _, h1 = m_step_td_batch(segments, features, a, m, theta0, indices=sample_sequence, return_history=True)
    _, h2 = m_step_td_batch(segments, features, b, m, theta0, indices=sample_sequence, return_history=True,
                            reward_discount=gamma)
    return float(np.max(np.abs(h1 - h2)))


def activation_term(features: FeatureMap, dataset: TransitionDataset, theta, lam: float) -> float:
    """``lam`` times the dataset mean of the squared estimate at each sampled input."""
    rows = features.rows(dataset.s, dataset.a if features.state_action else None)
    est = features.matrix[rows] @ np.asarray(theta, dtype=np.float64)
    return float(lam * np.mean(est**2))


def feature_second_moment(features: FeatureMap, dataset: TransitionDataset) -> np.ndarray:
    """Empirical ``E[phi phi^T]`` over the dataset's sampled inputs."""
    rows = features.rows(dataset.s, dataset.a if features.state_action else None)
    F = features.matrix[rows]
    return F.T @ F / F.shape[0]


def write_iterate_log(history, path) -> None:
    """Dump ``history`` as long-format CSV: iteration, param index, value."""
    history = np.asarray(history)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "param", "value"])
        for i, row in enumerate(history):
            for j, v in enumerate(row):
                w.writerow([i, j, repr(float(v))])

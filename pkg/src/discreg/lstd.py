"""Least-squares TD with ridge and discount regularization."""

from dataclasses import dataclass

import numpy as np

from .features import FeatureMap
from .sampling import TransitionDataset


class LstdSingularError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class LstdSystem:
    A: np.ndarray
    b: np.ndarray
    n: int


def _current_next(dataset: TransitionDataset, features: FeatureMap, policy=None):
    if len(dataset) == 0:
        raise ValueError("empty dataset")
    if features.state_action:
        cur = features.evaluate(dataset.s, dataset.a)
        if policy is None:
            nxt = features.evaluate(dataset.s_next, dataset.a_next)
        else:
            nxt = features.policy_average(dataset.s_next, policy)
    else:
        cur = features.evaluate(dataset.s)
        nxt = features.evaluate(dataset.s_next)
    return cur, nxt


def lstd_system(dataset, features, gamma, lambda_l2=0.0, policy=None) -> LstdSystem:
    """``A = mean phi (phi - gamma phi')^T + lambda I`` and ``b = mean r phi``.

    For state-action features ``phi'`` is the policy average over next
    actions when ``policy`` is given, else the recorded next action.
    """
    cur, nxt = _current_next(dataset, features, policy)
    n = cur.shape[0]
    A = cur.T @ (cur - gamma * nxt) / n + lambda_l2 * np.eye(features.dimension)
    b = cur.T @ dataset.r / n
    return LstdSystem(A, b, n)


def solve_system(system: LstdSystem, lambda_l2: float) -> np.ndarray:
    A, b = system.A, system.b
    if lambda_l2 == 0.0:
        # reject exactly or numerically singular systems instead of pseudo-inverting
        if np.linalg.matrix_rank(A) < A.shape[0] or np.linalg.cond(A) > 1e12:
            raise LstdSingularError(
                "LSTD matrix is singular; use a positive ridge factor or collect more data"
            )
    try:
        theta = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise LstdSingularError(str(exc)) from exc
    return theta


def lstd(dataset: TransitionDataset, features: FeatureMap, gamma: float, lambda_l2: float = 0.0) -> np.ndarray:
    if features.state_action:
        raise ValueError("lstd expects state features; use lstdq for state-action features")
    return solve_system(lstd_system(dataset, features, gamma, lambda_l2), lambda_l2)


def lstdq(dataset: TransitionDataset, sa_features: FeatureMap, policy, gamma: float,
          lambda_l2: float = 0.0) -> np.ndarray:
    """LSTDQ with the next-state features averaged under ``policy``."""
    if not sa_features.state_action:
        raise ValueError("lstdq expects state-action features")
    return solve_system(lstd_system(dataset, sa_features, gamma, lambda_l2, policy), lambda_l2)


def lstd_decompose(dataset, features, gamma, gamma_eval, lambda_l2=0.0, policy=None):
    """Split ``A(gamma)`` into ``A(gamma_eval)`` plus ``(gamma_eval - gamma) C``.

    Returns ``(A_high, C)`` with ``C = mean phi phi'^T``.
    """
    cur, nxt = _current_next(dataset, features, policy)
    n = cur.shape[0]
    A_high = cur.T @ (cur - gamma_eval * nxt) / n + lambda_l2 * np.eye(features.dimension)
    C = cur.T @ nxt / n
    return A_high, C

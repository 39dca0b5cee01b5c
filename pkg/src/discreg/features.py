"""Linear feature maps; the tabular one-hot map is the default special case."""

import numpy as np


class FeatureMap:
    """Feature table indexed by state, or by state-action pair.

    Parameters
    ----------
    matrix : array, shape (n_rows, k)
        Row ``s`` (state features) or row ``s * n_actions + a``
        (state-action features) is the feature vector.
    n_actions : int, optional
        Set for state-action features.
    """

    def __init__(self, matrix, n_actions: int | None = None):
        matrix = np.array(matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValueError("feature matrix must be 2-D")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("features must be finite")
        if n_actions is not None and matrix.shape[0] % n_actions:
            raise ValueError("row count must be a multiple of n_actions")
        matrix.setflags(write=False)
        self.matrix = matrix
        self.n_actions = n_actions

    @classmethod
    def tabular(cls, n_states: int) -> "FeatureMap":
        return cls(np.eye(n_states))

    @classmethod
    def tabular_sa(cls, n_states: int, n_actions: int) -> "FeatureMap":
        return cls(np.eye(n_states * n_actions), n_actions=n_actions)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[1]

    @property
    def state_action(self) -> bool:
        return self.n_actions is not None

    def rows(self, s, a=None):
        s = np.asarray(s, dtype=np.int64)
        if not self.state_action:
            return s
        if a is None:
            raise ValueError("state-action features need an action")
        return s * self.n_actions + np.asarray(a, dtype=np.int64)

    def evaluate(self, s, a=None) -> np.ndarray:
        return self.matrix[self.rows(s, a)]

    def policy_average(self, s, policy) -> np.ndarray:
        """``sum_a pi(a|s) phi(s, a)`` for each state in ``s``."""
        if not self.state_action:
            raise ValueError("policy averaging needs state-action features")
        s = np.asarray(s, dtype=np.int64)
        block = self.matrix.reshape(-1, self.n_actions, self.dimension)
        return np.einsum("na,nak->nk", np.asarray(policy)[s], block[s])

    def values(self, theta) -> np.ndarray:
        """Estimates for every row; reshaped to (S, A) for state-action maps."""
        out = self.matrix @ np.asarray(theta, dtype=np.float64)
        return out.reshape(-1, self.n_actions) if self.state_action else out

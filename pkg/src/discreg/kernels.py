"""Hot inner loops: batch semi-gradient TD sweeps and trajectory rollouts.

Each kernel has a numba version (``*_numba``) and a numpy version
(``*_numpy``) with identical signatures.  The unsuffixed names dispatch
according to :func:`discreg._backend.active_backend`.  All randomness is
drawn by the caller and passed in, so both paths produce the same samples
for the same generator state.
"""

import numpy as np

from ._backend import active_backend, njit


# ---------------------------------------------------------------------------
# Batch semi-gradient TD
# ---------------------------------------------------------------------------
#
# One generic update covers TD(0), SARSA, Expected SARSA and m-step TD:
#
#   v  = cur[j] . theta,  vn = nxt[j] . theta
#   theta <- theta + lr[i] * (xi * target[j] + boot * vn - v) * cur[j]
#                  - lr[i] * (2 * act * v * cur[j] + 2 * l2 * theta)
#
# ``cur[j]`` is the gradient of the estimate at the sampled input, ``nxt[j]``
# the (possibly policy-averaged) feature vector of the bootstrap input, and
# ``target[j]`` the reward (or in-segment discounted return).


@njit(cache=True)
def semi_gradient_td_numba(theta0, cur, nxt, target, idx, lr, xi, boot, act, l2, record):
    k = theta0.shape[0]
    n_iter = idx.shape[0]
    theta = theta0.copy()
    if record:
        hist = np.empty((n_iter + 1, k))
        hist[0] = theta
    else:
        hist = np.empty((0, k))
    for i in range(n_iter):
        j = idx[i]
        v = 0.0
        vn = 0.0
        for c in range(k):
            v += cur[j, c] * theta[c]
            vn += nxt[j, c] * theta[c]
        alpha = lr[i]
        coef = alpha * (xi * target[j] + boot * vn - v - 2.0 * act * v)
        if l2 != 0.0:
            shrink = 1.0 - 2.0 * alpha * l2
            for c in range(k):
                theta[c] = theta[c] * shrink + coef * cur[j, c]
        else:
            for c in range(k):
                theta[c] += coef * cur[j, c]
        if record:
            hist[i + 1] = theta
    return theta, hist


def semi_gradient_td_numpy(theta0, cur, nxt, target, idx, lr, xi, boot, act, l2, record):
    k = theta0.shape[0]
    n_iter = idx.shape[0]
    theta = theta0.copy()
    hist = np.empty((n_iter + 1, k)) if record else np.empty((0, k))
    if record:
        hist[0] = theta
    for i in range(n_iter):
        j = idx[i]
        f = cur[j]
        v = f @ theta
        vn = nxt[j] @ theta
        alpha = lr[i]
        coef = alpha * (xi * target[j] + boot * vn - v - 2.0 * act * v)
        if l2 != 0.0:
            theta *= 1.0 - 2.0 * alpha * l2
        theta += coef * f
        if record:
            hist[i + 1] = theta
    return theta, hist


# ---------------------------------------------------------------------------
# Rollouts by inverse-CDF sampling
# ---------------------------------------------------------------------------


@njit(cache=True)
def _first_above(cdf, u):
    n = cdf.shape[0]
    for i in range(n):
        if u < cdf[i]:
            return i
    return n - 1


@njit(cache=True)
def rollout_numba(p_cdf, pi_cdf, r_mean, r_std, s0, u_act, u_next, z):
    length = u_next.shape[0]
    s = np.empty(length, np.int64)
    a = np.empty(length, np.int64)
    r = np.empty(length)
    s_next = np.empty(length, np.int64)
    a_next = np.empty(length, np.int64)
    state = s0
    action = _first_above(pi_cdf[state], u_act[0])
    for t in range(length):
        s[t] = state
        a[t] = action
        r[t] = r_mean[state, action] + r_std[state, action] * z[t]
        nxt = _first_above(p_cdf[state, action], u_next[t])
        nxt_action = _first_above(pi_cdf[nxt], u_act[t + 1])
        s_next[t] = nxt
        a_next[t] = nxt_action
        state = nxt
        action = nxt_action
    return s, a, r, s_next, a_next


def rollout_numpy(p_cdf, pi_cdf, r_mean, r_std, s0, u_act, u_next, z):
    length = u_next.shape[0]
    s = np.empty(length, np.int64)
    a = np.empty(length, np.int64)
    s_next = np.empty(length, np.int64)
    a_next = np.empty(length, np.int64)
    n_actions = pi_cdf.shape[1]
    n_states = pi_cdf.shape[0]
    state = int(s0)
    action = min(int(np.searchsorted(pi_cdf[state], u_act[0], side="right")), n_actions - 1)
    for t in range(length):
        s[t] = state
        a[t] = action
        nxt = min(int(np.searchsorted(p_cdf[state, action], u_next[t], side="right")), n_states - 1)
        nxt_action = min(int(np.searchsorted(pi_cdf[nxt], u_act[t + 1], side="right")), n_actions - 1)
        s_next[t] = nxt
        a_next[t] = nxt_action
        state, action = nxt, nxt_action
    r = r_mean[s, a] + r_std[s, a] * z
    return s, a, r, s_next, a_next


def semi_gradient_td(*args):
    if active_backend() == "numba":
        return semi_gradient_td_numba(*args)
    return semi_gradient_td_numpy(*args)


def rollout(*args):
    if active_backend() == "numba":
        return rollout_numba(*args)
    return rollout_numpy(*args)


def cdf_rows(probs):
    """Row-wise CDFs whose last entry is exactly 1.0.

    Trailing zero-probability outcomes share the final value with the last
    supported outcome, so inverse-CDF sampling never selects them.
    """
    cdf = np.cumsum(probs, axis=-1)
    return cdf / cdf[..., -1:]

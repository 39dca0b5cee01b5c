"""Random GridWorld MDPs, mixing-time control, and TV-targeted distributions."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .mdp import DomainError, TabularMdp

log = logging.getLogger(__name__)

LEFT, RIGHT, UP, DOWN, STAY = range(5)
_MOVES = {LEFT: (0, -1), RIGHT: (0, 1), UP: (-1, 0), DOWN: (1, 0), STAY: (0, 0)}


@dataclass(frozen=True)
class GridSpec:
    width: int = 4
    height: int = 4
    goal_reward_mean: float = 1.0
    reward_mean_range: tuple = (-0.5, 0.5)
    reward_std: float = 0.1

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("grid needs at least one cell")
        if self.reward_std < 0:
            raise ValueError("reward_std must be nonnegative")
        lo, hi = self.reward_mean_range
        if lo > hi:
            raise ValueError("reward_mean_range must be an ordered interval")

    @property
    def n_states(self) -> int:
        return self.width * self.height


def gridworld(spec: GridSpec, rng: np.random.Generator) -> TabularMdp:
    """Sample a GridWorld instance.

    Cells are numbered row-major.  Each cell draws a move-success
    probability uniformly from [0, 1]; a valid move succeeds with that
    probability and otherwise leaves the agent in place, while off-grid
    moves and ``STAY`` always leave it in place.  One uniformly chosen goal
    cell pays ``goal_reward_mean``; every other cell draws its mean from
    ``reward_mean_range``.  Rewards do not depend on the action.
    """
    n = spec.n_states
    success = rng.uniform(0.0, 1.0, size=n)
    goal = int(rng.integers(n))
    means = rng.uniform(*spec.reward_mean_range, size=n)
    means[goal] = spec.goal_reward_mean

    P = np.zeros((n, 5, n))
    for s in range(n):
        row, col = divmod(s, spec.width)
        for a, (dr, dc) in _MOVES.items():
            r2, c2 = row + dr, col + dc
            if a == STAY or not (0 <= r2 < spec.height and 0 <= c2 < spec.width):
                P[s, a, s] = 1.0
            else:
                P[s, a, r2 * spec.width + c2] = success[s]
                P[s, a, s] = 1.0 - success[s]
    return TabularMdp(
        transition=P,
        reward_mean=np.repeat(means[:, None], 5, axis=1),
        reward_std=np.full((n, 5), spec.reward_std),
        initial_dist=np.full(n, 1.0 / n),
    )


# ---------------------------------------------------------------------------
# Spectral gap and mixing time
# ---------------------------------------------------------------------------

_GAP_FLOOR = 1e-12


def _unit_index(eigvals: np.ndarray) -> int:
    return int(np.argmin(np.abs(eigvals - 1.0)))


def spectral_gap(chain) -> float:
    """``1 - |lambda_2|`` for a row-stochastic matrix (1.0 for a single state)."""
    chain = np.asarray(chain, dtype=np.float64)
    if chain.ndim != 2 or chain.shape[0] != chain.shape[1]:
        raise ValueError("chain must be a square matrix")
    if chain.shape[0] == 1:
        return 1.0
    w = np.linalg.eigvals(chain)
    i1 = _unit_index(w)
    rest = np.delete(np.abs(w), i1)
    return float(max(0.0, 1.0 - rest.max()))


def mixing_time(chain) -> float:
    """Inverse spectral gap; ``math.inf`` when the gap vanishes."""
    gap = spectral_gap(chain)
    return math.inf if gap <= _GAP_FLOOR else 1.0 / gap


class DefectiveChainError(ValueError):
    """The chain cannot be eigendecomposed reliably; resample the MDP."""


class MixingRejected(RuntimeError):
    """Projection back to a stochastic matrix missed the target mixing time."""

    def __init__(self, message, achieved):
        super().__init__(message)
        self.achieved = achieved


def augment_mixing_time(chain, target_mixing_time: float, rel_tol: float = 0.05) -> np.ndarray:
    """Return a stochastic matrix whose mixing time is ``target_mixing_time``.

    The second-largest eigenvalue is moved (phase kept, conjugate partner
    moved with it) to magnitude ``1 - 1/target``; any other non-unit
    eigenvalue left above that magnitude is pulled down to it.  The
    reconstructed matrix is projected onto the stochastic matrices by
    clipping negatives and renormalising rows.

    Raises
    ------
    DefectiveChainError
        Eigenvector matrix is numerically singular, or the unit eigenvalue
        is not simple.
    MixingRejected
        The projected matrix's mixing time is more than ``rel_tol`` (relative)
        away from the target.
    """
    if target_mixing_time < 1.0:
        raise DomainError("target mixing time must be >= 1")
    P = np.asarray(chain, dtype=np.float64)
    n = P.shape[0]
    if n == 1:
        return P.copy()
    w, V = np.linalg.eig(P)
    if np.linalg.cond(V) > 1e10:
        raise DefectiveChainError("transition matrix is (nearly) defective; resample the MDP instance")
    i1 = _unit_index(w)
    others = [i for i in range(n) if i != i1]
    if np.min(np.abs(w[others] - 1.0)) < 1e-9:
        raise DefectiveChainError("unit eigenvalue is not simple (chain is reducible); resample the MDP instance")

    new_mag = 1.0 - 1.0 / target_mixing_time
    i2 = max(others, key=lambda i: abs(w[i]))
    lam2 = w[i2]
    phase = lam2 / abs(lam2) if abs(lam2) > 0 else 1.0
    w_new = w.copy()
    w_new[i1] = 1.0
    w_new[i2] = new_mag * phase
    if abs(lam2.imag) > 1e-12:
        partner = [i for i in others if i != i2 and abs(w[i] - np.conj(lam2)) < 1e-9]
        if partner:
            w_new[partner[0]] = np.conj(w_new[i2])
    for i in others:
        mag = abs(w_new[i])
        if mag > new_mag:
            w_new[i] = w_new[i] / mag * new_mag

    P_new = (V * w_new) @ np.linalg.inv(V)
    P_new = np.clip(P_new.real, 0.0, None)
    P_new /= P_new.sum(axis=1, keepdims=True)

    achieved = mixing_time(P_new)
    if not abs(achieved - target_mixing_time) <= rel_tol * target_mixing_time:
        raise MixingRejected(
            f"projected chain has mixing time {achieved:.4g}, target {target_mixing_time:.4g}", achieved
        )
    return P_new


# ---------------------------------------------------------------------------
# Distributions at a controlled distance from uniform
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SampledDistribution:
    probs: np.ndarray
    tv_from_uniform: float


def tv_from_uniform(p) -> float:
    p = np.asarray(p, dtype=np.float64)
    return 0.5 * float(np.abs(p - 1.0 / p.shape[-1]).sum(axis=-1))


class TvSamplingError(RuntimeError):
    def __init__(self, message, closest):
        super().__init__(message)
        self.closest = closest


def sample_distribution_with_tv(
    n_outcomes: int,
    target_tv: float,
    tol: float = 0.01,
    rng: np.random.Generator | None = None,
    max_attempts: int = 1_000_000,
    widen_after: int = 100_000,
    batch: int = 512,
) -> SampledDistribution:
    """Rejection-sample a distribution whose TV distance from uniform is ``target_tv +- tol``.

    Proposals are symmetric Dirichlet draws whose concentration is itself
    drawn log-uniformly from [1e-3, 1e4], so that every attainable distance
    has non-negligible acceptance probability.  Every ``widen_after``
    rejections the window is doubled (with a warning).
    """
    rng = np.random.default_rng() if rng is None else rng
    n = int(n_outcomes)
    max_tv = 1.0 - 1.0 / n
    if n < 1 or not -1e-12 <= target_tv <= max_tv + 1e-12:
        raise DomainError(f"target_tv must lie in [0, {max_tv}] for {n} outcomes")
    if target_tv - tol <= 0.0:
        probs = np.full(n, 1.0 / n)
        return SampledDistribution(probs, tv_from_uniform(probs))
    if target_tv + tol >= max_tv:
        probs = np.zeros(n)
        probs[rng.integers(n)] = 1.0
        return SampledDistribution(probs, tv_from_uniform(probs))

    attempts = 0
    next_widen = widen_after
    best, best_err = None, math.inf
    while attempts < max_attempts:
        m = min(batch, max_attempts - attempts)
        alpha = 10.0 ** rng.uniform(-3.0, 4.0, size=(m, 1))
        g = rng.gamma(np.broadcast_to(alpha, (m, n)))
        tot = g.sum(axis=1, keepdims=True)
        ok = tot[:, 0] > 0
        props = g[ok] / tot[ok]
        tv = 0.5 * np.abs(props - 1.0 / n).sum(axis=1)
        err = np.abs(tv - target_tv)
        if err.size:
            j = int(np.argmin(err))
            if err[j] < best_err:
                best, best_err = props[j], float(err[j])
            hits = np.flatnonzero(err <= tol)
            if hits.size:
                probs = props[hits[0]]
                return SampledDistribution(probs, tv_from_uniform(probs))
        attempts += m
        if attempts >= next_widen:
            tol *= 2.0
            next_widen += widen_after
            log.warning("TV rejection sampling widened tolerance to %.3g after %d rejections", tol, attempts)
    raise TvSamplingError(
        f"no distribution within tolerance of TV {target_tv} after {attempts} proposals; "
        f"closest distance error {best_err:.3g}",
        best,
    )

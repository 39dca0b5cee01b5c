"""Finite transition datasets: trajectory rollouts and i.i.d. batches."""

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import kernels
from .mdp import TabularMdp, check_policy

NO_ACTION = -1


class Transition(NamedTuple):
    s: int
    a: int
    r: float
    s_next: int
    a_next: int  # NO_ACTION when not recorded


@dataclass(frozen=True, eq=False)
class TransitionDataset:
    """Columnar batch of transitions.

    ``a_next`` holds ``NO_ACTION`` where the next action was not recorded.
    ``provenance`` is free-form metadata, e.g.
    ``{"kind": "trajectories", "n_traj": 4, "traj_len": 50}``.
    """

    s: np.ndarray
    a: np.ndarray
    r: np.ndarray
    s_next: np.ndarray
    a_next: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        ints = ("s", "a", "s_next", "a_next")
        for name in ints:
            object.__setattr__(self, name, np.ascontiguousarray(getattr(self, name), dtype=np.int64))
        object.__setattr__(self, "r", np.ascontiguousarray(self.r, dtype=np.float64))
        n = self.s.shape[0]
        if any(getattr(self, name).shape != (n,) for name in ints + ("r",)):
            raise ValueError("dataset columns must be 1-D and of equal length")

    def __len__(self) -> int:
        return self.s.shape[0]

    def __iter__(self):
        for row in zip(self.s, self.a, self.r, self.s_next, self.a_next):
            yield Transition(int(row[0]), int(row[1]), float(row[2]), int(row[3]), int(row[4]))

    @property
    def has_next_actions(self) -> bool:
        return bool(np.all(self.a_next >= 0))

    @classmethod
    def from_transitions(cls, transitions, provenance=None) -> "TransitionDataset":
        rows = [tuple(t) if len(t) == 5 else (*t, NO_ACTION) for t in transitions]
        if rows:
            s, a, r, s2, a2 = (np.array(c) for c in zip(*rows))
        else:
            s = a = s2 = a2 = np.empty(0, np.int64)
            r = np.empty(0)
        return cls(s, a, r, s2, a2, dict(provenance or {}))

    @classmethod
    def concatenate(cls, parts, provenance=None) -> "TransitionDataset":
        parts = list(parts)
        cols = [np.concatenate([getattr(p, c) for p in parts]) for c in ("s", "a", "r", "s_next", "a_next")]
        return cls(*cols, provenance=dict(provenance or {}))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "a", "r", "s_next", "a_next"])
            for t in self:
                w.writerow([t.s, t.a, repr(t.r), t.s_next, "" if t.a_next < 0 else t.a_next])

    @classmethod
    def from_csv(cls, path) -> "TransitionDataset":
        rows = []
        with open(path, newline="", encoding="utf-8") as fh:
            for rec in csv.DictReader(fh):
                a_next = rec.get("a_next", "")
                rows.append(
                    (int(rec["s"]), int(rec["a"]), float(rec["r"]), int(rec["s_next"]),
                     int(a_next) if a_next not in ("", None) else NO_ACTION)
                )
        return cls.from_transitions(rows, {"kind": "csv", "source": Path(path).name})


def rollout(mdp: TabularMdp, policy, length: int, rng: np.random.Generator) -> TransitionDataset:
    """Simulate one trajectory of ``length`` steps from ``s0 ~ initial_dist``.

    ``a_next`` of each step is the action actually taken at the following
    step; the final ``a_next`` is one extra draw from the policy.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    policy = check_policy(policy, mdp)
    s0 = int(np.searchsorted(kernels.cdf_rows(mdp.initial_dist), rng.uniform(), side="right"))
    u_act = rng.uniform(size=length + 1)
    u_next = rng.uniform(size=length)
    z = rng.standard_normal(size=length)
    cols = kernels.rollout(
        kernels.cdf_rows(mdp.transition),
        kernels.cdf_rows(policy),
        mdp.reward_mean,
        mdp.reward_std,
        min(s0, mdp.n_states - 1),
        u_act,
        u_next,
        z,
    )
    return TransitionDataset(*cols, provenance={"kind": "trajectories", "n_traj": 1, "traj_len": length})


def collect_trajectories(mdp, policy, n_traj: int, traj_len: int, rng) -> TransitionDataset:
    if n_traj < 1:
        raise ValueError("empty dataset: n_traj must be >= 1")
    parts = [rollout(mdp, policy, traj_len, rng) for _ in range(n_traj)]
    return TransitionDataset.concatenate(
        parts, {"kind": "trajectories", "n_traj": n_traj, "traj_len": traj_len}
    )


def iid_dataset(mdp: TabularMdp, policy, sa_dist, n: int, rng) -> TransitionDataset:
    """Draw ``n`` independent transitions with ``(s, a) ~ sa_dist``.

    ``sa_dist`` is a probability vector over the flattened index
    ``s * n_actions + a`` (or anything with a ``probs`` attribute).
    """
    if n < 1:
        raise ValueError("empty dataset: n must be >= 1")
    policy = check_policy(policy, mdp)
    probs = np.asarray(getattr(sa_dist, "probs", sa_dist), dtype=np.float64)
    n_a = mdp.n_actions
    if probs.shape != (mdp.n_states * n_a,):
        raise ValueError("sa_dist must cover every state-action pair")
    flat = np.searchsorted(kernels.cdf_rows(probs), rng.uniform(size=n), side="right")
    s, a = np.divmod(flat, n_a)
    r = mdp.reward_mean[s, a] + mdp.reward_std[s, a] * rng.standard_normal(n)
    p_cdf = kernels.cdf_rows(mdp.transition)[s, a]
    s_next = (rng.uniform(size=(n, 1)) >= p_cdf).sum(axis=1)
    pi_cdf = kernels.cdf_rows(policy)[s_next]
    a_next = (rng.uniform(size=(n, 1)) >= pi_cdf).sum(axis=1)
    return TransitionDataset(s, a, r, s_next, a_next, provenance={"kind": "iid", "n": n})


class Segments(NamedTuple):
    """m-step segments ``(s, r_0..r_{m-1}, s_m)``."""

    s: np.ndarray
    rewards: np.ndarray  # shape (n, m)
    s_end: np.ndarray


def m_step_segments(dataset: TransitionDataset, m: int, traj_len: int | None = None) -> Segments:
    """Cut consecutive trajectories into overlapping stride-1 windows of length ``m``.

    Windows never straddle a trajectory boundary; trajectory tails shorter
    than ``m`` produce no segment.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if traj_len is None:
        traj_len = dataset.provenance.get("traj_len", len(dataset))
    n = len(dataset)
    starts = [i for i in range(n) if i % traj_len + m <= traj_len and i + m <= n]
    starts = np.array(starts, dtype=np.int64)
    offs = starts[:, None] + np.arange(m)
    return Segments(dataset.s[starts], dataset.r[offs], dataset.s_next[starts + m - 1])

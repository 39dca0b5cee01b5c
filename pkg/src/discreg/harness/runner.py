"""Sweep execution: seeded per-instance tasks, a process pool, aggregation."""

import hashlib
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import envs, metrics
from ..control import approx_policy_iteration, optimality_loss
from ..envs import GridSpec
from ..features import FeatureMap
from ..lstd import lstd, lstdq
from ..mdp import exact_value, induced_chain, markov_reward_process, optimal_value, uniform_policy
from ..sampling import collect_trajectories, iid_dataset
from ..td import RegConfig, td0_batch
from .spec import SweepSpec

log = logging.getLogger(__name__)

WORKERS_ENV = "DISCREG_WORKERS"


def stable_seed(*parts) -> int:
    """64-bit seed from a blake2b hash of the parts' canonical text."""
    text = "|".join(repr(p) if isinstance(p, float) else str(p) for p in parts)
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "little")


def worker_count() -> int:
    value = os.environ.get(WORKERS_ENV)
    if value:
        return max(1, int(value))
    return os.cpu_count() or 1


class SweepTaskError(RuntimeError):
    def __init__(self, spec: SweepSpec, secondary: float, instance: int, cause: BaseException):
        self.secondary = secondary
        self.instance = instance
        self.seed = stable_seed(spec.master_seed, spec.experiment, "mdp", instance)
        super().__init__(
            f"{spec.experiment}: instance {instance} at secondary={secondary} failed "
            f"(master_seed={spec.master_seed}, mdp_seed={self.seed}): {cause!r}"
        )


@dataclass(frozen=True)
class SweepRow:
    experiment: str
    secondary: float
    sweep: float
    loss_mean: float
    ci_low: float
    ci_high: float
    n_reps: int


@dataclass
class SweepResult:
    rows: list
    losses: dict = field(default_factory=dict)  # secondary -> array (n_instances, n_sweep)
    rejections: int = 0
    attempts: int = 0

    def curves(self) -> dict:
        out = {}
        for row in self.rows:
            out.setdefault(row.secondary, []).append(row)
        return out

    def argmin(self) -> dict:
        """Sweep value with the smallest mean loss on each curve (first on ties)."""
        return {sec: min(rows, key=lambda r: r.loss_mean).sweep for sec, rows in self.curves().items()}

    def row(self, secondary: float, sweep: float) -> SweepRow:
        for r in self.rows:
            if r.secondary == secondary and r.sweep == sweep:
                return r
        raise KeyError((secondary, sweep))


# ---------------------------------------------------------------------------
# per-instance work
# ---------------------------------------------------------------------------


def _lr(spec):
    a, b = spec.lr_numerator, spec.lr_offset
    return lambda i: a / (b + i)


def _value_loss(spec, v_hat, v_true):
    if spec.loss == "l2":
        return metrics.l2_value_loss(v_hat, v_true)
    loss = metrics.ranking_loss(v_hat, v_true)
    # a constant estimate carries no ranking information
    return 0.0 if math.isnan(loss) else loss


def _reg(spec, value):
    """(guidance discount, ridge factor) for one sweep value."""
    if spec.regularizer == "discount":
        return value, 0.0
    return spec.gamma_eval, value


def _mdp(spec, instance, attempt=0):
    rng = np.random.default_rng(stable_seed(spec.master_seed, spec.experiment, "mdp", instance, attempt))
    return envs.gridworld(GridSpec(spec.grid_width, spec.grid_height), rng)


def _policy_eval_task(spec, secondary, instance):
    mdp = _mdp(spec, instance)
    pi = uniform_policy(mdp.n_states, mdp.n_actions)
    v_true = exact_value(mdp, pi, spec.gamma_eval)
    data_rng = np.random.default_rng(stable_seed(spec.master_seed, spec.experiment, "data", secondary, instance))
    data = collect_trajectories(mdp, pi, int(secondary), spec.traj_len, data_rng)
    feats = FeatureMap.tabular(mdp.n_states)
    out = []
    for value in spec.sweep_values:
        gamma, l2 = _reg(spec, value)
        if spec.experiment.startswith("td0"):
            rng = np.random.default_rng(
                stable_seed(spec.master_seed, spec.experiment, "learn", secondary, value, instance)
            )
            cfg = RegConfig(gamma=gamma, gamma_eval=spec.gamma_eval, l2=l2, n_iter=spec.n_iter,
                            lr_schedule=_lr(spec))
            v_hat = td0_batch(data, feats, cfg, rng=rng)
        else:
            v_hat = lstd(data, feats, gamma, max(l2, spec.ridge_floor))
        out.append(_value_loss(spec, v_hat, v_true))
    return out, 0, 1


def _uniformity_task(spec, secondary, instance):
    mdp = _mdp(spec, instance)
    pi = uniform_policy(mdp.n_states, mdp.n_actions)
    v_true = exact_value(mdp, pi, spec.gamma_eval)
    rng = np.random.default_rng(stable_seed(spec.master_seed, spec.experiment, "data", secondary, instance))
    n_sa = mdp.n_states * mdp.n_actions
    dist = envs.sample_distribution_with_tv(n_sa, secondary, spec.tv_tol, rng)
    data = iid_dataset(mdp, pi, dist, spec.n_samples, rng)
    feats = FeatureMap.tabular_sa(mdp.n_states, mdp.n_actions)
    out = []
    for value in spec.sweep_values:
        gamma, l2 = _reg(spec, value)
        q = feats.values(lstdq(data, feats, pi, gamma, max(l2, spec.ridge_floor)))
        out.append(_value_loss(spec, np.sum(pi * q, axis=1), v_true))
    return out, 0, 1


def _mixing_task(spec, secondary, instance):
    rejected = 0
    for attempt in range(spec.max_resamples):
        mdp = _mdp(spec, instance, attempt)
        pi = uniform_policy(mdp.n_states, mdp.n_actions)
        try:
            chain = envs.augment_mixing_time(induced_chain(mdp, pi), secondary)
            break
        except (envs.MixingRejected, envs.DefectiveChainError):
            rejected += 1
    else:
        raise RuntimeError(f"no acceptable chain after {spec.max_resamples} resamples")
    mrp = markov_reward_process(chain, np.sum(pi * mdp.reward_mean, axis=1),
                               mdp.reward_std[:, 0], mdp.initial_dist)
    trivial = np.ones((mrp.n_states, 1))
    v_true = exact_value(mrp, trivial, spec.gamma_eval)
    rng = np.random.default_rng(stable_seed(spec.master_seed, spec.experiment, "data", secondary, instance))
    data = collect_trajectories(mrp, trivial, spec.n_traj, spec.traj_len, rng)
    feats = FeatureMap.tabular(mrp.n_states)
    out = []
    for value in spec.sweep_values:
        gamma, l2 = _reg(spec, value)
        out.append(_value_loss(spec, lstd(data, feats, gamma, max(l2, spec.ridge_floor)), v_true))
    return out, rejected, rejected + 1


def _control_task(spec, secondary, instance):
    mdp = _mdp(spec, instance)
    v_star, _ = optimal_value(mdp, spec.gamma_eval)
    out = []
    for value in spec.sweep_values:
        if spec.experiment == "grid_2d":
            gamma, l2, n_traj = value, secondary, spec.n_traj
        else:
            gamma, l2 = _reg(spec, value)
            n_traj = int(secondary)
        rng = np.random.default_rng(stable_seed(spec.master_seed, spec.experiment, "learn", secondary, value, instance))
        cfg = RegConfig(gamma=gamma, gamma_eval=spec.gamma_eval, l2=l2, n_iter=spec.n_iter, lr_schedule=_lr(spec))
        if spec.evaluator == "lstdq":
            cfg = cfg.replace(l2=max(l2, spec.ridge_floor))
        _, loss = approx_policy_iteration(
            mdp, spec.episodes, n_traj, spec.traj_len, spec.epsilon, cfg, spec.evaluator, rng, v_star=v_star
        )
        out.append(loss)
    return out, 0, 1


_TASKS = {
    "td0_discount": _policy_eval_task,
    "td0_l2": _policy_eval_task,
    "lstd_discount": _policy_eval_task,
    "lstd_l2": _policy_eval_task,
    "uniformity": _uniformity_task,
    "mixing": _mixing_task,
    "policy_opt": _control_task,
    "grid_2d": _control_task,
}


def run_task(spec: SweepSpec, secondary: float, instance: int):
    """Losses for every sweep value of one (curve, instance) pair.

    MDP instances are shared across curves and sweep values, so curves are
    paired comparisons.  Returns ``(losses, rejections, attempts)``.
    """
    try:
        return _TASKS[spec.experiment](spec, secondary, instance)
    except Exception as exc:
        raise SweepTaskError(spec, secondary, instance, exc) from exc


def _run_chunk(args):
    spec, jobs = args
    return [run_task(spec, sec, i) for sec, i in jobs]


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Run every (curve, instance) task and aggregate with Student-t intervals.

    The result depends only on ``spec``: each task seeds itself from a hash
    of the master seed and its grid coordinates, and rows are emitted in
    sorted grid order.
    """
    workers = worker_count() if workers is None else max(1, workers)
    secondaries = sorted(spec.secondary_values)
    sweeps = sorted(spec.sweep_values)
    spec = spec.replace(sweep_values=tuple(sweeps), secondary_values=tuple(secondaries))
    jobs = [(sec, i) for sec in secondaries for i in range(spec.n_instances)]

    if workers == 1 or len(jobs) == 1:
        outputs = _run_chunk((spec, jobs))
    else:
        n_chunks = min(len(jobs), workers * 4)
        chunks = [jobs[c::n_chunks] for c in range(n_chunks)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, [(spec, ch) for ch in chunks]))
        by_job = {}
        for ch, part in zip(chunks, parts):
            by_job.update(zip(ch, part))
        outputs = [by_job[j] for j in jobs]

    result = SweepResult(rows=[])
    for s_idx, sec in enumerate(secondaries):
        block = outputs[s_idx * spec.n_instances:(s_idx + 1) * spec.n_instances]
        losses = np.array([b[0] for b in block], dtype=np.float64)
        result.rejections += sum(b[1] for b in block)
        result.attempts += sum(b[2] for b in block)
        result.losses[sec] = losses
        for j, sw in enumerate(sweeps):
            mean, lo, hi = metrics.mean_ci(losses[:, j])
            result.rows.append(SweepRow(spec.experiment, sec, sw, mean, lo, hi, losses.shape[0]))
    if result.rejections:
        log.info("mixing augmentation rejected %d of %d chains", result.rejections, result.attempts)
    return result

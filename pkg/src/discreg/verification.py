"""Randomised numerical checks of the discount/regularization equivalences.

Each suite draws fresh GridWorld instances and datasets, runs both sides of
an equivalence on a shared sample sequence, and reports the worst
discrepancy seen.
"""

from dataclasses import dataclass

import numpy as np

from .envs import GridSpec, gridworld
from .features import FeatureMap
from .lstd import lstd_decompose, lstd_system
from .mdp import uniform_policy
from .sampling import m_step_segments, rollout
from .td import verify_prop1, verify_prop2, verify_prop3

GAMMAS = (0.3, 0.7, 0.9)
GAMMA_EVAL = 0.99
TOL = 1e-9


@dataclass(frozen=True)
class SuiteResult:
    name: str
    value: float
    threshold: float
    passed: bool
    trials: int

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.value:.3e} (threshold {self.threshold:.0e}, {self.trials} trials)"


def _trial_data(rng, n=50):
    mdp = gridworld(GridSpec(), rng)
    pi = uniform_policy(mdp.n_states, mdp.n_actions)
    return mdp, pi, rollout(mdp, pi, n, rng)


def td0_discrepancies(trials, rng, n_iter=200, lam_factor=1.0):
    out = []
    for t in range(trials):
        mdp, _, data = _trial_data(rng)
        feats = FeatureMap.tabular(mdp.n_states)
        seq = rng.integers(0, len(data), size=n_iter)
        theta0 = rng.normal(size=feats.dimension)
        out.append(verify_prop1(data, feats, GAMMA_EVAL, GAMMAS[t % 3], seq, theta0, lam_factor=lam_factor))
    return np.array(out)


def expected_sarsa_discrepancies(trials, rng, n_iter=200, lam_factor=1.0):
    out = []
    for t in range(trials):
        mdp, _, data = _trial_data(rng)
        # a random stochastic target policy, not just the behaviour policy
        policy = rng.dirichlet(np.ones(mdp.n_actions), size=mdp.n_states)
        feats = FeatureMap.tabular_sa(mdp.n_states, mdp.n_actions)
        seq = rng.integers(0, len(data), size=n_iter)
        theta0 = rng.normal(size=feats.dimension)
        out.append(verify_prop2(data, policy, feats, GAMMA_EVAL, GAMMAS[t % 3], seq, theta0,
                                lam_factor=lam_factor))
    return np.array(out)


def m_step_discrepancies(trials, rng, n_iter=200, lam_factor=1.0, ms=(2, 3)):
    out = []
    for t in range(trials):
        mdp, _, data = _trial_data(rng)
        m = ms[t % len(ms)]
        seg = m_step_segments(data, m, traj_len=len(data))
        feats = FeatureMap.tabular(mdp.n_states)
        seq = rng.integers(0, len(seg.s), size=n_iter)
        theta0 = rng.normal(size=feats.dimension)
        out.append(verify_prop3(seg, feats, GAMMA_EVAL, GAMMAS[t % 3], m, seq, theta0, lam_factor=lam_factor))
    return np.array(out)


def lstd_decomposition_errors(trials, rng):
    """Entrywise error of ``A(gamma) - (A(gamma_e) + (gamma_e - gamma) C)``."""
    out = []
    for _ in range(trials):
        mdp, _, data = _trial_data(rng, n=int(rng.integers(5, 200)))
        k = int(rng.integers(2, 20))
        feats = FeatureMap(rng.normal(size=(mdp.n_states, k)))
        gamma_eval = rng.uniform(0.5, 1.0)
        gamma = rng.uniform(0.0, gamma_eval)
        A_high, C = lstd_decompose(data, feats, gamma, gamma_eval)
        A = lstd_system(data, feats, gamma).A
        out.append(np.max(np.abs(A - (A_high + (gamma_eval - gamma) * C))))
    return np.array(out)


def run_all(trials=50, seed=0):
    rng = np.random.default_rng(seed)
    results = []
    for name, fn in (("TD(0) equivalence", td0_discrepancies),
                     ("Expected SARSA equivalence", expected_sarsa_discrepancies),
                     ("m-step TD equivalence", m_step_discrepancies)):
        worst = float(fn(trials, rng).max())
        results.append(SuiteResult(name, worst, TOL, worst < TOL, trials))
        control = float(fn(trials, rng, lam_factor=1.1).min())
        results.append(SuiteResult(f"{name} negative control (lambda +10%)", control, 1e-4, control > 1e-4, trials))
    worst = float(lstd_decomposition_errors(2 * trials, rng).max())
    results.append(SuiteResult("LSTD decomposition", worst, 1e-12, worst <= 1e-12, 2 * trials))
    return results

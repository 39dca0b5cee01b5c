"""Tabular policy evaluation with discount, activation and L2 regularization."""

from .envs import GridSpec, augment_mixing_time, gridworld, mixing_time, sample_distribution_with_tv, spectral_gap
from .features import FeatureMap
from .lstd import lstd, lstd_decompose, lstdq
from .mdp import (
    TabularMdp,
    epsilon_greedy,
    exact_q,
    exact_value,
    greedy_policy,
    induced_chain,
    optimal_value,
    uniform_policy,
)
from .sampling import TransitionDataset, collect_trajectories, iid_dataset, rollout
from .td import (
    RegConfig,
    equivalence_params,
    expected_sarsa_batch,
    m_step_td_batch,
    sarsa_batch,
    td0_batch,
)

__version__ = "0.1.0"

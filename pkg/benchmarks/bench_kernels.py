"""Time the numba and pure-numpy kernels on sweep-sized workloads.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from discreg import kernels
from discreg._backend import NUMBA_AVAILABLE
from discreg.envs import GridSpec, gridworld
from discreg.mdp import uniform_policy


def td_args(n_iter, n=100, k=16, seed=0):
    rng = np.random.default_rng(seed)
    eye = np.eye(k)
    return (np.zeros(k), eye[rng.integers(0, k, n)], eye[rng.integers(0, k, n)], rng.normal(size=n),
            rng.integers(0, n, n_iter), 500.0 / (1000.0 + np.arange(n_iter)), 1.0, 0.99, 0.0, 0.0, False)


def rollout_args(length, seed=0):
    rng = np.random.default_rng(seed)
    mdp = gridworld(GridSpec(), rng)
    return (kernels.cdf_rows(mdp.transition), kernels.cdf_rows(uniform_policy(16, 5)), mdp.reward_mean,
            mdp.reward_std, 0, rng.uniform(size=length + 1), rng.uniform(size=length), rng.normal(size=length))


def bench(fn, args, repeat):
    fn(*args)  # warm-up / compile
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if not NUMBA_AVAILABLE:
        print("numba is not installed; nothing to compare")
        return
    cases = [
        ("semi-gradient TD, 5000 updates", kernels.semi_gradient_td_numba, kernels.semi_gradient_td_numpy,
         td_args(5000)),
        ("semi-gradient TD, 100000 updates", kernels.semi_gradient_td_numba, kernels.semi_gradient_td_numpy,
         td_args(100_000)),
        ("rollout, 50 steps", kernels.rollout_numba, kernels.rollout_numpy, rollout_args(50)),
        ("rollout, 100000 steps", kernels.rollout_numba, kernels.rollout_numpy, rollout_args(100_000)),
    ]
    print(f"{'kernel':36s} {'numba':>12s} {'numpy':>12s} {'speed-up':>9s}")
    for name, fast, slow, a in cases:
        t_fast, t_slow = bench(fast, a, args.repeat), bench(slow, a, args.repeat)
        print(f"{name:36s} {t_fast * 1e3:10.3f}ms {t_slow * 1e3:10.3f}ms {t_slow / t_fast:8.1f}x")


if __name__ == "__main__":
    main()

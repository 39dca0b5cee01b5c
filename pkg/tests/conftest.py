import numpy as np
import pytest

from discreg.mdp import TabularMdp


def cycle_mdp(rewards=(0.0, 1.0), std=0.0):
    """Two states that deterministically swap; one action."""
    P = np.array([[[0.0, 1.0]], [[1.0, 0.0]]])
    r = np.array(rewards, dtype=float)[:, None]
    return TabularMdp(P, r, np.full((2, 1), std), np.array([1.0, 0.0]))


def random_mdp(rng, n_states=4, n_actions=3, std=0.0):
    P = rng.dirichlet(np.ones(n_states), size=(n_states, n_actions))
    r = rng.uniform(-1, 1, size=(n_states, n_actions))
    return TabularMdp(P, r, np.full((n_states, n_actions), std), np.full(n_states, 1.0 / n_states))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def cycle():
    return cycle_mdp()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

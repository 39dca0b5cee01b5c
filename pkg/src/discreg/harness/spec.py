"""Declarative sweep specifications and the figure presets."""

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

EXPERIMENTS = (
    "td0_discount",
    "td0_l2",
    "lstd_discount",
    "lstd_l2",
    "uniformity",
    "mixing",
    "policy_opt",
    "grid_2d",
)

# what the secondary axis means for each experiment
SECONDARY_AXIS = {
    "td0_discount": "n_traj",
    "td0_l2": "n_traj",
    "lstd_discount": "n_traj",
    "lstd_l2": "n_traj",
    "uniformity": "tv",
    "mixing": "mixing_time",
    "policy_opt": "n_traj",
    "grid_2d": "l2",
}


@dataclass(frozen=True)
class SweepSpec:
    """One experiment grid.

    ``sweep_values`` is the x axis of each curve: a guidance discount when
    ``regularizer == "discount"``, an L2 factor when ``"l2"`` (for
    ``grid_2d`` it is always the discount).  ``secondary_values`` selects the
    curve; its meaning is given by :data:`SECONDARY_AXIS`.
    """

    experiment: str
    sweep_values: tuple
    secondary_values: tuple
    n_instances: int = 100
    master_seed: int = 0
    regularizer: str = "discount"
    loss: str = "l2"
    gamma_eval: float = 0.99
    grid_width: int = 4
    grid_height: int = 4
    n_iter: int = 5000
    lr_numerator: float = 500.0
    lr_offset: float = 1000.0
    traj_len: int = 50
    n_traj: int = 2
    n_samples: int = 400
    tv_tol: float = 0.01
    episodes: int = 5
    epsilon: float = 0.1
    evaluator: str = "sarsa"
    ridge_floor: float = 1e-8
    max_resamples: int = 100

    def __post_init__(self):
        object.__setattr__(self, "sweep_values", tuple(float(v) for v in self.sweep_values))
        object.__setattr__(self, "secondary_values", tuple(float(v) for v in self.secondary_values))
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if not self.sweep_values or not self.secondary_values:
            raise ValueError("sweep grids must be nonempty")
        if self.n_instances < 1:
            raise ValueError("n_instances must be >= 1")
        if self.regularizer not in ("discount", "l2"):
            raise ValueError("regularizer must be 'discount' or 'l2'")
        if self.loss not in ("l2", "ranking"):
            raise ValueError("loss must be 'l2' or 'ranking'")
        if self.experiment.endswith("_discount"):
            object.__setattr__(self, "regularizer", "discount")
        elif self.experiment.endswith("_l2"):
            object.__setattr__(self, "regularizer", "l2")

    def replace(self, **changes) -> "SweepSpec":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["sweep_values"] = list(self.sweep_values)
        d["secondary_values"] = list(self.secondary_values)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown sweep keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "SweepSpec":
        """Load from a TOML (``.toml``) or JSON file of flat key-value pairs."""
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        data = json.loads(text) if path.suffix == ".json" else tomllib.loads(text)
        return cls.from_dict(data)


# 0.1..0.9 coarse, then 0.91..0.99 fine
GAMMA_GRID = tuple(round(0.1 * i, 2) for i in range(1, 10)) + tuple(round(0.9 + 0.01 * i, 2) for i in range(1, 10))
TRAJ_COUNTS = (1, 2, 4, 8, 16, 32)


# L2 ranges are scaled to where each learner's loss curve turns: at
# gamma_eval = 0.99 the LSTD matrix has per-state scale ~ visit rate * 0.01.
def _l2_grid(top: float, n: int = 11) -> tuple:
    return tuple(float(v) for v in np.round(np.linspace(0.0, top, n), 10))


FIGURES = ("fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig4")


def figure_preset(name: str, n_instances: int = 100, master_seed: int = 0) -> SweepSpec:
    """Parameterisation of one of the tabular figures at desk scale."""
    common = dict(n_instances=n_instances, master_seed=master_seed)
    if name == "fig1a":
        return SweepSpec("td0_discount", GAMMA_GRID, TRAJ_COUNTS, **common)
    if name == "fig1b":
        return SweepSpec("td0_l2", _l2_grid(0.002), TRAJ_COUNTS, **common)
    if name == "fig1c":
        return SweepSpec("lstd_discount", GAMMA_GRID, TRAJ_COUNTS, **common)
    if name == "fig1d":
        return SweepSpec("lstd_l2", _l2_grid(0.004), TRAJ_COUNTS, **common)
    tv_grid = (0.05, 0.1, 0.2, 0.4, 0.6, 0.8)
    if name == "fig2a":
        return SweepSpec("uniformity", GAMMA_GRID, tv_grid, regularizer="discount", **common)
    if name == "fig2b":
        return SweepSpec("uniformity", _l2_grid(0.0005), tv_grid, regularizer="l2", **common)
    mix_grid = (2.0, 5.0, 10.0, 20.0)
    if name == "fig2c":
        return SweepSpec("mixing", GAMMA_GRID, mix_grid, regularizer="discount", n_traj=2, traj_len=50, **common)
    if name == "fig2d":
        return SweepSpec("mixing", _l2_grid(0.004), mix_grid, regularizer="l2", n_traj=2, traj_len=50, **common)
    control = dict(traj_len=10, episodes=5, epsilon=0.1, evaluator="sarsa")
    if name == "fig3a":
        return SweepSpec("policy_opt", GAMMA_GRID, (4, 8, 16), regularizer="discount", **control, **common)
    if name == "fig3b":
        return SweepSpec("policy_opt", _l2_grid(0.005), (4, 8, 16), regularizer="l2", **control, **common)
    if name == "fig4":
        return SweepSpec("grid_2d", GAMMA_GRID, _l2_grid(0.004, 5), n_traj=8, **control, **common)
    raise ValueError(f"unknown figure {name!r}; expected one of {FIGURES}")

import csv
import json

import numpy as np
import pytest

from discreg.cli import main
from discreg.harness import SweepResult, SweepRow, SweepSpec, figure_preset, run_sweep, stable_seed
from discreg.harness.io import HEADER, emit_csv, emit_svg, read_csv
from discreg.harness.runner import SweepTaskError
from discreg.mdp import TabularMdp


def small_spec(**kw):
    base = dict(experiment="td0_discount", sweep_values=(0.99, 0.5, 0.9), secondary_values=(2, 1),
                n_instances=4, n_iter=300, master_seed=3)
    base.update(kw)
    return SweepSpec(**base)


def test_stable_seed():
    assert stable_seed(0, "x", 1) == stable_seed(0, "x", 1)
    assert stable_seed(0, "x", 1) != stable_seed(0, "x", 2)
    assert stable_seed(0.1) != stable_seed(0.10000000000000002)
    assert 0 <= stable_seed("a") < 2**64


def test_spec_validation(tmp_path):
    with pytest.raises(ValueError):
        small_spec(sweep_values=())
    with pytest.raises(ValueError):
        small_spec(n_instances=0)
    with pytest.raises(ValueError):
        small_spec(experiment="nope")
    assert small_spec(experiment="lstd_l2", regularizer="discount").regularizer == "l2"
    with pytest.raises(ValueError, match="unknown"):
        SweepSpec.from_dict({**small_spec().to_dict(), "bogus": 1})


def test_spec_from_toml_and_json(tmp_path):
    (tmp_path / "s.toml").write_text(
        'experiment = "lstd_discount"\nsweep_values = [0.5, 0.99]\nsecondary_values = [1]\nn_instances = 2\n'
    )
    spec = SweepSpec.from_file(tmp_path / "s.toml")
    assert spec.sweep_values == (0.5, 0.99)
    (tmp_path / "s.json").write_text(json.dumps(spec.to_dict()))
    assert SweepSpec.from_file(tmp_path / "s.json") == spec


def test_presets():
    f1 = figure_preset("fig1a")
    assert f1.experiment == "td0_discount" and f1.gamma_eval == 0.99 and f1.n_instances == 100
    assert max(f1.sweep_values) == 0.99
    f2 = figure_preset("fig2c")
    assert f2.experiment == "mixing" and (f2.n_traj, f2.traj_len) == (2, 50)
    f4 = figure_preset("fig4")
    assert f4.experiment == "grid_2d"
    assert (f4.n_traj, f4.traj_len, f4.episodes) == (8, 10, 5)
    assert len(f4.secondary_values) > 1
    assert figure_preset("fig2a", n_instances=7).n_instances == 7
    with pytest.raises(ValueError):
        figure_preset("fig9")


def test_sweep_rows_and_ci():
    res = run_sweep(small_spec(), workers=1)
    assert len(res.rows) == 6
    # canonical order: sorted by secondary, then sweep value
    assert [(r.secondary, r.sweep) for r in res.rows] == [(s, g) for s in (1.0, 2.0) for g in (0.5, 0.9, 0.99)]
    for r in res.rows:
        assert r.ci_low <= r.loss_mean <= r.ci_high
        assert r.n_reps == 4


def test_argmin_matches_independent_csv_scan(tmp_path):
    res = run_sweep(small_spec(), workers=1)
    emit_csv(res, tmp_path / "r.csv")
    best = {}
    with open(tmp_path / "r.csv") as fh:
        for rec in csv.DictReader(fh):
            key = float(rec["secondary"])
            if key not in best or float(rec["loss_mean"]) < best[key][0]:
                best[key] = (float(rec["loss_mean"]), float(rec["sweep"]))
    assert res.argmin() == {k: v[1] for k, v in best.items()}


def test_parallel_matches_serial(tmp_path):
    spec = small_spec()
    emit_csv(run_sweep(spec, workers=1), tmp_path / "a.csv")
    emit_csv(run_sweep(spec, workers=2), tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_single_state_has_nothing_to_regularize():
    spec = small_spec(grid_width=1, grid_height=1, loss="ranking", n_instances=1)
    res = run_sweep(spec, workers=1)
    assert len({r.loss_mean for r in res.rows}) == 1
    spec = SweepSpec("policy_opt", (0.5, 0.99), (2,), n_instances=1, grid_width=1, grid_height=1, n_iter=100,
                     traj_len=5, episodes=2)
    assert all(r.loss_mean == 0.0 for r in run_sweep(spec, workers=1).rows)


@pytest.mark.parametrize("experiment, sweep, sec", [
    ("lstd_l2", (0.0, 1e-3), (1,)),
    ("uniformity", (0.9, 0.99), (0.1, 0.6)),
    ("mixing", (0.9, 0.99), (2.0, 10.0)),
    ("grid_2d", (0.9, 0.99), (0.0, 1e-3)),
])
def test_every_experiment_runs(experiment, sweep, sec):
    spec = SweepSpec(experiment, sweep, sec, n_instances=2, n_iter=200, traj_len=10, episodes=2, n_traj=2)
    res = run_sweep(spec, workers=1)
    assert len(res.rows) == len(sweep) * len(sec)
    assert all(np.isfinite(r.loss_mean) for r in res.rows)


def test_failure_identifies_replay_point():
    # a single 2-step trajectory leaves states unvisited, so unregularized LSTD is singular
    spec = SweepSpec("lstd_l2", (0.0,), (1,), n_instances=1, traj_len=2, ridge_floor=0.0)
    with pytest.raises(SweepTaskError) as info:
        run_sweep(spec, workers=1)
    assert info.value.instance == 0 and info.value.seed == stable_seed(0, "lstd_l2", "mdp", 0)


def _row(**kw):
    base = dict(experiment="td0_discount", secondary=1.0, sweep=0.5, loss_mean=1.0 / 3, ci_low=0.1,
                ci_high=0.6, n_reps=100)
    base.update(kw)
    return SweepRow(**base)


def test_csv_empty_and_round_trip(tmp_path):
    emit_csv(SweepResult(rows=[]), tmp_path / "e.csv")
    assert (tmp_path / "e.csv").read_text() == ",".join(HEADER) + "\n"
    rows = [_row(), _row(sweep=0.9, loss_mean=2.0 / 7)]
    emit_csv(SweepResult(rows=rows[:1]), tmp_path / "one.csv")
    assert len((tmp_path / "one.csv").read_text().splitlines()) == 2
    emit_csv(SweepResult(rows=rows), tmp_path / "two.csv")
    back = read_csv(tmp_path / "two.csv").rows
    for a, b in zip(rows, back):
        for name in ("secondary", "sweep", "loss_mean", "ci_low", "ci_high"):
            assert float(f"{getattr(a, name):.12g}") == float(f"{getattr(b, name):.12g}")


def test_svg_has_band_and_star_per_curve(tmp_path):
    rows = [_row(secondary=s, sweep=g, loss_mean=(g - 0.6) ** 2 + s) for s in (1.0, 2.0) for g in (0.5, 0.7, 0.9)]
    emit_svg(SweepResult(rows=rows), tmp_path / "p.svg")
    text = (tmp_path / "p.svg").read_text()
    assert text.count('class="argmin"') == 2
    assert text.count("<polyline") == 2
    assert text.count('fill-opacity="0.2"') == 2


def test_cli_gen(tmp_path):
    assert main(["gen", "--seed", "1", "--grid", "3x2", "--count", "2", "--out-dir", str(tmp_path)]) == 0
    mdp = TabularMdp.load(tmp_path / "mdp_0001.json")
    assert mdp.n_states == 6


def test_cli_sweep_and_plot(tmp_path, capsys):
    (tmp_path / "s.toml").write_text(
        'experiment = "lstd_discount"\nsweep_values = [0.5, 0.99]\nsecondary_values = [1, 4]\nn_instances = 3\n'
    )
    out = tmp_path / "s.csv"
    assert main(["sweep", "--config", str(tmp_path / "s.toml"), "--out", str(out), "--svg",
                 str(tmp_path / "s.svg")]) == 0
    assert out.read_text().startswith(",".join(HEADER))
    assert main(["plot", str(out), "--out", str(tmp_path / "p.svg")]) == 0
    assert (tmp_path / "p.svg").read_text().count('class="argmin"') == 2


def test_cli_failure_exit_code(tmp_path, capsys):
    (tmp_path / "bad.json").write_text(json.dumps(
        {"experiment": "lstd_l2", "sweep_values": [0.0], "secondary_values": [1], "n_instances": 1,
         "traj_len": 2, "ridge_floor": 0.0}
    ))
    assert main(["sweep", "--config", str(tmp_path / "bad.json"), "--out", str(tmp_path / "x.csv")]) != 0
    assert "replay" in capsys.readouterr().err


def test_cli_verify(capsys):
    assert main(["verify", "equivalences", "--trials", "3"]) == 0
    assert capsys.readouterr().out.count("[PASS]") == 7

import json

import pytest

from tempreg import experiments as ex
from tempreg.cli import build_plan, main, make_parser, parse_grid, read_config
from tempreg.envs import random_mdp
from tempreg.markov import mixing_error_curve, stationary_distribution
from tempreg.textio import write_mdp

FAST_MIXING = ["--runs", "2"]


def test_parse_grid():
    assert parse_grid("0,0.5,0.9") == (0.0, 0.5, 0.9)
    assert parse_grid("0:0.3:0.1") == pytest.approx((0.0, 0.1, 0.2, 0.3))
    with pytest.raises(Exception):
        parse_grid("0:1")


def test_solve_prints_side_by_side(tmp_path, capsys):
    path = tmp_path / "env.txt"
    write_mdp(path, random_mdp(4, 0))
    assert main(["solve", "--env", str(path), "--beta", "0.5"]) == 0
    out = capsys.readouterr().out.splitlines()
    rows = [line.split() for line in out if line.strip()[:1].isdigit()]
    assert len(rows) == 4
    gap = max(abs(float(r[1]) - float(r[2])) for r in rows)
    reported = float(next(line for line in out if line.startswith("max_abs_gap")).split()[1])
    assert reported == pytest.approx(gap, abs=1e-9)
    assert any(line.startswith("bias_bound") for line in out)


def test_solve_builtin_and_dump(tmp_path, capsys):
    dump = tmp_path / "room.txt"
    assert main(["solve", "--env", "room", "--beta", "0.5", "--lambda", "0.5", "--dump", str(dump)]) == 0
    assert "method=exp-smoothing" in capsys.readouterr().out
    assert dump.read_text().startswith("n_states = 18")


def test_solve_beta_zero_no_gap(capsys):
    assert main(["solve", "--env", "cycle", "--beta", "0"]) == 0
    out = capsys.readouterr().out
    gap = float(next(line for line in out.splitlines() if line.startswith("max_abs_gap")).split()[1])
    assert gap < 1e-12


def test_mixing_beta_zero_matches_direct_call(tmp_path):
    assert main(["mixing", "--beta", "0", "--seed", "3", "--out", str(tmp_path)] + FAST_MIXING) == 0
    records = ex.read_csv(tmp_path / "mixing.csv")
    got = [r.value for r in records if r.seed == 3 and r.metric == "dist_to_Pinf"]
    p = random_mdp(10, 3).transition
    assert got == mixing_error_curve(p, stationary_distribution(p), 20)


def test_check_flag_exit_codes(tmp_path):
    args = ["mixing", "--out", str(tmp_path), "--check"]
    assert main(args) == 0
    assert main(args + ["--beta", "0.5"]) == 2


def test_usage_errors(capsys, tmp_path):
    with pytest.raises(SystemExit) as err:
        main(["nonsense"])
    assert err.value.code == 1
    with pytest.raises(SystemExit) as err:
        main(["mixing", "--bogus"])
    assert err.value.code == 1
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == 1
    assert main(["solve", "--env", str(tmp_path / "missing.txt")]) == 1
    assert "missing.txt" in capsys.readouterr().err
    assert main(["mixing", "--beta", "1.5", "--out", str(tmp_path)]) == 1


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as err:
        main(["all", "--help"])
    assert err.value.code == 0
    text = capsys.readouterr().out
    for flag in ("--seed", "--out", "--beta", "--lambda", "--sigma2", "--config", "--check", "--action-scale-is-var"):
        assert flag in text


def test_config_file(tmp_path):
    cfg = tmp_path / "plan.cfg"
    cfg.write_text("# sweep\nbetas = 0, 0.3\nvariance_runs = 7\nvariance_alpha_tau = none\nwalk_action_is_var = yes\n")
    settings = read_config(str(cfg))
    assert settings == {"betas": (0.0, 0.3), "variance_runs": 7, "variance_alpha_tau": None, "walk_action_is_var": True}
    args = make_parser().parse_args(["variance", "--config", str(cfg), "--runs", "9", "--beta", "0.4"])
    plan = build_plan(args)
    assert plan.variance_runs == 9 and plan.variance_beta == 0.4 and plan.betas == (0.0, 0.3)
    bad = tmp_path / "bad.cfg"
    bad.write_text("no_such_setting = 1\n")
    assert main(["mixing", "--config", str(bad), "--out", str(tmp_path)]) == 1


def test_noisy_walk_flags():
    args = make_parser().parse_args(["noisy-walk", "--sigma2", "0.09", "--action-scale-is-var", "--runs", "5"])
    plan = build_plan(args)
    assert plan.sigma2s == (0.09,) and plan.walk_lambda_sigma2 == 0.09
    assert plan.walk_action_is_var and plan.walk_reps == 5


def test_all_writes_six_csvs(tmp_path, monkeypatch):
    small = ex.SweepPlan(
        seed=7, betas=(0.0, 0.5), lambdas=(0.0, 0.5, 0.9), sigma2s=(0.0, 0.25), n_smooths=(0, 4),
        mixing_seeds=2, bias_seeds=2, variance_runs=3, variance_steps=50, room_seeds=2,
        room_trajectories=3, walk_reps=5, walk_episodes=1, walk_oracle_episodes=20,
    )
    monkeypatch.setattr("tempreg.cli.build_plan", lambda args: small)
    out = tmp_path / "results"
    assert main(["all", "--seed", "7", "--out", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == sorted([n + ".csv" for n in ex.EXPERIMENTS] + ["summary.json"])
    summary = json.loads((out / "summary.json").read_text())
    assert len(summary["checks"]) == 6
    assert summary["plan"]["seed"] == 7

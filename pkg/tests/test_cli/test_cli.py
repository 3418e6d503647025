from builtins import len, range, str
import json

import pytest

from settings.config import Settings
from shotflow.main import cli


def invoke(runner, *args, env=None):
    return runner.invoke(cli, [str(a) for a in args], env=env)


@pytest.fixture
def metrics_file(runner, season_logs_path, tmp_path):
    path = tmp_path / "metrics.json"
    result = invoke(runner, "ingest", season_logs_path, "--out", path)
    assert result.exit_code == 0, result.output
    return path


@pytest.fixture
def zero_intercept_profiles(tmp_path):
    path = tmp_path / "zero.json"
    path.write_text(json.dumps([
        {"player_id": f"z{i}", "slope": -0.5, "intercept": 0.0, "n_games": 12, "r_squared": 0.2} for i in range(5)
    ]))
    return path


# Test ingesting the bundled season into a metrics file
def test_ingest(metrics_file):
    metrics = json.loads(metrics_file.read_text())
    assert len(metrics) == 644
    assert list(metrics[0]) == ["player_id", "game_id", "ts_pct", "fts", "total_shots"]


def test_ingest_reports_skips(runner, season_logs_path, tmp_path):
    result = invoke(runner, "ingest", season_logs_path, "--out", tmp_path / "m.json")
    assert "skipped x02 g10: zero minutes" in result.output


def test_ingest_csv(runner, season_logs_path, tmp_path):
    out = tmp_path / "metrics.csv"
    result = invoke(runner, "--format", "csv", "ingest", season_logs_path, "--out", out)
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "player_id,game_id,ts_pct,fts,total_shots"
    assert len(lines) == 645


def test_ingest_missing_file(runner, tmp_path):
    result = invoke(runner, "ingest", tmp_path / "nowhere.csv")
    assert result.exit_code == 1
    assert "nowhere.csv" in result.output


def test_ingest_malformed(runner, malformed_logs_path):
    result = invoke(runner, "ingest", malformed_logs_path)
    assert result.exit_code == 2
    assert "row 2" in result.output


def test_fit(runner, metrics_file, tmp_path):
    out = tmp_path / "profiles.json"
    result = invoke(runner, "fit", metrics_file, "--out", out)
    assert result.exit_code == 0, result.output
    profiles = json.loads(out.read_text())
    assert [p["player_id"] for p in profiles] == [f"r{i:02d}" for i in range(1, 15)]
    assert "skipped x01" in result.output
    assert "skipped x02" in result.output


# Test that nobody reaching the minimum game count is an input error
def test_fit_nobody_qualifies(runner, metrics_file):
    result = invoke(runner, "--min-games-fit", 50, "fit", metrics_file)
    assert result.exit_code == 2


def test_fit_constant_usage_skipped(runner, tmp_path):
    records = [{"player_id": "c", "game_id": f"g{i:02d}", "ts_pct": 0.5 + 0.01 * i, "fts": 0.2, "total_shots": 10}
               for i in range(12)]
    records += [{"player_id": "v", "game_id": f"g{i:02d}", "ts_pct": 0.6 - 0.1 * (0.1 + 0.02 * i),
                 "fts": 0.1 + 0.02 * i, "total_shots": 10} for i in range(12)]
    path = tmp_path / "metrics.json"
    path.write_text(json.dumps(records))
    out = tmp_path / "profiles.json"
    result = invoke(runner, "fit", path, "--out", out)
    assert result.exit_code == 0
    assert "DegenerateFit" in result.output
    assert [p["player_id"] for p in json.loads(out.read_text())] == ["v"]


def test_compare(runner, roster_profiles_path, tmp_path):
    out = tmp_path / "compare.json"
    result = invoke(runner, "compare", roster_profiles_path, "r01", "r02", "r03", "r04", "r05", "--out", out)
    assert result.exit_code == 0, result.output
    table = json.loads(out.read_text())
    assert table["lineup"] == ["r01", "r02", "r03", "r04", "r05"]
    assert len(table["strategies"]) == 5
    payoffs = [s["payoff"] for s in table["strategies"]]
    assert payoffs == sorted(payoffs, reverse=True)
    assert table["strategies"][0]["strategy"] == "optimal"
    assert table["price_of_anarchy"]["ratio"] >= 1.0


def test_compare_csv(runner, roster_profiles_path, tmp_path):
    out = tmp_path / "compare.csv"
    result = invoke(runner, "--format", "csv", "compare", roster_profiles_path,
                    "r01", "r02", "r03", "r04", "r05", "--out", out)
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "strategy,payoff,feasible,x1,x2,x3,x4,x5"
    assert lines[1].startswith("optimal,")
    assert len(lines) == 6


def test_compare_unknown_player(runner, roster_profiles_path):
    result = invoke(runner, "compare", roster_profiles_path, "r01", "r02", "r03", "r04", "nobody")
    assert result.exit_code == 2
    assert "nobody" in result.output


def test_compare_infeasible(runner, zero_intercept_profiles):
    result = invoke(runner, "compare", zero_intercept_profiles, "z0", "z1", "z2", "z3", "z4")
    assert result.exit_code == 3


def test_compare_repeated_player(runner, roster_profiles_path):
    result = invoke(runner, "compare", roster_profiles_path, "r01", "r01", "r02", "r03", "r04")
    assert result.exit_code == 2
    assert "lineup repeats r01" in result.output


# Test that --verify runs the grid search at the configured step and reports a small gap
def test_compare_verify(runner, roster_profiles_path, tmp_path):
    out = tmp_path / "compare.json"
    result = invoke(runner, "--grid-step", 0.01, "compare", roster_profiles_path,
                    "r01", "r02", "r03", "r04", "r05", "--verify", "--out", out)
    assert result.exit_code == 0, result.output
    verification = json.loads(out.read_text())["verification"]
    assert verification["grid_step"] == 0.01
    assert -1e-9 <= verification["gap"] <= 2e-2


def test_compare_verify_csv(runner, roster_profiles_path):
    result = invoke(runner, "--format", "csv", "compare", roster_profiles_path,
                    "r01", "r02", "r03", "r04", "r05", "--verify")
    assert result.exit_code == 0
    assert "verification grid_step=0.005000" in result.output


def test_compare_without_verify_omits_key(runner, roster_profiles_path):
    result = invoke(runner, "compare", roster_profiles_path, "r01", "r02", "r03", "r04", "r05")
    assert "verification" not in json.loads(result.output)


def test_compare_duplicate_profiles(runner, roster_profiles_path, tmp_path):
    records = json.loads(roster_profiles_path.read_text())
    path = tmp_path / "dupes.json"
    path.write_text(json.dumps(records + records[:1]))
    result = invoke(runner, "compare", path, "r01", "r02", "r03", "r04", "r05")
    assert result.exit_code == 2
    assert "duplicate profiles for r01" in result.output


def test_enumerate_starters(runner, starter_profiles_path, tmp_path):
    out = tmp_path / "starters.json"
    result = invoke(runner, "enumerate", starter_profiles_path, "--group", "starters", "--out", out)
    assert result.exit_code == 0, result.output
    summary = json.loads(out.read_text())
    assert summary["group"] == "starters"
    assert summary["lineup_count"] == 21
    assert list(summary["per_strategy_mean_payoff"]) == ["optimal", "star_feed", "equal_shots", "equal_utility", "nash"]


@pytest.mark.slow
def test_enumerate_roster(runner, roster_profiles_path, tmp_path):
    out = tmp_path / "roster.json"
    result = invoke(runner, "enumerate", roster_profiles_path, "--out", out)
    assert result.exit_code == 0
    assert json.loads(out.read_text())["lineup_count"] == 2002


# Test selecting the group from game logs and writing the per-lineup rows
def test_enumerate_with_logs(runner, roster_profiles_path, season_logs_path, tmp_path):
    out = tmp_path / "summary.json"
    rows = tmp_path / "lineups.csv"
    result = invoke(runner, "enumerate", roster_profiles_path, "--group", "starters", "--logs", season_logs_path,
                    "--lineups-csv", rows, "--out", out)
    assert result.exit_code == 0, result.output
    summary = json.loads(out.read_text())
    assert summary["player_count"] == 7
    assert summary["lineup_count"] == 21
    lines = rows.read_text().splitlines()
    assert lines[0] == "lineup,strategy,payoff,feasible"
    assert len(lines) == 1 + 21 * 5


def test_enumerate_both_needs_logs(runner, roster_profiles_path):
    result = invoke(runner, "enumerate", roster_profiles_path, "--group", "both")
    assert result.exit_code == 2


def test_enumerate_too_few(runner, four_profiles_path):
    result = invoke(runner, "enumerate", four_profiles_path)
    assert result.exit_code == 2


def test_braess(runner, tmp_path):
    out = tmp_path / "braess.json"
    result = invoke(runner, "braess", 10, 10, 1, "--out", out)
    assert result.exit_code == 0
    text = out.read_text()
    assert '"ratio": 1.333333' in text
    report = json.loads(text)
    assert report["equilibrium"]["total_cost"] == 100.0
    assert report["optimal"]["total_cost"] == 75.0


def test_braess_single_car(runner):
    result = invoke(runner, "braess", 1, 10, 1)
    assert result.exit_code == 0
    assert '"ratio": 1.000000' in result.output


def test_braess_invalid(runner):
    result = invoke(runner, "braess", 0, 10, 1)
    assert result.exit_code == 2


# Test that a written config re-parses to the same settings and reproduces itself
def test_config_round_trip(runner, tmp_path):
    first, second = tmp_path / "first.json", tmp_path / "second.json"
    assert invoke(runner, "--shot-cap", 0.35, "--grid-step", 0.01, "config", "--out", first).exit_code == 0
    assert invoke(runner, "--config", first, "config", "--out", second).exit_code == 0
    assert first.read_bytes() == second.read_bytes()
    config = Settings(**json.loads(first.read_text()))
    assert (config.shot_cap, config.grid_step) == (0.35, 0.01)


def test_config_env_fallback(runner, tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"roster_threshold": 12}))
    result = invoke(runner, "config", env={"SHOTFLOW_CONFIG": str(path)})
    assert json.loads(result.output)["roster_threshold"] == 12


def test_invalid_config_flag(runner):
    result = invoke(runner, "--shot-cap", 0.1, "config")
    assert result.exit_code == 2


# Test that the whole pipeline writes byte-identical files on repeated runs
def test_pipeline_deterministic(runner, season_logs_path, tmp_path):
    outputs = []
    for run in range(2):
        metrics, profiles, summary = (tmp_path / f"{name}{run}.json" for name in ("metrics", "profiles", "summary"))
        assert invoke(runner, "ingest", season_logs_path, "--out", metrics).exit_code == 0
        assert invoke(runner, "fit", metrics, "--out", profiles).exit_code == 0
        result = invoke(runner, "enumerate", profiles, "--group", "starters", "--logs", season_logs_path,
                        "--out", summary)
        assert result.exit_code == 0, result.output
        outputs.append((metrics.read_bytes(), profiles.read_bytes(), summary.read_bytes()))
    assert outputs[0] == outputs[1]

import json

import pytest
from click.testing import CliRunner
from mpmath import mpf

from dsemi import cli
from dsemi import e7system as e7
from dsemi.errors import HardSingularity


@pytest.fixture
def run(tmp_path, monkeypatch):
    monkeypatch.delenv("DSEMI_PRECISION", raising=False)

    def invoke(*args, config=None):
        argv = list(args)
        if config is not None:
            path = tmp_path / "run.cfg"
            path.write_text(config)
            argv += ["--config", str(path)]
        return CliRunner().invoke(cli.main, argv)

    return invoke


def _lines(result):
    return [json.loads(s) for s in result.stdout.splitlines()]


def test_empty_suite_list_gives_header_only(run):
    res = run("verify", config="suites =\n")
    assert res.exit_code == 0
    (env,) = _lines(res)
    assert env["environment"]["kind"] == "verify"


@pytest.mark.parametrize(
    "config",
    ["q = two\n", "suites = no-such-suite\n", "a1 = 1.5\n", "t = 1\n", "alpha = 0\n"],
)
def test_config_errors_exit_2(run, config):
    assert run("verify", config=config).exit_code == 2


def test_unknown_suite_option_exits_2(run):
    assert run("verify", "--suite", "bogus").exit_code == 2


def test_single_suite_passes(run):
    res = run("verify", "--suite", "aw-pearson")
    assert res.exit_code == 0
    recs = _lines(res)[1:]
    assert {r["check_id"] for r in recs} >= {"pearson_100_points"}
    assert all(r["pass"] for r in recs)


def test_scope_suite_reports_out_of_scope(run):
    res = run("verify", "--suite", "scope")
    assert res.exit_code == 0
    recs = _lines(res)[1:]
    assert [r["status"] for r in recs] == ["out of scope"] * 2
    assert all(r["pass"] is None for r in recs)


def test_low_precision_marks_precision_limited(run):
    res = run("verify", "--suite", "aw-pearson", "--precision", "20")
    recs = _lines(res)[1:]
    assert any(r.get("status") == "precision-limited" for r in recs)
    assert _lines(res)[0]["environment"]["precision"] == 20


def test_env_precision_override(run, monkeypatch):
    monkeypatch.setenv("DSEMI_PRECISION", "40")
    res = run("verify", config="suites =\n")
    assert _lines(res)[0]["environment"]["precision"] == 40


def test_output_path(run, tmp_path):
    out = tmp_path / "report.jsonl"
    res = run("verify", config=f"suites =\noutput_path = {out}\n")
    assert res.exit_code == 0 and res.stdout == ""
    assert json.loads(out.read_text())["environment"]["precision"] == 60


def test_evolve_zero_steps_is_header_only(run):
    res = run("evolve", "--steps", "0")
    assert res.exit_code == 0
    env, cols = _lines(res)
    assert "environment" in env and cols["columns"][0] == "step"


@pytest.mark.parametrize("direction", ["fwd", "bwd"])
def test_evolve_seed_orbit(run, direction):
    res = run("evolve", "--steps", "3", "--direction", direction)
    assert res.exit_code == 0
    rows = _lines(res)[2:]
    assert [r["step"] for r in rows] == [0, 1, 2, 3]
    alpha, q = mpf("0.35"), mpf("0.5")
    for r in rows:
        t = mpf(r["t"])
        # the seed family keeps f = q^(-1/2) alpha t
        assert abs(mpf(r["f"]) - alpha * t / q**0.5) < mpf(10) ** -25
    for r in rows[1:]:
        assert mpf(r["round_trip"]) < mpf(10) ** -40
    ratio = mpf(rows[1]["t"]) / mpf(rows[0]["t"])
    assert abs(ratio - (q if direction == "fwd" else 1 / q)) < mpf(10) ** -25


def test_evolve_reports_hard_singularity(run, monkeypatch):
    real = e7.evolve_forward
    calls = {"n": 0}

    def flaky(state):
        calls["n"] += 1
        if calls["n"] == 2:
            raise HardSingularity("f hits a hard pole")
        return real(state)

    monkeypatch.setattr(e7, "evolve_forward", flaky)
    res = run("evolve", "--steps", "4")
    assert res.exit_code == 1
    last = _lines(res)[-1]
    assert last == {"abort": {"step": 2, "error": "HardSingularity", "message": "f hits a hard pole"}}


def test_evolve_rejects_orbit_index_beyond_reference(run):
    assert run("evolve", "--steps", "1", config="orbit_n = 3\nn_max = 3\n").exit_code == 2


@pytest.mark.parametrize("what", ["moments", "recurrence", "spectral"])
def test_aw_tables(run, what):
    res = run("table", "--what", what, "--n", "3")
    assert res.exit_code == 0
    rows = _lines(res)[1:]
    assert [r["k"] for r in rows] == [0, 1, 2, 3]
    if what == "recurrence":
        for r in rows[1:]:
            assert abs(mpf(r["a2_hankel"]) - mpf(r["a2_closed"])) < mpf(10) ** -30
            assert abs(mpf(r["b_hankel"]) - mpf(r["b_closed"])) < mpf(10) ** -30


def test_m3_moment_table(run):
    res = run("table", "--what", "moments", "--n", "2", "--system", "m3")
    assert res.exit_code == 0
    rows = _lines(res)[1:]
    assert [r["j"] for r in rows] == [0, 1, 2]
    assert mpf(rows[0]["t"]) == mpf("1.3")

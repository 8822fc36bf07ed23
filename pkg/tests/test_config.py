import pytest

from dsemi.config import PRECISION_ENV, RunConfig, load_config, parse_config
from dsemi.errors import ConfigInvalid


def test_defaults():
    cfg = parse_config("")
    assert cfg == RunConfig()
    assert cfg.a == ("0.1", "0.2", "0.3", "0.4")
    assert cfg.suites is None


def test_comments_blank_lines_and_lists():
    cfg = parse_config("# header\n\nq = 0.25  # base\nsuites = aw-pearson, seed,\nn_max=4\n")
    assert cfg.q == "0.25"
    assert cfg.suites == ("aw-pearson", "seed")
    assert cfg.n_max == 4


def test_empty_suite_list_is_kept_distinct_from_default():
    assert parse_config("suites =").suites == ()


@pytest.mark.parametrize(
    "text",
    [
        "nonsense",
        "colour = red",
        "q = 0.5\nq = 0.6",
        "q = half",
        "alpha = 1/3",
        "precision_digits = 5",
        "n_max = 1",
        "rng_seed = -3",
        "orbit_steps = two",
    ],
)
def test_rejects(text):
    with pytest.raises(ConfigInvalid):
        parse_config(text)


@pytest.mark.parametrize("value", ["0.5", "-1.25", ".5", "3", "1e-3", "+2.E4"])
def test_accepts_decimal_forms(value):
    assert parse_config(f"t = {value}").t == value


def test_digest_is_stable_and_sensitive():
    a, b = parse_config("q = 0.5"), RunConfig()
    assert a.digest() == b.digest()
    assert parse_config("q = 0.50").digest() != b.digest()
    assert parse_config("output_path = /tmp/x").digest() == b.digest()


def test_env_overrides_precision_only(monkeypatch, tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("precision_digits = 50\nq = 0.4\n")
    monkeypatch.setenv(PRECISION_ENV, "80")
    cfg = load_config(str(path))
    assert (cfg.precision_digits, cfg.q) == (80, "0.4")
    assert load_config(str(path), 70).precision_digits == 70


def test_env_value_is_validated(monkeypatch):
    monkeypatch.setenv(PRECISION_ENV, "abc")
    with pytest.raises(ConfigInvalid):
        load_config(None)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigInvalid):
        load_config(str(tmp_path / "absent.cfg"))

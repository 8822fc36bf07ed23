import json

import pytest
from mpmath import mpf

from dsemi.report import (
    OUT_OF_SCOPE,
    CheckRecord,
    effective_tolerance,
    environment_record,
    exit_status,
    fmt_real,
    fmt_value,
    render,
)


@pytest.mark.parametrize(
    ("x", "text"),
    [(0, "0"), (mpf("1e-25"), "1.0e-25"), (mpf("1.775469e-59"), "1.77547e-59"), (-mpf(2), "2.0")],
)
def test_fmt_real(x, text):
    assert fmt_real(x) == text


def test_fmt_value_drops_negligible_imaginary_part():
    assert fmt_value(mpf("1.5")) == "1.5"
    assert fmt_value(mpf(1) + 1j * mpf(10) ** -40) == "1.0"
    assert fmt_value(1 - 2j).endswith("-2.0j")


def test_effective_tolerance():
    tol, relaxed = effective_tolerance(1e-20, 10, 60)
    assert tol == mpf(1e-20) and not relaxed
    tol, relaxed = effective_tolerance(1e-20, 10, 20)
    assert tol == mpf(10) ** -10 and relaxed


def test_record_status_fields():
    ok = CheckRecord("s", "c", "X:a", mpf("1e-30"), mpf("1e-20"))
    bad = CheckRecord("s", "d", "X:b", mpf("1e-3"), mpf("1e-20"))
    limited = CheckRecord("s", "e", "X:c", mpf("1e-12"), mpf("1e-10"), precision_limited=True)
    oos = CheckRecord("s", "f", "E7", None, None, status=OUT_OF_SCOPE)
    assert ok.as_dict()["pass"] is True and "status" not in ok.as_dict()
    assert bad.passed is False
    assert limited.as_dict()["status"] == "precision-limited"
    assert oos.as_dict() == {
        "suite": "s",
        "check_id": "f",
        "paper_anchor": "E7",
        "max_residual": None,
        "tolerance": None,
        "pass": None,
        "status": OUT_OF_SCOPE,
    }
    assert exit_status([ok, limited, oos]) == 0
    assert exit_status([ok, bad]) == 1
    assert exit_status([]) == 0


def test_render_is_deterministic_json_lines():
    env = environment_record(60, 1, "abc")
    recs = [CheckRecord("s", "c", "X:a", mpf(1) / 3 * mpf(10) ** -40, mpf("1e-20"))]
    text = render(env, recs)
    assert text == render(env, list(recs))
    lines = text.splitlines()
    assert json.loads(lines[0]) == {"environment": {"kind": "verify", "precision": 60, "seed": 1, "config_hash": "abc"}}
    assert list(json.loads(lines[1])) == ["suite", "check_id", "paper_anchor", "max_residual", "tolerance", "pass"]
    assert text.endswith("\n")

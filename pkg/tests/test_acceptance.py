"""Acceptance criteria: one test, and one PASS/FAIL line, per criterion.

Residual thresholds below are the criterion's own numbers, compared against the
``max_residual`` of the matching report records, independent of the tolerance
the suite itself applied.
"""

import os
import subprocess
import sys
import time

import pytest
from conftest import CRITERIA_LINES
from mpmath import mpf

from dsemi.config import RunConfig
from dsemi.report import environment_record, render
from dsemi.suites import run_suites


def _report(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    CRITERIA_LINES.append(line)
    print(line)


def _select(records, suite, ids):
    by_id = {r.check_id: r for r in records if r.suite == suite}
    missing = [i for i in ids if i not in by_id]
    assert not missing, f"missing checks {missing}"
    return [by_id[i] for i in ids]


def _worst(recs):
    return max(recs, key=lambda r: r.max_residual)


def _timed_suite(name):
    t0 = time.perf_counter()
    records = run_suites(RunConfig(suites=(name,)))
    return records, time.perf_counter() - t0


RESIDUAL_CRITERIA = [
    (2, "aw-integral", {"I2_vs_quadrature_4096": "1e-30", "I2_recurrence": "1e-25"}),
    (
        4,
        "aw-spectral",
        {i: "1e-20" for i in ("bilinear_n0_6", "DDO_a_n0_6", "DDO_b_n0_6", "DDO_c_n0_6", "DDO_d_n0_6")},
    ),
    (
        5,
        "laguerre-freud",
        {
            f"{sys_}_{c}_n0_2": "1e-18"
            for sys_ in ("aw", "m3")
            for c in ("recur_a", "recur_b", "recur_c", "AK_a", "AK_b", "AK_c", "AK_d")
        },
    ),
    (6, "m3-moments", {"explicit_3TermMoment": "1e-20", "explicit_int_recur_b": "1e-20"}),
    (
        7,
        "deformation",
        {
            i: "1e-15"
            for i in (
                "linear_n1_2",
                "trace_n0_2",
                "bilinear_n0_2",
                "recur_a_n0_2",
                "recur_b_n0_2",
                "BK_a_n0_2",
                "BK_b_n0_2",
                "BK_c_n0_2",
                "BK_d_n0_2",
                "schlesinger_n0_2",
            )
        },
    ),
    (
        8,
        "closure",
        {
            i: "1e-15"
            for i in ["Dclose_a", "Dclose_b", "Dclose_c", "Dclose_d", "prodId", "splitId"]
            + [f"cse_{c}" for c in "adfgilno"]
        },
    ),
    (9, "seed", {"explicit_rho_tEvol_a": "1e-18", "explicit_rho_riccati": "1e-18", "explicit_CLsoln_c": "1e-18"}),
    (10, "evolution", {"round_trip_orbit": "1e-14", "perfect_square_orbit": "1e-16"}),
]


@pytest.mark.parametrize(("k", "suite", "limits"), RESIDUAL_CRITERIA, ids=[f"criterion_{c[0]}" for c in RESIDUAL_CRITERIA])
def test_residual_criterion(full_run, k, suite, limits):
    records, _ = full_run
    recs = _select(records, suite, list(limits))
    bad = [r.check_id for r in recs if not r.max_residual < mpf(limits[r.check_id])]
    w = _worst(recs)
    _report(k, not bad, f"{suite}: {len(recs)} checks, worst {w.check_id} = {float(w.max_residual):.3g}" + (f", over limit: {bad}" if bad else ""))
    assert not bad


def test_criterion_1_pearson(full_run):
    (rec,) = _select(full_run[0], "aw-pearson", ["pearson_100_points"])
    _, seconds = _timed_suite("aw-pearson")
    ok = rec.max_residual < mpf("1e-25") and seconds < 10
    _report(1, ok, f"pearson residual {float(rec.max_residual):.3g}, fresh run {seconds:.1f} s")
    assert ok


def test_criterion_3_hankel(full_run):
    recs = _select(full_run[0], "aw-recurrence", ["a2_n1_6_hankel", "b_n1_6_hankel"])
    _, seconds = _timed_suite("aw-recurrence")
    w = _worst(recs)
    ok = w.max_residual < mpf("1e-20") and seconds < 60
    _report(3, ok, f"worst {w.check_id} = {float(w.max_residual):.3g}, fresh run {seconds:.1f} s")
    assert ok


def test_criterion_11_determinism(full_run, workspace):
    records, _ = full_run
    cfg = workspace.cfg
    first = render(environment_record(cfg.precision_digits, cfg.rng_seed, cfg.digest(), "verify"), records)
    t0 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-c", "from dsemi.cli import main; main()", "verify"],
        capture_output=True,
        text=True,
        env={k: v for k, v in os.environ.items() if k != "DSEMI_PRECISION"},
    )
    seconds = time.perf_counter() - t0
    ok = proc.returncode == 0 and proc.stdout == first and seconds < 900
    _report(11, ok, f"{len(first.splitlines())} report lines byte-identical: {proc.stdout == first}, full run {seconds:.0f} s")
    assert ok, proc.stderr[-2000:]

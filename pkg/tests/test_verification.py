import math
from io import StringIO

import pytest

from lsst.ts.radon_inversion import verification
from lsst.ts.radon_inversion.config import load_config
from lsst.ts.radon_inversion.exceptions import CheckFailure, DomainError
from lsst.ts.radon_inversion.verification import CheckResult, results_frame, run_suites, write_report

SMALL = load_config(
    None,
    [
        "image_size=32",
        "image_spacing=0.125",
        "inner_width=0.5",
        "outer_width=1.0",
        "n_theta=48",
        "n_t=128",
        "n_v=33",
        "r_max=1.0",
        "dr=0.1",
        "n_r_geometric=4",
    ],
)


def test_check_result_passes():
    assert CheckResult("s", "p", 1e-3, 1e-3).passed
    assert not CheckResult("s", "p", 1e-3, 1e-3, strict=True).passed
    assert CheckResult("s", "p", 0.5, 1.0, strict=True).passed
    assert not CheckResult("s", "p", math.nan, 1.0).passed
    assert not CheckResult("s", "p", math.inf, math.inf).passed
    assert CheckResult("s", "p", 0.1, 1.0).as_row() == {
        "suite": "s",
        "property": "p",
        "measured": 0.1,
        "budget": 1.0,
        "passed": True,
    }


def test_write_report():
    results = [CheckResult("s", "ok", 0.1, 1.0), CheckResult("s", "over", 2.0, 1.0)]
    stream = StringIO()
    with pytest.raises(CheckFailure, match="1 of 2 checks failed: over"):
        write_report(results, stream)
    lines = stream.getvalue().splitlines()
    assert lines == [
        "suite,property,measured,budget,passed",
        "s,ok,1.000000e-01,1.000000e+00,True",
        "s,over,2.000000e+00,1.000000e+00,False",
    ]
    frame = write_report(results[:1], StringIO())
    assert frame["passed"].all()


def test_results_frame_of_nothing():
    frame = results_frame([])
    assert frame.empty
    assert list(frame.columns) == verification.REPORT_COLUMNS


def test_run_suites_order_and_names(monkeypatch):
    calls = []

    def suite(name):
        def run(config):
            calls.append(name)
            return [CheckResult(name, f"{name}_check", 0.0, 1.0)]

        return run

    monkeypatch.setattr(verification, "SUITES", {"b": suite("b"), "a": suite("a")})
    assert [r.suite for r in run_suites(SMALL, ["all"])] == ["b", "a"]
    assert [r.suite for r in run_suites(SMALL, ["a", "b"])] == ["a", "b"]
    with pytest.raises(DomainError):
        run_suites(SMALL, ["a", "c"])


def test_suite_names():
    assert list(verification.SUITES) == [
        "slice",
        "unitarity",
        "intertwining",
        "semi_invariance",
        "admissibility",
        "energy",
        "inversion",
        "lowpass",
        "coefficients",
    ]


def test_admissibility_suite_passes():
    results = run_suites(SMALL, ["admissibility"])
    assert [r.property for r in results] == ["admissibility_sim2", "admissibility_shearlet"]
    assert all(r.passed for r in results)


def test_slice_suite_on_a_small_grid():
    results = verification.check_slice(SMALL)
    assert [r.property for r in results] == ["slice_polar", "slice_affine", "slice_circular", "slice_polar_gaussian"]
    assert all(math.isfinite(r.measured) for r in results)
    assert [r.budget for r in results] == [1e-2, 1e-2, 1e-2, 1e-3]


def test_tolerance_overrides_reach_the_budgets():
    config = SMALL.model_copy(update={"tolerances": {"admissibility_sim2": 0.5}})
    results = verification.check_admissibility(config)
    assert results[0].budget == 0.5
    assert results[1].budget == 1e-3


def test_semi_invariance_suite():
    config = SMALL.model_copy(update={"image_size": 64, "image_spacing": 1 / 16})
    results = verification.check_semi_invariance(config)
    assert [r.property for r in results] == ["A_s", "I_polar"]
    assert all(r.measured < 0.1 for r in results)

from io import StringIO

import pytest

from lsst.ts.radon_inversion import verification
from lsst.ts.radon_inversion.cli.main import build_parser, main
from lsst.ts.radon_inversion.rfa_io import read_rfa
from lsst.ts.radon_inversion.verification import CheckResult

SMALL = [
    "--set",
    "image_spacing=0.125",
    "--set",
    "inner_width=0.5",
    "--set",
    "outer_width=1.0",
    "--set",
    "n_angles=8",
    "--set",
    "n_scales=12",
    "--set",
    "a_min=0.05",
]


def run(*argv):
    out, err = StringIO(), StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_calpha():
    code, out, err = run("calpha", "0.5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "scheme,c_alpha,k_alpha,radius"
    assert lines[1].startswith("adaptive,")
    assert lines[-1].startswith("relative_gap,")
    assert err == ""


def test_calpha_out_of_domain():
    code, _, err = run("calpha", "1.5")
    assert code == 1
    assert err.startswith("[DOMAIN]")


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["phantom", "dog"], ["calpha", "half"]])
def test_usage_errors(argv):
    code, _, err = run(*argv)
    assert code == 1
    assert err.startswith("[USAGE]")


def test_version(capsys):
    with pytest.raises(SystemExit) as excinfo:
        build_parser().parse_args(["--version"])
    assert excinfo.value.code == 0
    assert capsys.readouterr().out.strip() != ""


def test_bad_config_value(tmp_path):
    code, _, err = run("--set", "bogus=1", "phantom", "dog", "--out", str(tmp_path / "p.rfa"))
    assert code == 1
    assert err.startswith("[BADCONF]")


def test_missing_input_file(tmp_path):
    code, _, err = run("unitarize", "--in", str(tmp_path / "none.rfa"), "--out", str(tmp_path / "q.rfa"))
    assert code == 3
    assert err.startswith("[BADFILE]")


def test_phantom_radon_unitarize_export(tmp_path):
    image = str(tmp_path / "p.rfa")
    sino = str(tmp_path / "s.rfa")
    assert run(*SMALL, "phantom", "dog", "--size", "32", "--out", image)[0] == 0
    assert read_rfa(image).grid.shape == (32, 32)
    flags = ["--family", "affine", "--n-v", "17", "--n-t", "64"]
    code, _, err = run(*SMALL, "radon", *flags, "--in", image, "--out", sino)
    assert code == 0, err
    assert read_rfa(sino).samples.shape == (17, 64)
    assert run("unitarize", "--in", sino, "--out", str(tmp_path / "q.rfa"))[0] == 0
    assert run("export", "--in", sino, "--out", str(tmp_path / "s.pgm"), "--part", "abs")[0] == 0
    assert (tmp_path / "s.pgm").read_bytes().startswith(b"P5\n")


def test_invert_prints_the_report(tmp_path):
    report = tmp_path / "report.json"
    code, out, err = run(
        *SMALL, "--set", "image_size=32", "--set", f"output_report={report}", "invert", "--n-theta", "64"
    )
    assert code == 0, err
    assert out.splitlines()[0] == "quantity,value"
    assert "rel_l2_error" in out
    assert report.exists()


def test_verify(monkeypatch):
    suites = {
        "good": lambda config: [CheckResult("good", "small", 1e-4, 1e-3)],
        "bad": lambda config: [CheckResult("bad", "large", 1.0, 1e-3), CheckResult("bad", "nan", float("nan"), 1.0)],
    }
    monkeypatch.setattr(verification, "SUITES", suites)

    code, out, err = run("verify", "good")
    assert code == 0
    assert out.splitlines() == ["suite,property,measured,budget,passed", "good,small,1.000000e-04,1.000000e-03,True"]

    code, out, err = run("verify")
    assert code == 2
    assert len(out.splitlines()) == 4
    assert err.startswith("[CHKFAIL] 2 of 3 checks failed: large, nan")

    code, _, err = run("verify", "nonsense")
    assert code == 1
    assert err.startswith("[DOMAIN]")


def test_verify_is_deterministic():
    argv = [*SMALL]
    for setting in ("image_size=32", "n_theta=16", "n_t=64", "n_v=9", "n_elements=2", "seed=3"):
        argv += ["--set", setting]
    first = run(*argv, "verify", "intertwining", "admissibility")
    second = run(*argv, "verify", "intertwining", "admissibility")
    assert first[1].startswith("suite,property,measured,budget,passed\n")
    assert len(first[1].splitlines()) == 6
    assert first[1].encode() == second[1].encode()
    assert first[0] == second[0]

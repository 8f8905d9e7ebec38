import json

import pytest

from tamecube.cli import main
from tamecube.suites import SuiteConfig, report_schema_version, run_suite


def test_schema_version(capsys):
    assert main(["schema"]) == 0
    assert capsys.readouterr().out.strip() == report_schema_version() == "1.0.0"


def test_unknown_suite_is_usage_error(capsys):
    assert main(["verify", "--suite", "nope"]) == 2
    assert "unknown suite" in capsys.readouterr().err


def test_bad_arguments_exit_2():
    assert main(["verify"]) == 2
    assert main(["frobnicate"]) == 2


def test_verify_kernels_report(tmp_path):
    out = tmp_path / "report.json"
    rc = main(["verify", "--suite", "kernels", "--seed", "3", "--out", str(out)])
    assert rc == 0
    rep = json.loads(out.read_text())
    assert rep["schema"] == "1.0.0"
    assert rep["passed"] is True
    assert rep["config"]["seed"] == 3
    assert "timestamp" in rep
    names = {r["name"] for r in rep["results"]}
    assert "lambda-symmetry" in names and "smash-F-riemann-oracle" in names


def test_verify_deterministic_reports(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "--suite", "retract", "--seed", "11", "--out", str(a)]) == 0
    assert main(["verify", "--suite", "retract", "--seed", "11", "--out", str(b)]) == 0
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    ra.pop("timestamp")
    rb.pop("timestamp")
    assert json.dumps(ra, sort_keys=True) == json.dumps(rb, sort_keys=True)


def test_verify_write_failure_is_io_error(tmp_path):
    target = tmp_path / "missing-dir" / "r.json"
    rc = main(["verify", "--suite", "kernels", "--out", str(target)])
    assert rc == 3


def test_sample_lambda_csv(tmp_path):
    out = tmp_path / "s.csv"
    rc = main(["sample", "--map", "(lambda (coord 1))", "--grid", "5", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t1,y1"
    assert lines[1] == "0,0"
    assert len(lines) == 6
    assert float(lines[3].split(",")[1]) == pytest.approx(0.5)


def test_sample_from_file_and_row_major_order(tmp_path):
    src = tmp_path / "map.sexp"
    src.write_text("(tuple (coord 1) (coord 2))", encoding="utf-8")
    out = tmp_path / "grid.csv"
    assert main(["sample", "--map", str(src), "--grid", "3", "--out", str(out)]) == 0
    rows = [tuple(float(v) for v in line.split(",")) for line in out.read_text().splitlines()[1:]]
    assert len(rows) == 9
    # last axis varies fastest
    assert [r[1] for r in rows[:3]] == [0.0, 0.5, 1.0]
    assert rows[0][0] == 0.0 and rows[3][0] == 0.5


def test_sample_parse_error_exit_2(tmp_path, capsys):
    rc = main(["sample", "--map", "(lambda (coord", "--grid", "5", "--out", str(tmp_path / "x.csv")])
    assert rc == 2
    assert "missing ')'" in capsys.readouterr().err


def test_sample_dimension_error_exit_2(tmp_path):
    rc = main(
        ["sample", "--map", "(compose gamma (tuple (coord 1) (coord 2)))", "--grid", "3", "--out", str(tmp_path / "x.csv")]
    )
    assert rc == 2


def test_sample_io_error_exit_3(tmp_path):
    rc = main(["sample", "--map", "(coord 1)", "--grid", "3", "--out", str(tmp_path / "no" / "x.csv")])
    assert rc == 3


def test_run_suite_threads_env(monkeypatch, tmp_path):
    monkeypatch.setenv("TAMECUBE_THREADS", "2")
    cfg = SuiteConfig(suite="all", ns=(1, 2), eps_list=(0.25,), grid_res=9, seed=1)
    rep = run_suite(cfg)
    monkeypatch.setenv("TAMECUBE_THREADS", "1")
    rep2 = run_suite(cfg)
    assert rep == rep2


def test_suite_config_validation():
    with pytest.raises(Exception):
        SuiteConfig(suite="kernels", ns=(5,))
    with pytest.raises(Exception):
        SuiteConfig(suite="kernels", grid_res=2)


def test_complex_descriptors():
    from tamecube.cli import parse_complex_descriptor
    from tamecube.cubes import boundary_complex, full_cube, j_complex, skeleton

    assert parse_complex_descriptor("full:2") == full_cube(2)
    assert parse_complex_descriptor("boundary:3") == boundary_complex(3)
    assert parse_complex_descriptor("J:2") == j_complex(2)
    assert parse_complex_descriptor("skeleton:boundary:3:1") == skeleton(boundary_complex(3), 1)
    assert parse_complex_descriptor("skeleton:skeleton:boundary:3:2:1") == skeleton(
        skeleton(boundary_complex(3), 2), 1
    )
    with pytest.raises(ValueError):
        parse_complex_descriptor("torus:2")
    with pytest.raises(ValueError):
        parse_complex_descriptor("skeleton:boundary:3:x")


def test_sample_retraction_csv_containment(tmp_path):
    import numpy as np

    from tamecube.cubes import dist_to_complex, j_complex
    from tamecube.maps import serialize_map
    from tamecube.retract import RetractionParams, approx_retraction

    R = approx_retraction(RetractionParams.from_eps(2, 0.25))
    src = tmp_path / "retraction.sexp"
    src.write_text(serialize_map(R), encoding="utf-8")
    out = tmp_path / "retraction.csv"
    assert main(["sample", "--map", str(src), "--grid", "11", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t1,t2,y1,y2"
    assert len(lines) == 1 + 121
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert dist_to_complex(j_complex(2), data[:, 2:]).max() <= 1e-9


def test_verify_exit_1_on_property_failure(monkeypatch, tmp_path):
    import tamecube.cli as cli_mod

    def failing(cfg):
        return {
            "schema": report_schema_version(),
            "suite": cfg.suite,
            "config": {"seed": cfg.seed},
            "results": [{"name": "synthetic", "params": {}, "worst": 1.0, "tol": 0.5, "passed": False}],
            "failures": 1,
            "passed": False,
        }

    monkeypatch.setattr(cli_mod, "run_suite", failing)
    rc = main(["verify", "--suite", "kernels", "--out", str(tmp_path / "r.json")])
    assert rc == 1

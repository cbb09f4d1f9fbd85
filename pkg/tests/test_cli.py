import csv
import json
import logging
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from abelkernel.abel import abel_limit
from abelkernel.cli import emit_trace, main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
ROW_B = '{"type": "periodic", "pattern": [1], "shape": [1, null]}'
COL_A = '{"type": "periodic", "pattern": [1, -1], "shape": [null, 1]}'
ATOMS3 = '{"type": "atomic", "atoms": [["0", "1/3"], ["1/3", "1/3"], ["2/3", "1/3"]]}'


def read_csv(path_or_text):
    text = Path(path_or_text).read_text() if isinstance(path_or_text, Path) else path_or_text
    return list(csv.DictReader(text.splitlines()))


@pytest.mark.parametrize("name, code", [
    ("szego_lebesgue.json", 0),
    ("rankone_3atoms.json", 0),
    ("rankone_wrong_measure.json", 1),
    ("szego_lebesgue_2x.json", 1),
    ("divergent_powerlaw.json", 2),
])
def test_shipped_configs(name, code, capsys):
    assert main(["verify-measure", "--config", str(CONFIGS / name), "--reproducible"]) == code
    report = json.loads(capsys.readouterr().out)
    assert report["exit_code"] == code
    assert report["status"] == json.loads((CONFIGS / name).read_text())["expect"]
    assert "timestamp" not in report["meta"]


def test_verify_separate_files(tmp_path, capsys):
    (tmp_path / "c.json").write_text('{"type": "identity", "order": 8}')
    (tmp_path / "mu.json").write_text('{"type": "lebesgue"}')
    code = main(["verify-measure", "--matrix", str(tmp_path / "c.json"), "--measure", str(tmp_path / "mu.json"),
                 "--tol", "1e-8", "--resolution", "32", "--seed", "3"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["meta"]["seed"] == 3 and report["meta"]["rng"] == "numpy.random.PCG64"
    assert "timestamp" in report["meta"]


def test_verify_reproducible_bytes(tmp_path):
    args = ["verify-measure", "--config", str(CONFIGS / "rankone_3atoms.json"), "--reproducible", "--quiet"]
    main(args + ["--out", str(tmp_path / "a")])
    main(args + ["--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()


def test_verify_emit_trace(tmp_path):
    code = main(["verify-measure", "--config", str(CONFIGS / "rankone_3atoms.json"), "--quiet",
                 "--out", str(tmp_path), "--emit-trace"])
    assert code == 0
    files = sorted((tmp_path / "traces").glob("*.csv"))
    assert len(files) == 64
    rows = read_csv(files[0])
    assert list(rows[0]) == ["s", "re_g", "im_g", "re_extrapolant", "im_extrapolant", "est_error"]


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 3
    assert main(["verify-measure", "--matrix", '{"type": "identity"}']) == 3
    assert main(["verify-measure", "--matrix", '{"type": "identity", "order": -1}',
                 "--measure", '{"type": "lebesgue"}']) == 3
    assert "/matrix/order" in capsys.readouterr().err
    assert main(["moments", "--measure", "missing.json"]) == 3


def test_moments(capsys):
    assert main(["moments", "--measure", ATOMS3, "--kmax", "6"]) == 0
    rows = read_csv(capsys.readouterr().out)
    assert [int(r["k"]) for r in rows] == list(range(-6, 7))
    for r in rows:
        expected = 1.0 if int(r["k"]) % 3 == 0 else 0.0
        assert abs(complex(float(r["re"]), float(r["im"])) - expected) < 1e-14


def test_bessel(capsys):
    assert main(["bessel", "--measure", '{"type": "atomic", "atoms": [[0, 1]]}', "--orders", "8,16,32"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert np.allclose(rep["lambda_max"], [8, 16, 32]) and rep["verdict"] == "growing"


def test_kernel_eval(capsys):
    assert main(["kernel-eval", "--matrix", '{"type": "identity"}', "--points", "[[0.5, 0], 0]", "--tol", "1e-12"]) == 0
    rows = read_csv(capsys.readouterr().out)
    assert len(rows) == 4
    assert abs(float(rows[0]["re_k"]) - 4 / 3) < 1e-12
    assert float(rows[0]["error_bound"]) <= 1e-12


def test_abel_eval_geometric_example(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("ABEL_KERNEL_MAX_N", "400000")
    code = main(["abel-eval", "--t2", ROW_B, "--t1", COL_A, "--x", "[1]", "--y", "[1]", "--grid", "3,12",
                 "--emit-trace", str(tmp_path)])
    assert code == 0
    res = json.loads(capsys.readouterr().out)
    assert res["converged"] and abs(res["value"][0] - 0.5) < 1e-9
    rows = read_csv(tmp_path / "abel.csv")
    s = np.array([1 - 2.0**-k for k in range(3, 13)])
    assert np.allclose([float(r["s"]) for r in rows], s)
    assert np.allclose([float(r["re_g"]) for r in rows], 1 / (1 + s), atol=1e-10)


def test_abel_eval_with_measure(capsys):
    code = main(["abel-eval", "--measure", ATOMS3, "--t2", '{"type": "synthesis", "conjugated": true}',
                 "--t1", '{"type": "identity", "order": 3}', "--x", "[1, 0, 0]",
                 "--y", '{"type": "constant", "value": 1}'])
    assert code == 0
    assert abs(json.loads(capsys.readouterr().out)["value"][0] - 1) < 1e-12


def test_boundary(capsys):
    assert main(["boundary", "--matrix", '{"type": "identity"}', "--measure", '{"type": "lebesgue"}',
                 "--resolution", "16", "--w", "0.5,0"]) == 0
    rows = read_csv(capsys.readouterr().out)
    x = np.array([float(r["x"]) for r in rows])
    vals = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    assert np.allclose(vals, 1 / (1 - 0.5 * np.exp(2j * np.pi * x)), atol=1e-10)


def test_boundary_divergent_exits_2(capsys):
    code = main(["boundary", "--matrix", '{"type": "rank_one", "power_law": 0.55}',
                 "--measure", '{"type": "atomic", "atoms": [[0, 1]]}', "--w", "0.5,0"])
    assert code == 2


def test_emit_trace_empty(tmp_path, caplog):
    with caplog.at_level(logging.WARNING, logger="abelkernel"):
        assert emit_trace({}, tmp_path / "t") == []
    assert not (tmp_path / "t").exists()
    assert "no traces" in caplog.text


def test_emit_trace_converged_column(tmp_path):
    s = np.array([1 - 2.0**-k for k in range(3, 13)])
    res = abel_limit(list(zip(s, 1 / (1 + s))))
    (path,) = emit_trace({"ex": res}, tmp_path)
    rows = read_csv(path)
    last = [complex(float(r["re_extrapolant"]), float(r["im_extrapolant"])) for r in rows[-2:]]
    assert abs(last[1] - last[0]) <= res.est_error
    assert rows[0]["est_error"] == ""


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "abelkernel", "verify-measure", "--config",
                          str(CONFIGS / "szego_lebesgue_2x.json"), "--quiet"], capture_output=True)
    assert out.returncode == 1


def test_numerical_failures_are_reported(capsys, monkeypatch):
    assert main(["kernel-eval", "--matrix", '{"type": "identity"}', "--points", "[0.999999]", "--tol", "1e-15"]) == 0
    rows = read_csv(capsys.readouterr().out)
    assert rows[0]["re_k"] == "nan" and rows[0]["error_bound"] == "inf"
    monkeypatch.setenv("ABEL_KERNEL_MAX_N", "50")
    assert main(["abel-eval", "--t2", ROW_B, "--t1", COL_A, "--x", "[1]", "--y", "[1]"]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "error"


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
def test_config_round_trip(path, capsys):
    from abelkernel.config import RunConfig

    cfg = RunConfig.load(path)
    again = RunConfig.from_json(json.loads(json.dumps(cfg.to_json())))
    assert again.doc == cfg.doc and again.digest() == cfg.digest()
    main(["verify-measure", "--config", str(path), "--reproducible"])
    report = json.loads(capsys.readouterr().out)
    assert RunConfig.from_json(report["config"]).digest() == cfg.digest()
    assert report["meta"]["config_sha256"] == cfg.digest()

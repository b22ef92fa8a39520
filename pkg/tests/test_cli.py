import json

from click.testing import CliRunner

import shaptour as st
from shaptour.cli import main




def test_precompute_writes_bundle(tmp_path):
    out = tmp_path / "bundle.json"
    runner = CliRunner()
    result = runner.invoke(main, [
        "precompute", "--data", str(st.penguins_path()), "--response", "species",
        "--trees", "10", "--seed", "3", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    bundle = st.load_bundle(out)
    assert bundle.n == 333 and bundle.hyper.n_trees == 10
    # progress and stage timings go to standard error
    assert "train:" in result.output and "ms" in result.output


def test_precompute_validation_error_exit_2(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,y\r\n1,,0\r\n" + "".join(f"{i},{i},1\r\n" for i in range(11)))
    result = CliRunner().invoke(main, [
        "precompute", "--data", str(bad), "--response", "y",
        "--out", str(tmp_path / "o.json"),
    ])
    assert result.exit_code == 2
    assert "validation error" in result.output


def test_precompute_missing_file_exit_2(tmp_path):
    result = CliRunner().invoke(main, [
        "precompute", "--data", str(tmp_path / "absent.csv"), "--response", "y",
        "--out", str(tmp_path / "o.json"),
    ])
    assert result.exit_code == 2


def test_serve_rejects_bad_bundle(tmp_path):
    bad = tmp_path / "bundle.json"
    bad.write_text("{not json")
    result = CliRunner().invoke(main, ["serve", "--bundle", str(bad), "--port", "0"])
    assert result.exit_code == 2
    assert "bundle error" in result.output


def test_precompute_task_override(tmp_path):
    csv = tmp_path / "numeric.csv"
    rows = ["a,b,y"] + [f"{i},{(i * 7) % 5},{i % 3}" for i in range(1, 31)]
    csv.write_text("\r\n".join(rows) + "\r\n")
    out = tmp_path / "reg.json"
    result = CliRunner().invoke(main, [
        "precompute", "--data", str(csv), "--response", "y",
        "--task", "regression", "--trees", "8", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    payload = json.loads(out.read_text())
    assert payload["task"] == "regression"

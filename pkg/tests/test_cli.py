from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from thetaforge.cli import main


def _run(*args, env=None):
    return CliRunner().invoke(main, list(args), env=env)


def test_scatter_pentagon_json():
    res = _run("scatter", "--init", "pentagon", "-k", "6")
    assert res.exit_code == 0, res.output
    data = json.loads(res.output)
    assert data["consistent"] is True
    supports = sorted(w["support"] for w in data["walls"])
    assert supports == ["line", "line", "ray"]
    (ray,) = [w for w in data["walls"] if w["support"] == "ray"]
    assert ray["direction"] == [1, 1]
    assert ray["ee_factors"] == [[1, {"denom": 1, "terms": [[0, 1]]}]]


def test_output_is_deterministic():
    args = ("scatter", "--init", "kronecker2", "-k", "5")
    assert _run(*args).output == _run(*args).output
    args = ("product", "--init", "pentagon", "--p1", "1,0", "--p2", "0,1", "-k", "4")
    assert _run(*args).output == _run(*args).output


def test_scatter_svg(tmp_path):
    out = tmp_path / "dense.svg"
    res = _run("scatter", "--init", "dense_example", "-k", "5", "--format", "svg", "--out", str(out))
    assert res.exit_code == 0, res.output
    text = out.read_text()
    assert text.startswith("<svg")
    assert text.count("<line") >= 7


def test_order_cap():
    res = _run("scatter", "--init", "pentagon", "-k", "13")
    assert res.exit_code == 2
    assert "THETAFORGE_ORDER_CAP" in res.output
    res = _run("scatter", "--init", "pentagon", "-k", "3", env={"THETAFORGE_ORDER_CAP": "2"})
    assert res.exit_code == 2
    assert _run("scatter", "--init", "pentagon", "-k", "0").exit_code == 2


def test_theta_of_zero_prints_one():
    res = _run("theta", "--init", "pentagon", "--p", "0,0", "--format", "text")
    assert res.exit_code == 0, res.output
    assert res.output.strip() == "1"


def test_theta_at_a_wall_is_rejected():
    res = _run("theta", "--init", "pentagon", "--p", "1,0", "--Q", "1,0", "--format", "text")
    assert res.exit_code == 1
    assert "non-generic" in res.output


def test_product_leading_coefficient():
    res = _run("product", "--init", "pentagon", "--p1", "1,0", "--p2", "0,1", "-k", "4")
    assert res.exit_code == 0, res.output
    alpha = {tuple(a["p"]): a["coeff"] for a in json.loads(res.output)["alpha"]}
    assert alpha[(1, 1)] == "1*t^1"


def test_mutate_reports_the_chamber():
    res = _run("mutate", "--seed", "a2_seed", "--jseq", "1")
    assert res.exit_code == 0, res.output
    data = json.loads(res.output)
    assert data["seed"]["basis"] == [[-1, 0], [0, 1]]
    assert data["chamber"] == [[-1, 0], [0, 1]]
    assert _run("mutate", "--seed", "a2_seed", "--jseq", "0").exit_code == 2


def test_dt_csv():
    res = _run("dt", "--init", "kronecker2", "-k", "6", "--format", "csv")
    assert res.exit_code == 0, res.output
    lines = res.output.splitlines()
    assert lines[0].startswith("a,b,chi,omega")
    assert any(line.startswith("1,1,0,1*t^-1 + 1*t^1") for line in lines)


def test_export_lists_and_reads_fixtures(tmp_path):
    res = _run("export")
    names = json.loads(res.output)["fixtures"]
    assert {"pentagon", "kronecker2", "dense_example", "a2_seed"} <= set(names)
    out = tmp_path / "k2.json"
    assert _run("export", "kronecker2", "--out", str(out)).exit_code == 0
    assert json.loads(out.read_text())["omega"] == [[0, 2], [-2, 0]]


def test_needs_exactly_one_source():
    assert _run("scatter").exit_code == 2
    assert _run("scatter", "--init", "pentagon", "--seed", "a2_seed").exit_code == 2


@pytest.mark.parametrize("args", [("--seed", "a2_seed"), ("--seed", "kronecker2_seed"), ("--init", "dense_example")])
def test_check_passes(args):
    res = _run("check", *args, "-k", "5", "--samples", "2", "--format", "json")
    assert res.exit_code == 0, res.output
    results = json.loads(res.output)["results"]
    assert results
    assert all(r["status"] in ("pass", "skip") for r in results)

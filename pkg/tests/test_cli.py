from __future__ import annotations

import json

import pytest

from altroute.cli import main
from altroute.io import generate_grid, write_dimacs


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture
def grid_files(tmp_path):
    rc = run(["generate", "grid", "--width", 6, "--height", 6, "--seed", 3, "--perturb", 3, "--out", tmp_path / "g.gr"])
    assert rc == 0
    return tmp_path / "g.gr", tmp_path / "g.co"


def _chain_gr(tmp_path):
    p = tmp_path / "chain.gr"
    p.write_text("p sp 4 3\na 1 2 5\na 2 3 5\na 3 4 5\n", encoding="utf-8")
    return p


def test_generate_writes_gr_and_co(grid_files):
    gr, co = grid_files
    assert gr.exists() and co.exists()
    assert gr.read_text().startswith("p sp 36 ")


def test_compute_plateau_on_single_route_graph(tmp_path):
    gr = _chain_gr(tmp_path)
    out = tmp_path / "ag.json"
    rc = run([
        "compute", "--graph", gr, "--source", 0, "--target", 3,
        "--method", "plateau", "--out", out,
    ])
    assert rc == 0
    data = json.loads(out.read_text())
    assert data["metrics"]["decision_edges"] == 0
    assert data["method"] == "plateau"


def test_compute_all_methods_and_formats(tmp_path, grid_files):
    gr, co = grid_files
    for method in ("penalty", "plateau", "disjoint", "yen", "pareto"):
        out = tmp_path / f"{method}.json"
        rc = run([
            "compute", "--graph", gr, "--coords", co, "--source", 0, "--target", 35,
            "--method", method, "--out", out,
        ])
        assert rc == 0, method
        data = json.loads(out.read_text())
        assert data["metrics"]["total_distance"]["value"] >= 1.0
    rc = run([
        "compute", "--graph", gr, "--coords", co, "--source", 0, "--target", 35,
        "--method", "plateau", "--out", tmp_path / "ag.geojson", "--format", "geojson",
    ])
    assert rc == 0
    geo = json.loads((tmp_path / "ag.geojson").read_text())
    assert geo["type"] == "FeatureCollection"
    rc = run([
        "compute", "--graph", gr, "--source", 0, "--target", 35,
        "--method", "plateau", "--out", tmp_path / "ag.dot", "--format", "dot",
    ])
    assert rc == 0
    assert (tmp_path / "ag.dot").read_text().startswith("digraph")


def test_metrics_round_trip_and_corruption(tmp_path):
    gr = _chain_gr(tmp_path)
    out = tmp_path / "ag.json"
    assert run([
        "compute", "--graph", gr, "--source", 0, "--target", 3,
        "--method", "disjoint", "--out", out,
    ]) == 0
    assert run(["metrics", "--ag", out]) == 0

    data = json.loads(out.read_text())
    data["edges"][0]["weight"] += 2
    corrupted = tmp_path / "bad.json"
    corrupted.write_text(json.dumps(data), encoding="utf-8")
    assert run(["metrics", "--ag", corrupted]) == 1


def test_metrics_rejects_unknown_fields(tmp_path):
    gr = _chain_gr(tmp_path)
    out = tmp_path / "ag.json"
    run([
        "compute", "--graph", gr, "--source", 0, "--target", 3,
        "--method", "yen", "--out", out,
    ])
    data = json.loads(out.read_text())
    data["oops"] = True
    bad = tmp_path / "extra.json"
    bad.write_text(json.dumps(data), encoding="utf-8")
    assert run(["metrics", "--ag", bad]) == 1


def test_compare_all_methods(tmp_path, grid_files):
    gr, co = grid_files
    out = tmp_path / "report.json"
    rc = run([
        "compare", "--graph", gr, "--source", 0, "--target", 35,
        "--methods", "penalty,plateau,disjoint,yen,pareto", "--out", out,
    ])
    assert rc == 0
    report = json.loads(out.read_text())
    assert set(report["methods"]) == {"penalty", "plateau", "disjoint", "yen", "pareto"}
    for entry in report["methods"].values():
        assert entry["metrics"]["total_distance"]["value"] >= 1.0


def test_compare_is_deterministic(tmp_path, grid_files):
    gr, co = grid_files
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert run([
            "compare", "--graph", gr, "--source", 0, "--target", 35,
            "--methods", "plateau,penalty", "--out", out,
        ]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_no_route_exit_code(tmp_path):
    one_way = tmp_path / "oneway.gr"
    one_way.write_text("p sp 2 1\na 1 2 5\n", encoding="utf-8")
    rc = run([
        "compute", "--graph", one_way, "--source", 1, "--target", 0,
        "--method", "plateau", "--out", tmp_path / "x.json",
    ])
    assert rc == 3


def test_data_error_exit_code(tmp_path):
    broken = tmp_path / "broken.gr"
    broken.write_text("p sp 2 2\na 1 2 5\n", encoding="utf-8")
    rc = run([
        "compute", "--graph", broken, "--source", 0, "--target", 1,
        "--method", "plateau", "--out", tmp_path / "x.json",
    ])
    assert rc == 1


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        run(["compute", "--graph"])
    assert err.value.code == 2

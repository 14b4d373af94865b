import csv
import json
import math
import os
import pathlib

import jsonschema
import pytest

import percolab

ROOT = pathlib.Path(os.environ.get("PERCOLAB_ROOT", pathlib.Path(__file__).resolve().parents[2]))
SCHEMA = json.loads((ROOT / "schema" / "experiment.schema.v1.json").read_text())


def test_window_counts():
    w = percolab.Window.hypercubic(2, 3)
    assert (w.num_vertices, w.num_edges) == (9, 12)
    assert len(w.boundary()) == 8
    t = percolab.Window.regular_tree(3, 2)
    assert (t.num_vertices, t.num_edges) == (10, 9)


def test_edge_labels_are_addressable():
    a = percolab.edge_label(1, 2, 3)
    assert a == percolab.edge_label(1, 2, 3)
    assert 0.0 <= a < 1.0
    assert a != percolab.edge_label(1, 2, 4)


def test_disconnection_extremes_and_exact_oracle():
    w = percolab.Window.hypercubic(2, 9)
    lo, hi = percolab.est_disconnect_prob(w, [w.center], [0.0, 1.0], samples=100)
    assert lo.estimate == 1.0 and hi.estimate == 0.0

    corner = percolab.Window.hypercubic(2, 2).with_boundary([3])
    p = 0.4
    exact = percolab.exact_disconnect_prob(corner, [0], p)
    assert exact == pytest.approx((1 - p * p) ** 2)
    mc = percolab.est_disconnect_prob(corner, [0], [p], samples=20000, seed=5)[0]
    assert mc.ci_low <= exact <= mc.ci_high


def test_bounds():
    assert percolab.azuma_bound(0.5, 8, 2) == pytest.approx(2 * math.exp(-1))
    assert percolab.markov_lower_bound(10, 10, 0.5) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        percolab.markov_lower_bound(1, 10, 1.5)


def test_capacity_matches_exact_solve():
    w = percolab.Window.hypercubic(2, 9)
    exact = percolab.exact_capacity(w, [w.center])
    mc = percolab.est_capacity(w, [w.center], walkers=20000, seed=2)
    assert mc.ci_low <= exact <= mc.ci_high


def test_worker_count_does_not_change_results():
    w = percolab.Window.hypercubic(2, 21)
    s = w.ball(w.center, 1)
    a = percolab.est_disconnect_prob(w, s, [0.55], samples=3000, workers=1)[0]
    b = percolab.est_disconnect_prob(w, s, [0.55], samples=3000, workers=3)[0]
    assert (a.estimate, a.ci_low, a.ci_high) == (b.estimate, b.ci_low, b.ci_high)


@pytest.mark.parametrize("path", sorted((ROOT / "configs").glob("*.json")), ids=lambda p: p.name)
def test_shipped_configs_match_schema(path):
    jsonschema.validate(json.loads(path.read_text()), SCHEMA)


def test_schema_rejects_empty_estimands():
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(
            {"schema_version": 1, "window": {"family": "hypercubic", "dim": 2, "side": 5}, "estimands": []}, SCHEMA
        )


def test_run_estimate_and_report(tmp_path):
    out = tmp_path / "run"
    code, _, err = percolab.run("estimate", str(ROOT / "configs" / "smoke.json"), out=str(out))
    assert code == 0, err
    rows = list(csv.DictReader((out / "results.csv").open()))
    assert rows and all(float(r["ci_low"]) <= float(r["estimate"]) <= float(r["ci_high"]) for r in rows if r["estimate"])
    manifest = json.loads((out / "manifest.json").read_text())
    assert "results.csv" in manifest["outputs"]
    code, _, err = percolab.run("report", out=str(out))
    assert code == 0, err
    assert (out / "plot.csv").exists()


def test_run_rejects_bad_config(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"schema_version": 1, "window": {"family": "hypercubic", "dim": 2, "side": 5},
                               "estimands": []}))
    code, _, err = percolab.run("estimate", str(cfg), out=str(tmp_path / "out"))
    assert code == 1
    assert "no estimands" in err

import json

import numpy as np
import pytest

from hopergm import Graph, save_edgelist
from hopergm.cli import main

from conftest import random_graph


@pytest.fixture()
def edges_file(tmp_path):
    g = random_graph(8, density=0.4, seed=3)
    p = tmp_path / "g.edges"
    save_edgelist(g, p)
    return p


def test_fit_writes_json(tmp_path, edges_file, capsys):
    out = tmp_path / "out"
    rc = main(["fit", str(edges_file), "--n", "8", "--model", "edges",
               "--out", str(out)])
    assert rc == 0
    payload = json.loads((out / "fit.json").read_text())
    assert "edges" in payload["fit"]["coefficients"]
    assert payload["run_config"]["seed"] == 0
    text = capsys.readouterr().out
    assert "AIC" in text and "edges" in text


def test_fit_usage_errors(edges_file, capsys):
    assert main(["fit", str(edges_file), "--model", "edges"]) == 1  # no --n
    assert main(["fit", str(edges_file), "--n", "8",
                 "--model", "[{bad json"]) == 1


def test_fit_estimation_failure_exit_code(tmp_path, capsys):
    save_edgelist(Graph(5), tmp_path / "empty.edges")
    rc = main(["fit", str(tmp_path / "empty.edges"), "--n", "5",
               "--model", "edges"])
    assert rc == 3


def test_simulate_outputs(tmp_path, edges_file):
    out = tmp_path / "sims"
    rc = main(["simulate", str(edges_file), "--n", "8", "--model", "edges",
               "--theta", "[-0.5]", "--draws", "4", "--out", str(out),
               "--seed", "2"])
    assert rc == 0
    assert sorted(p.name for p in out.glob("draw_*.edges")) == [
        f"draw_{b:05d}.edges" for b in range(4)]
    stats = json.loads((out / "stats.json").read_text())
    assert stats["stat_names"] == ["edges"]
    assert np.array(stats["stats"]).shape == (4, 1)
    # same seed, same draws
    out2 = tmp_path / "sims2"
    main(["simulate", str(edges_file), "--n", "8", "--model", "edges",
          "--theta", "[-0.5]", "--draws", "4", "--out", str(out2),
          "--seed", "2"])
    assert (out / "draw_00003.edges").read_text() == \
        (out2 / "draw_00003.edges").read_text()


def test_simulate_requires_theta_or_fit(edges_file):
    assert main(["simulate", str(edges_file), "--n", "8",
                 "--model", "edges", "--draws", "2"]) == 1


def test_simulate_conditional_empty_free_is_usage_error(tmp_path, edges_file):
    free = tmp_path / "free.txt"
    free.write_text("")
    rc = main(["simulate", str(edges_file), "--n", "8", "--model", "edges",
               "--theta", "[0.0]", "--draws", "2", "--free", str(free)])
    assert rc == 1


def test_partition_json(tmp_path, edges_file, capsys):
    rc = main(["partition", str(edges_file), "--n", "8",
               "--strategy", "lmo", "--folds", "3", "--seed", "1"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["strategy"] == "lmo"
    assert payload["M"] == 3
    assert sum(len(f) for f in payload["folds"]) == 28


def test_hope_outputs(tmp_path, edges_file):
    out = tmp_path / "hope"
    rc = main(["hope", str(edges_file), "--n", "8", "--model", "edges",
               "--strategy", "lmo", "--folds", "3", "--draws", "20",
               "--seed", "4", "--out", str(out)])
    assert rc == 0
    lines = (out / "metrics.csv").read_text().splitlines()
    assert lines[0] == "schema_version,1"
    assert lines[1].startswith("model,strategy,")
    assert len(lines) == 3
    report = json.loads((out / "report.json").read_text())
    assert report["run_config"]["draws"] == 20
    assert "lmo" in report["reports"]
    long_lines = (out / "fold_metrics.csv").read_text().splitlines()
    assert long_lines[0] == "model,fold,strategy,metric,value"
    assert len(long_lines) > 3


def test_verify_dataset_missing_data_exit_code(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("HOPERGM_DATA", str(tmp_path / "nowhere"))
    assert main(["verify-dataset", "lazega"]) == 2
    assert "DATA.md" in capsys.readouterr().err
    assert main(["verify-dataset", "unknown-net"]) == 1


def test_config_file_mirrors_flags(tmp_path, edges_file, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"strategy_one": "node", "seed": 11}))
    rc = main(["partition", str(edges_file), "--n", "8",
               "--config", str(cfg)])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["strategy"] == "node"
    assert payload["run_config"]["seed"] == 11
    # explicit flags beat the config file
    rc = main(["partition", str(edges_file), "--n", "8", "--seed", "3",
               "--config", str(cfg)])
    payload = json.loads(capsys.readouterr().out)
    assert payload["run_config"]["seed"] == 3

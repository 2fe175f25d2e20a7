"""End-to-end command-line flows on small configs."""

import json
import os
import xml.etree.ElementTree as ET

import pytest

from sidrl.cli import main

SMALL_INI = """
[run]
env = chain:6
agent = sid
budget = 900
actors = 2
learner_steps_per_episode = 2

[intrinsic]
kind = sfc
"""


@pytest.fixture()
def config_path(tmp_path):
    p = tmp_path / "run.ini"
    p.write_text(SMALL_INI)
    return str(p)


def test_run_then_eval(tmp_path, config_path, capsys):
    out = str(tmp_path / "run0")
    assert main(["run", "--config", config_path, "--seed", "5", "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "metrics.csv"))
    assert os.path.exists(os.path.join(out, "manifest.json"))
    capsys.readouterr()

    ckpt = os.path.join(out, "checkpoint.npz")
    assert main(["eval", "--checkpoint", ckpt, "--episodes", "3"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["episodes"] == 3
    assert 0.0 <= summary["success_rate"] <= 1.0


def test_heatmap_csv_and_pgm(tmp_path, config_path, capsys):
    out = str(tmp_path / "run1")
    assert main(["run", "--config", config_path, "--out", out]) == 0
    ckpt = os.path.join(out, "checkpoint.npz")

    csv_out = str(tmp_path / "field.csv")
    assert main(["heatmap", "--checkpoint", ckpt, "--kind", "sd",
                 "--anchor", "0,0", "--out", csv_out]) == 0
    lines = open(csv_out).read().splitlines()
    assert lines[0] == "x,y,value"
    assert len(lines) == 7

    pgm_out = str(tmp_path / "field.pgm")
    assert main(["heatmap", "--checkpoint", ckpt, "--kind", "sfc",
                 "--out", pgm_out]) == 0
    assert open(pgm_out).read().startswith("P2 6 1 255")


def test_heatmap_rejects_wall_anchor(tmp_path, config_path, capsys):
    out = str(tmp_path / "run2")
    main(["run", "--config", config_path, "--out", out])
    code = main(["heatmap", "--checkpoint", os.path.join(out, "checkpoint.npz"),
                 "--kind", "sd", "--anchor", "99,99",
                 "--out", str(tmp_path / "x.csv")])
    assert code == 2
    assert "anchor" in capsys.readouterr().err


def test_sweep_and_report(tmp_path, config_path, capsys):
    sweep_out = str(tmp_path / "sweep")
    assert main(["sweep", "--config", config_path, "--seeds", "0,1,2",
                 "--out", sweep_out]) == 0
    for seed in (0, 1, 2):
        assert os.path.exists(os.path.join(sweep_out, f"seed{seed}", "metrics.csv"))
    manifest = json.loads(open(os.path.join(sweep_out, "manifest.json")).read())
    assert manifest["seeds"] == [0, 1, 2]

    report_out = str(tmp_path / "report")
    runs = [os.path.join(sweep_out, f"seed{s}") for s in (0, 1, 2)]
    assert main(["report", "--runs", *runs, "--bucket", "200",
                 "--out", report_out]) == 0
    curves = os.path.join(report_out, "curves.csv")
    assert os.path.exists(curves)
    header = open(curves).read().splitlines()
    assert header[0].startswith("# population std")
    ET.parse(os.path.join(report_out, "curves.svg"))


def test_error_paths_return_nonzero(tmp_path, capsys):
    bad_cfg = tmp_path / "bad.ini"
    bad_cfg.write_text("[run]\nagent = m\n[intrinsic]\nkind = sfc\n")
    assert main(["run", "--config", str(bad_cfg)]) == 2
    assert "error:" in capsys.readouterr().err

    assert main(["report", "--runs", str(tmp_path / "nowhere"),
                 "--bucket", "100", "--out", str(tmp_path / "r")]) == 2

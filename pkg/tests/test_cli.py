import json
import subprocess
import sys

import pytest

from vecbal import __version__
from vecbal.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, ExperimentConfig, UsageError, main

SMALL = {
    "simulate": ["T=40", "replicates=6", "transcripts=true"],
    "lowerbound": ["T_grid=16,32,64,128", "replicates=20", "signers=greedy"],
    "tree-balance": ["edges=30"],
    "search-distribution": ["path=1,1", "n_clones=2"],
    "verify": ["mgf_samples=2000", "tail_trials=2000", "tail_N=4,16", "body_trials=200", "body_N=1,4",
               "rosenthal_N=1,2,3", "rosenthal_p=2,4"],
    "orient": ["vertices=8", "T_grid=20,200", "replicates=4"],
}


def _snapshot(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def _run(tmp_path, name, sub, extra=(), seed="11"):
    out = tmp_path / name
    code = main([sub, "--out", str(out), "--seed", seed, *SMALL[sub], *extra])
    return code, out


@pytest.mark.parametrize("sub", sorted(SMALL))
def test_rerun_is_byte_identical(tmp_path, sub):
    c1, a = _run(tmp_path, "a", sub)
    c2, b = _run(tmp_path, "b", sub)
    assert c1 == c2
    snap = _snapshot(a)
    assert snap and snap == _snapshot(b)


@pytest.mark.parametrize("sub", sorted(SMALL))
def test_outputs_carry_config_and_version(tmp_path, sub):
    _, out = _run(tmp_path, "a", sub)
    for name, data in _snapshot(out).items():
        text = data.decode()
        if name.endswith(".json"):
            doc = json.loads(text)
            assert doc["version"] == __version__ and doc["config"]["seed"] == 11
        else:
            assert text.startswith(f"# vecbal {__version__}\n# subcommand={sub}\n# seed=11\n")


def test_worker_count_does_not_change_outputs(tmp_path):
    _, a = _run(tmp_path, "a", "simulate")
    _, b = _run(tmp_path, "b", "simulate", ["--jobs", "2"])
    assert _snapshot(a) == _snapshot(b)


def test_different_seed_changes_outputs(tmp_path):
    _, a = _run(tmp_path, "a", "simulate")
    _, b = _run(tmp_path, "b", "simulate", seed="12")
    assert _snapshot(a)["discrepancy.csv"] != _snapshot(b)["discrepancy.csv"]


def test_unknown_key_is_a_usage_error(tmp_path, capsys):
    assert main(["simulate", "--out", str(tmp_path), "replicats=3"]) == EXIT_USAGE
    assert "unknown key 'replicats'" in capsys.readouterr().err
    assert not any(tmp_path.iterdir())
    assert main(["simulate", "--out", str(tmp_path), "nonsense"]) == EXIT_USAGE
    assert main(["simulate", "--out", str(tmp_path), "--seed", "-1"]) == EXIT_USAGE
    assert main(["simulate", "--out", str(tmp_path), "--jobs", "0"]) == EXIT_USAGE
    assert main(["frobnicate"]) == EXIT_USAGE


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# small run\nT = 30\nreplicates=3\nseed=5\n")
    out = tmp_path / "o"
    assert main(["simulate", "--config", str(cfg), "--out", str(out), "T=25"]) == EXIT_OK
    doc = json.loads((out / "summary.json").read_text())
    assert doc["config"]["T"] == "25" and doc["config"]["replicates"] == "3"
    assert doc["config"]["seed"] == 5
    assert main(["simulate", "--config", str(cfg), "--seed", "9", "--out", str(out)]) == EXIT_OK
    assert json.loads((out / "summary.json").read_text())["config"]["seed"] == 9


def test_seed_recorded_per_replicate(tmp_path):
    _, out = _run(tmp_path, "a", "simulate")
    rows = [l for l in (out / "discrepancy.csv").read_text().splitlines() if not l.startswith("#")]
    assert rows[1].split(",")[1] == "11:0" and len(rows) == 7
    assert len(list((out / "transcripts").iterdir())) == 6


def test_uncertifiable_search_exits_two(tmp_path, capsys):
    out = tmp_path / "s"
    assert main(["search-distribution", "--out", str(out), "path=1,1", "n_clones=2", "threshold=1.0"]) == EXIT_FAILED
    assert (out / "best_found.csv").exists() and not (out / "certificate.csv").exists()
    assert "certified: no" in capsys.readouterr().out


def test_tree_balance_reports_claims(tmp_path, capsys):
    out = tmp_path / "t"
    assert main(["tree-balance", "--out", str(out), "edges=100"]) == EXIT_OK
    assert "claim1: pass, claim2: pass" in capsys.readouterr().out
    assert json.loads((out / "report.json").read_text())["claim1"] == "pass"
    # the written tree is accepted back as input
    again = tmp_path / "t2"
    assert main(["tree-balance", "--out", str(again), f"tree={out / 'tree.txt'}"]) == EXIT_OK


def test_sizing_error_is_a_usage_error(tmp_path, capsys):
    code = main(["search-distribution", "--out", str(tmp_path), "path=1,1,1,1,1", "n_clones=5", "cap=1024"])
    assert code == EXIT_USAGE
    assert "sizing" in capsys.readouterr().err


def test_config_build_rejects_bad_values():
    with pytest.raises(UsageError):
        ExperimentConfig.build("simulate", [("T", "many")])
    with pytest.raises(UsageError):
        ExperimentConfig.build("simulate", [("seed", str(2**64))])
    cfg = ExperimentConfig.build("orient", [("T_grid", "10,100")], seed=3)
    assert cfg.params["T_grid"] == [10, 100] and cfg.master_seed == 3


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "vecbal.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout

import json
import sys
from pathlib import Path

import pytest

from hedge_kit.cli import (EXIT_BACKEND, EXIT_OK, EXIT_USAGE, load_dataset,
                           main)

MODEL = {
    "classes": ["neg", "pos"],
    "unigrams": {"not": -0.5, "bad": -2.0, "good": 1.0, "a": 0.0, "movie": 0.0},
    "bigrams": [["not", "bad", 1.5]],
}

EXAMPLES = [
    {"id": "e1", "tokens": ["a", "not", "bad", "movie"], "label": 1},
    {"id": "e2", "tokens": ["good", "movie"], "label": 1},
    {"id": "e3", "tokens": ["bad"], "label": 0},
]


@pytest.fixture
def model_path(tmp_path):
    p = tmp_path / "model.json"
    p.write_text(json.dumps(MODEL))
    return str(p)


@pytest.fixture
def dataset(tmp_path):
    p = tmp_path / "data.jsonl"
    p.write_text("\n".join(json.dumps(e) for e in EXAMPLES) + "\n")
    return str(p)


def read_tree(out: Path) -> dict:
    return {f.name: f.read_bytes() for f in sorted(out.iterdir())
            if f.name != "timing.json"}


class TestExplainCommand:
    def test_writes_one_json_per_example_plus_manifest(self, tmp_path,
                                                       model_path, dataset):
        out = tmp_path / "out"
        rc = main(["explain", dataset, "--predictor", f"builtin:{model_path}",
                   "--out", str(out)])
        assert rc == EXIT_OK
        names = {f.name for f in out.iterdir()}
        assert {"e1.json", "e2.json", "e3.json", "manifest.json"} <= names
        manifest = json.loads((out / "manifest.json").read_text())
        assert len(manifest["examples"]) == 3
        assert all(e["evaluations"] > 0 for e in manifest["examples"])
        assert manifest["dataset_sha256"]
        assert manifest["config"]["m"] == 2

    def test_render_flag_emits_html(self, tmp_path, model_path, dataset):
        out = tmp_path / "out"
        rc = main(["explain", dataset, "--predictor", f"builtin:{model_path}",
                   "--render", "html", "--out", str(out)])
        assert rc == EXIT_OK
        assert (out / "e1.html").exists()

    def test_bottom_up_variant_routing(self, tmp_path, model_path, dataset):
        out = tmp_path / "out"
        rc = main(["explain", dataset, "--predictor", f"builtin:{model_path}",
                   "--variant", "bottom-up", "--out", str(out)])
        assert rc == EXIT_OK
        doc = json.loads((out / "e1.json").read_text())
        assert doc["variant"] == "bottom-up"

    def test_rerun_byte_identical(self, tmp_path, model_path, dataset):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["explain", dataset, "--predictor",
                         f"builtin:{model_path}", "--render", "html",
                         "--out", str(out)]) == EXIT_OK
        assert read_tree(a) == read_tree(b)

    def test_unreadable_dataset_exit_2(self, tmp_path, model_path, capsys):
        rc = main(["explain", str(tmp_path / "missing.jsonl"),
                   "--predictor", f"builtin:{model_path}"])
        assert rc == EXIT_USAGE

    def test_bad_line_reports_line_number(self, tmp_path, model_path, capsys):
        p = tmp_path / "bad.jsonl"
        p.write_text('{"id": "x", "tokens": ["a"]}\n{oops\n')
        rc = main(["explain", str(p), "--predictor", f"builtin:{model_path}",
                   "--out", str(tmp_path / "out")])
        assert rc == EXIT_USAGE
        assert ":2:" in capsys.readouterr().err

    def test_handshake_failure_exit_3(self, tmp_path, dataset):
        dead = tmp_path / "dead.py"
        dead.write_text('import json; print(json.dumps({"fatal": "boom"}))')
        rc = main(["explain", dataset, "--predictor",
                   f"subprocess:{sys.executable} {dead}",
                   "--out", str(tmp_path / "out")])
        assert rc == EXIT_BACKEND


class TestEvaluateCommand:
    def test_report_shape(self, tmp_path, model_path, dataset, capsys):
        out = tmp_path / "out"
        rc = main(["evaluate", dataset, "--methods", "hedge", "random",
                   "--predictor", f"builtin:{model_path}", "--q", "10",
                   "--samples", "10", "--out", str(out)])
        assert rc == EXIT_OK
        report = json.loads((out / "evalrun.json").read_text())
        assert set(report["results"]) == {"hedge", "random"}
        assert "cohesion@10" in report["results"]["hedge"]
        assert "cohesion@10" not in report["results"]["random"]
        table = (out / "report.txt").read_text()
        assert "aopc@20" in table and "log_odds@20" in table

    def test_k_sweep(self, tmp_path, model_path, dataset):
        out = tmp_path / "out"
        rc = main(["evaluate", dataset, "--methods", "random",
                   "--predictor", f"builtin:{model_path}",
                   "--k", "10", "--k", "20", "--k", "30",
                   "--q", "5", "--samples", "5", "--out", str(out)])
        assert rc == EXIT_OK
        report = json.loads((out / "evalrun.json").read_text())
        assert {"aopc@10", "aopc@20", "aopc@30"} <= set(
            report["results"]["random"])

    def test_unknown_method_exit_2(self, tmp_path, model_path, dataset):
        rc = main(["evaluate", dataset, "--methods", "lime",
                   "--predictor", f"builtin:{model_path}",
                   "--out", str(tmp_path / "out")])
        assert rc == EXIT_USAGE

    def test_rerun_byte_identical(self, tmp_path, model_path, dataset):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["evaluate", dataset, "--methods", "hedge",
                         "sample-shapley", "--predictor",
                         f"builtin:{model_path}", "--q", "10", "--samples",
                         "20", "--seed", "42", "--out", str(out)]) == EXIT_OK
        assert read_tree(a) == read_tree(b)


class TestSelftestCommand:
    def test_default_passes(self, capsys):
        assert main(["selftest", "--seed", "3"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "[PASS]" in out and "[FAIL]" not in out

    def test_m_zero_still_passes(self):
        assert main(["selftest", "--seed", "3", "--m", "0"]) == EXIT_OK

    def test_backend_unreachable_exit_3(self, tmp_path):
        dead = tmp_path / "dead.py"
        dead.write_text('import json; print(json.dumps({"fatal": "boom"}))')
        rc = main(["selftest", "--predictor",
                   f"subprocess:{sys.executable} {dead}"])
        assert rc == EXIT_BACKEND

    def test_contract_violation_surfaces_as_backend_error(self, tmp_path):
        crooked = tmp_path / "crooked.py"
        crooked.write_text(
            'import json, sys\n'
            'print(json.dumps({"hello": {"classes": 2, "pad": "<pad>"}}),'
            ' flush=True)\n'
            'for line in sys.stdin:\n'
            '    req = json.loads(line)\n'
            '    print(json.dumps({"id": req["id"], "probs":'
            ' [[0.7, 0.7]] * len(req["batch"])}), flush=True)\n')
        rc = main(["selftest", "--predictor",
                   f"subprocess:{sys.executable} {crooked}"])
        assert rc == EXIT_BACKEND


class TestConfigFile:
    def test_env_config_and_flag_override(self, tmp_path, model_path,
                                          dataset, monkeypatch):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"m": 1, "seed": 99,
                                   "predictor": f"builtin:{model_path}"}))
        monkeypatch.setenv("HEDGE_KIT_CONFIG", str(cfg))
        out = tmp_path / "out"
        rc = main(["explain", dataset, "--m", "3", "--out", str(out)])
        assert rc == EXIT_OK
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["m"] == 3  # flag wins
        assert manifest["config"]["seed"] == 99  # file value kept

    def test_unknown_config_key_rejected(self, tmp_path, dataset, monkeypatch):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        monkeypatch.setenv("HEDGE_KIT_CONFIG", str(cfg))
        assert main(["explain", dataset]) == EXIT_USAGE


def test_load_dataset_hash_changes_with_content(tmp_path):
    p = tmp_path / "d.jsonl"
    p.write_text('{"id": "a", "tokens": ["x"]}\n')
    _, _, h1 = load_dataset(str(p))
    p.write_text('{"id": "a", "tokens": ["y"]}\n')
    _, _, h2 = load_dataset(str(p))
    assert h1 != h2

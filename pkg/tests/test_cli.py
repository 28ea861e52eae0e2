import hashlib
import json

import numpy as np
import pytest

from huelines.cli import main
from huelines.config import PipelineConfig, save_config
from huelines.io import read_labels_csv, write_labels_csv

ARTIFACTS = ("render.png", "legend.json", "lines.csv", "dendrogram.json")


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    assert run("synth", "disconnected", "--n-per-trend", 40, "--seed", 5,
               "--out", out) == 0
    return out


def render_args(synth_dir, out):
    return ("render", synth_dir / "lines.csv", "--bins", "128x64",
            "--k", "2", "--no-log-scale", "--out", out)


class TestSynth:
    def test_writes_data_and_labels(self, synth_dir):
        labels = read_labels_csv(str(synth_dir / "labels.csv"))
        assert len(labels) == 80
        assert set(labels.values()) == {0, 1}

    def test_default_illusory_counts(self, tmp_path):
        assert run("synth", "illusory", "--seed", 1, "--out", tmp_path) == 0
        labels = read_labels_csv(str(tmp_path / "labels.csv"))
        assert len(labels) == 500

    def test_unknown_kind_is_usage_error(self, tmp_path, capsys):
        assert run("synth", "bogus", "--out", tmp_path) == 2


class TestRender:
    def test_writes_all_artifacts(self, synth_dir, tmp_path):
        assert run(*render_args(synth_dir, tmp_path)) == 0
        for name in ARTIFACTS:
            assert (tmp_path / name).stat().st_size > 0
        legend = json.loads((tmp_path / "legend.json").read_text())
        assert set(legend) == {"0", "1"}

    def test_byte_identical_reruns(self, synth_dir, tmp_path):
        def digests():
            return {n: hashlib.sha256((tmp_path / n).read_bytes()).hexdigest()
                    for n in ARTIFACTS}
        assert run(*render_args(synth_dir, tmp_path)) == 0
        first = digests()
        assert run(*render_args(synth_dir, tmp_path)) == 0
        assert digests() == first

    def test_feature_cache_created_and_reused(self, synth_dir, tmp_path):
        assert run(*render_args(synth_dir, tmp_path)) == 0
        cache = tmp_path / "features.bin"
        assert cache.exists()
        stamp = cache.stat().st_mtime_ns
        assert run(*render_args(synth_dir, tmp_path)) == 0
        assert cache.stat().st_mtime_ns == stamp

    def test_config_file_with_flag_override(self, synth_dir, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        save_config(PipelineConfig(width=128, height=64, k=5,
                                   log_scale=False), str(cfg_path))
        assert run("render", synth_dir / "lines.csv", "--config", cfg_path,
                   "--k", "2", "--out", tmp_path / "out") == 0
        legend = json.loads((tmp_path / "out" / "legend.json").read_text())
        assert len(legend) == 2  # flag wins over the config file

    def test_pipeline_error_leaves_no_artifacts(self, synth_dir, tmp_path, capsys):
        out = tmp_path / "out"
        code = run("render", synth_dir / "lines.csv", "--bins", "128x64",
                   "--min-density", "100000", "--out", out)
        assert code == 1
        assert "error:" in capsys.readouterr().err
        assert not any((out / n).exists() for n in ARTIFACTS)

    def test_failed_rerun_keeps_previous_artifacts(self, synth_dir, tmp_path):
        assert run(*render_args(synth_dir, tmp_path)) == 0
        before = {n: (tmp_path / n).read_bytes() for n in ARTIFACTS}
        assert run("render", synth_dir / "lines.csv", "--bins", "128x64",
                   "--min-density", "100000", "--out", tmp_path) == 1
        after = {n: (tmp_path / n).read_bytes() for n in ARTIFACTS}
        assert after == before

    def test_missing_input_fails(self, tmp_path, capsys):
        assert run("render", tmp_path / "nope.csv", "--out", tmp_path) == 1
        assert "error:" in capsys.readouterr().err

    def test_malformed_bins_is_usage_error(self, synth_dir, tmp_path, capsys):
        assert run("render", synth_dir / "lines.csv", "--bins", "512",
                   "--out", tmp_path) == 2


class TestEval:
    def test_perfect_assignment(self, synth_dir, tmp_path, capsys):
        assert run(*render_args(synth_dir, tmp_path)) == 0
        capsys.readouterr()  # drop the render's artifact listing
        code = run("eval", tmp_path / "lines.csv", synth_dir / "labels.csv")
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("accuracy 1.0000")
        report = json.loads(out[out.index("{"):])
        assert report["accuracy"] == 1.0
        assert report["n_unassigned"] == 0

    def test_json_to_file(self, synth_dir, tmp_path, capsys):
        assert run(*render_args(synth_dir, tmp_path)) == 0
        target = tmp_path / "report.json"
        assert run("eval", tmp_path / "lines.csv", synth_dir / "labels.csv",
                   "--json", target) == 0
        assert json.loads(target.read_text())["n_lines"] == 80
        assert "{" not in capsys.readouterr().out

    def test_id_mismatch(self, synth_dir, tmp_path, capsys):
        assert run(*render_args(synth_dir, tmp_path)) == 0
        bad = tmp_path / "bad_labels.csv"
        write_labels_csv({i: 0 for i in range(3)}, str(bad))
        assert run("eval", tmp_path / "lines.csv", bad) == 1
        assert "line ids differ" in capsys.readouterr().err

    def test_ignore_label(self, synth_dir, tmp_path, capsys):
        assert run(*render_args(synth_dir, tmp_path)) == 0
        truth = read_labels_csv(str(synth_dir / "labels.csv"))
        truth = {i: (2 if i < 10 else lab) for i, lab in truth.items()}
        relabeled = tmp_path / "with_junk.csv"
        write_labels_csv(truth, str(relabeled))
        assert run("eval", tmp_path / "lines.csv", relabeled,
                   "--ignore-label", "2") == 0
        out = capsys.readouterr().out
        assert json.loads(out[out.index("{"):])["n_lines"] == 70

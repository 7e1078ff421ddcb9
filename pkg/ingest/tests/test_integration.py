"""Integration with the profiler through its external surfaces only: the
native file formats on disk and the nn-meaning CLI."""

import json
import math
import shutil
import struct
import subprocess

import numpy as np
import pytest

from embed_ingest import IngestConfig, convert_fvecs_to_native, encode_corpus
from embed_ingest.cli import main as cli_main
from embed_ingest.models import ModelLoadError, resolve_model

NN_MEANING = shutil.which("nn-meaning")

pytestmark = pytest.mark.skipif(NN_MEANING is None, reason="nn-meaning CLI not installed")


def run_cli(*args):
    return subprocess.run(
        [NN_MEANING, *args], capture_output=True, text=True, timeout=300
    )


class TestProfilerAcceptsIngestedData:
    def test_hash_encoded_corpus_profiles_meaningfully(self, tmp_path, corpus_file):
        """Criterion: a 100-line corpus at dim 384 yields rc > 1 and finite lid_median."""
        cfg = IngestConfig(
            corpus=corpus_file, model="hash:384", out=tmp_path / "corp", normalize=True
        )
        prefix = encode_corpus(cfg)
        report_path = tmp_path / "report.json"
        proc = run_cli(
            "profile", "--dataset", str(prefix), "--metric", "l2",
            "--out", str(report_path),
        )
        assert proc.returncode == 0, proc.stderr
        report = json.loads(report_path.read_text())
        assert report["rc_report"]["n"] == 100
        assert report["rc_report"]["rc"] > 1.0
        assert math.isfinite(report["lid_report"]["median"])
        assert report["lid_report"]["median"] > 0

    def test_knn_retrieves_payloads_from_sidecar(self, tmp_path, corpus_file):
        cfg = IngestConfig(corpus=corpus_file, model="hash:384", out=tmp_path / "k")
        prefix = encode_corpus(cfg)
        out = tmp_path / "knn.json"
        proc = run_cli(
            "knn", "--dataset", str(prefix), "--sample", "3", "--k", "5",
            "--metric", "angular", "--payloads", "--out", str(out),
        )
        assert proc.returncode == 0, proc.stderr
        results = json.loads(out.read_text())
        corpus_lines = corpus_file.read_text().splitlines()
        for entry in results:
            assert entry["payloads"] == [corpus_lines[i] for i in entry["ids"]]

    def test_converted_fvecs_passes_checksum_validation(self, tmp_path):
        rng = np.random.default_rng(0)
        arr = rng.standard_normal((50, 8)).astype(np.float32)
        src = tmp_path / "src.fvecs"
        with open(src, "wb") as f:
            for row in arr:
                f.write(struct.pack("<i", 8) + row.tobytes())
        prefix = convert_fvecs_to_native(src, tmp_path / "conv")
        proc = run_cli(
            "profile", "--dataset", str(prefix), "--metric", "l2", "--m", "20", "--k", "5"
        )
        assert proc.returncode == 0, proc.stderr
        assert "rc" in proc.stdout


class TestCli:
    def test_encode_via_cli(self, tmp_path, corpus_file):
        rc = cli_main([
            "--corpus", str(corpus_file), "--model", "hash:384",
            "--out", str(tmp_path / "c"), "--batch", "16", "--normalize",
        ])
        assert rc == 0
        for suffix in (".json", ".f32", ".payload"):
            assert (tmp_path / "c").with_suffix(suffix).exists()

    def test_convert_via_cli(self, tmp_path):
        src = tmp_path / "s.fvecs"
        arr = np.ones((4, 3), dtype="<f4")
        with open(src, "wb") as f:
            for row in arr:
                f.write(struct.pack("<i", 3) + row.tobytes())
        assert cli_main(["--from-fvecs", str(src), "--out", str(tmp_path / "s")]) == 0
        assert (tmp_path / "s.json").exists()

    def test_missing_args_exit_2(self, tmp_path):
        assert cli_main(["--out", str(tmp_path / "x")]) == 2


def _load_sentence_model():
    try:
        return resolve_model("sentence-transformers/all-MiniLM-L6-v2")
    except ModelLoadError:
        return None


class TestRealModelSmoke:
    """Environment-dependent: runs only when a real sentence model is loadable."""

    def test_minilm_embeddings_meaningful(self, tmp_path, corpus_file):
        encoder = _load_sentence_model()
        if encoder is None:
            pytest.skip("no sentence-transformers model available in this environment")
        assert encoder.dim == 384
        cfg = IngestConfig(
            corpus=corpus_file,
            model="sentence-transformers/all-MiniLM-L6-v2",
            out=tmp_path / "st",
            normalize=True,
        )
        prefix = encode_corpus(cfg)
        report_path = tmp_path / "report.json"
        proc = run_cli(
            "profile", "--dataset", str(prefix), "--metric", "angular",
            "--out", str(report_path),
        )
        assert proc.returncode == 0, proc.stderr
        report = json.loads(report_path.read_text())
        # plausibly meaningful band for text embeddings; not a hard gate at this scale
        assert report["rc_report"]["rc"] >= 1.3

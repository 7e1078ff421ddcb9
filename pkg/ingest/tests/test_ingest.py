import json
import struct

import numpy as np
import pytest

from embed_ingest import (
    FormatError,
    HashingEncoder,
    IngestConfig,
    convert_fvecs_to_native,
    encode_corpus,
    read_fvecs,
    resolve_model,
    write_native,
)


def write_fvecs(path, arr):
    arr = np.asarray(arr, dtype="<f4")
    with open(path, "wb") as f:
        for row in arr:
            f.write(struct.pack("<i", row.shape[0]))
            f.write(row.tobytes())


class TestHashingEncoder:
    def test_resolve_hash_id(self):
        enc = resolve_model("hash:384")
        assert isinstance(enc, HashingEncoder)
        assert enc.dim == 384

    def test_deterministic_and_duplicate_consistent(self):
        enc = HashingEncoder(64)
        a = enc.encode(["the same line", "another line", "the same line"])
        assert np.array_equal(a[0], a[2])
        b = enc.encode(["the same line"])
        assert np.array_equal(a[0], b[0])

    def test_distinct_texts_differ(self):
        enc = HashingEncoder(256)
        v = enc.encode(["red apples in autumn", "database index maintenance"])
        assert not np.array_equal(v[0], v[1])

    def test_tokenless_text_still_nonzero(self):
        enc = HashingEncoder(32)
        v = enc.encode(["!!!"])
        assert np.abs(v).sum() > 0


class TestEncodeCorpus:
    def test_native_outputs_and_order(self, tmp_path, corpus_file):
        cfg = IngestConfig(corpus=corpus_file, model="hash:384", out=tmp_path / "x", batch_size=7)
        prefix = encode_corpus(cfg)
        header = json.loads(prefix.with_suffix(".json").read_text())
        assert header["count"] == 100
        assert header["dim"] == 384
        assert header["dtype"] == "f32"
        assert header["source"] == "ingested"
        payload_lines = prefix.with_suffix(".payload").read_text().splitlines()
        corpus_lines = corpus_file.read_text().splitlines()
        assert payload_lines == corpus_lines
        blob = prefix.with_suffix(".f32").read_bytes()
        assert len(blob) == 100 * 384 * 4

    def test_duplicate_lines_get_identical_vectors(self, tmp_path):
        corpus = tmp_path / "dup.txt"
        corpus.write_text("alpha beta gamma\ndifferent words here\nalpha beta gamma\n")
        cfg = IngestConfig(corpus=corpus, model="hash:128", out=tmp_path / "d")
        prefix = encode_corpus(cfg)
        vecs = np.frombuffer(prefix.with_suffix(".f32").read_bytes(), dtype="<f4").reshape(3, 128)
        assert np.allclose(vecs[0], vecs[2], rtol=1e-6)
        assert not np.array_equal(vecs[0], vecs[1])

    def test_normalize_unit_rows(self, tmp_path, corpus_file):
        cfg = IngestConfig(
            corpus=corpus_file, model="hash:96", out=tmp_path / "n", normalize=True
        )
        prefix = encode_corpus(cfg)
        vecs = np.frombuffer(prefix.with_suffix(".f32").read_bytes(), dtype="<f4").reshape(-1, 96)
        norms = np.linalg.norm(vecs.astype(np.float64), axis=1)
        assert np.allclose(norms, 1.0, atol=1e-4)

    def test_max_records(self, tmp_path, corpus_file):
        cfg = IngestConfig(
            corpus=corpus_file, model="hash:32", out=tmp_path / "m", max_records=10
        )
        prefix = encode_corpus(cfg)
        header = json.loads(prefix.with_suffix(".json").read_text())
        assert header["count"] == 10

    def test_empty_corpus_rejected(self, tmp_path):
        corpus = tmp_path / "e.txt"
        corpus.write_text("")
        with pytest.raises(ValueError, match="empty"):
            encode_corpus(IngestConfig(corpus=corpus, model="hash:16", out=tmp_path / "e"))

    def test_blank_record_rejected(self, tmp_path):
        corpus = tmp_path / "b.txt"
        corpus.write_text("fine line\n   \nanother\n")
        with pytest.raises(ValueError, match="record 1"):
            encode_corpus(IngestConfig(corpus=corpus, model="hash:16", out=tmp_path / "b"))

    def test_batch_invariance(self, tmp_path, corpus_file):
        prefixes = []
        for bs in (1, 13, 200):
            cfg = IngestConfig(
                corpus=corpus_file, model="hash:64", out=tmp_path / f"bs{bs}", batch_size=bs
            )
            prefixes.append(encode_corpus(cfg))
        blobs = [p.with_suffix(".f32").read_bytes() for p in prefixes]
        assert blobs[0] == blobs[1] == blobs[2]


class TestConvert:
    def test_fvecs_values_preserved(self, tmp_path):
        rng = np.random.default_rng(5)
        arr = rng.standard_normal((20, 6)).astype(np.float32)
        src = tmp_path / "src.fvecs"
        write_fvecs(src, arr)
        prefix = convert_fvecs_to_native(src, tmp_path / "conv")
        blob = prefix.with_suffix(".f32").read_bytes()
        assert blob == arr.tobytes()
        header = json.loads(prefix.with_suffix(".json").read_text())
        assert (header["count"], header["dim"]) == (20, 6)

    def test_truncated_fvecs_rejected(self, tmp_path):
        src = tmp_path / "bad.fvecs"
        arr = np.ones((3, 4), dtype=np.float32)
        write_fvecs(src, arr)
        src.write_bytes(src.read_bytes()[:-2])
        with pytest.raises(FormatError):
            convert_fvecs_to_native(src, tmp_path / "bad")

    def test_read_fvecs_roundtrip(self, tmp_path):
        arr = np.arange(12, dtype=np.float32).reshape(3, 4)
        src = tmp_path / "rt.fvecs"
        write_fvecs(src, arr)
        assert np.array_equal(read_fvecs(src), arr)


class TestWriteNative:
    def test_rejects_payload_mismatch(self, tmp_path):
        with pytest.raises(FormatError, match="payload"):
            write_native(np.ones((3, 2), dtype=np.float32), tmp_path / "w", "w", payloads=["a"])

    def test_rejects_non_finite(self, tmp_path):
        arr = np.ones((2, 2), dtype=np.float32)
        arr[0, 0] = np.inf
        with pytest.raises(FormatError, match="NaN or Inf"):
            write_native(arr, tmp_path / "w", "w")

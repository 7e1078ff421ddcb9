"""PCA dimension adaptation: fit principal axes, project datasets down.

The covariance eigendecomposition runs on the full dataset while n*d stays
under 1e8 elements; beyond that a seeded subsample of 1e5 rows is used.
Only down-projection is provided.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import VectorDataset

_FULL_FIT_ELEMENTS = 10**8
_SUBSAMPLE_ROWS = 10**5
_GRAM_CHUNK = 8192


@dataclass(frozen=True)
class PcaModel:
    input_dim: int
    output_dim: int
    mean: np.ndarray
    components: np.ndarray  # (output_dim, input_dim), rows orthonormal
    explained_variance: np.ndarray  # non-increasing, length output_dim

    def save(self, path: str | Path) -> None:
        obj = {
            "input_dim": self.input_dim,
            "output_dim": self.output_dim,
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance": self.explained_variance.tolist(),
        }
        Path(path).write_text(json.dumps(obj) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "PcaModel":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            input_dim=int(obj["input_dim"]),
            output_dim=int(obj["output_dim"]),
            mean=np.asarray(obj["mean"], dtype=np.float64),
            components=np.asarray(obj["components"], dtype=np.float64),
            explained_variance=np.asarray(obj["explained_variance"], dtype=np.float64),
        )


def pca_fit(ds: VectorDataset, output_dim: int, sample_seed: int = 0) -> PcaModel:
    """Principal axes of the sample covariance (1/(n-1) normalization).

    Components are sorted by descending variance with a deterministic sign
    convention: the largest-magnitude entry of each component is positive.
    """
    n, d = ds.count, ds.dim
    if not 1 <= output_dim <= min(n, d):
        raise ValueError(f"output_dim {output_dim} out of range [1, {min(n, d)}]")
    X = ds.data
    if n * d > _FULL_FIT_ELEMENTS and n > _SUBSAMPLE_ROWS:
        rng = np.random.default_rng(sample_seed)
        rows = np.sort(rng.choice(n, size=_SUBSAMPLE_ROWS, replace=False))
        X = X[rows]
        n = X.shape[0]
    mean = X.mean(axis=0, dtype=np.float64)
    gram = np.zeros((d, d), dtype=np.float64)
    for s in range(0, n, _GRAM_CHUNK):
        c = X[s : s + _GRAM_CHUNK].astype(np.float64) - mean
        gram += c.T @ c
    cov = gram / max(n - 1, 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:output_dim]
    variances = np.maximum(eigvals[order], 0.0)
    components = eigvecs[:, order].T.copy()
    for row in components:
        peak = np.argmax(np.abs(row))
        if row[peak] < 0:
            row *= -1.0
    return PcaModel(
        input_dim=d,
        output_dim=output_dim,
        mean=mean,
        components=components,
        explained_variance=variances,
    )


def pca_project(model: PcaModel, ds: VectorDataset) -> VectorDataset:
    """Map every row through components @ (row - mean); count preserved."""
    if ds.dim != model.input_dim:
        raise ValueError(
            f"dataset dim {ds.dim} does not match model input_dim {model.input_dim}"
        )
    out = np.empty((ds.count, model.output_dim), dtype=np.float32)
    for s in range(0, ds.count, _GRAM_CHUNK):
        c = ds.data[s : s + _GRAM_CHUNK].astype(np.float64) - model.mean
        out[s : s + c.shape[0]] = c @ model.components.T
    meta = dict(ds.meta)
    meta["pca"] = {"from": ds.name, "input_dim": model.input_dim, "output_dim": model.output_dim}
    return VectorDataset(
        name=f"{ds.name}-pca{model.output_dim}", data=out, source=ds.source, meta=meta
    )

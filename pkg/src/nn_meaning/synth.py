"""Seeded synthetic dataset generators.

Gaussian baseline plus two planted-structure families used as ground-truth
oracles for the LID estimator: points confined to a low-dimensional linear
subspace, and uniform draws from the unit ball (whose distance law near the
center forces LID = d).

Normal variates come from numpy's PCG64 + ziggurat; regeneration is
deterministic per seed within one build, cross-build bit-stability is not
promised. The generator algorithm is recorded in the dataset header.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import VectorDataset

KINDS = ("gaussian", "subspace_gaussian", "uniform_ball")

_RNG_NOTE = {"rng": "pcg64", "normal": "ziggurat"}


@dataclass(frozen=True)
class SynthSpec:
    kind: str
    n: int
    d: int
    seed: int = 0
    intrinsic_dim: int | None = None
    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator {self.kind!r}, expected one of {KINDS}")
        if self.n < 1 or self.d < 1:
            raise ValueError("n and d must be positive")
        if self.kind == "subspace_gaussian":
            if self.intrinsic_dim is None:
                raise ValueError("subspace_gaussian needs intrinsic_dim")
            if not 1 <= self.intrinsic_dim <= self.d:
                raise ValueError(
                    f"intrinsic_dim {self.intrinsic_dim} must lie in [1, d={self.d}]"
                )
            if self.noise_sigma < 0.0:
                raise ValueError("noise_sigma must be non-negative")

    @property
    def name(self) -> str:
        if self.kind == "subspace_gaussian":
            return f"subspace{self.intrinsic_dim}-d{self.d}-n{self.n}-s{self.seed}"
        if self.kind == "uniform_ball":
            return f"ball-d{self.d}-n{self.n}-s{self.seed}"
        return f"gaussian-d{self.d}-n{self.n}-s{self.seed}"

    def header_meta(self) -> dict:
        meta = {"generator": self.kind, "n": self.n, "d": self.d, "seed": self.seed}
        if self.kind == "subspace_gaussian":
            meta["intrinsic_dim"] = self.intrinsic_dim
            meta["noise_sigma"] = self.noise_sigma
        meta.update(_RNG_NOTE)
        return meta


def gaussian_dataset(spec: SynthSpec) -> VectorDataset:
    """n i.i.d. standard-normal d-vectors."""
    if spec.kind != "gaussian":
        raise ValueError(f"spec kind is {spec.kind!r}, not gaussian")
    rng = np.random.default_rng(spec.seed)
    data = rng.standard_normal((spec.n, spec.d), dtype=np.float32)
    return VectorDataset(spec.name, data, source="synthetic", meta=spec.header_meta())


def _orthonormal_embedding(rng: np.random.Generator, d: int, k: int) -> np.ndarray:
    """Seeded random orthonormal (d, k) basis with a deterministic sign convention."""
    g = rng.standard_normal((d, k))
    q, _ = np.linalg.qr(g)
    for j in range(k):
        col = q[:, j]
        nz = np.nonzero(col)[0]
        if nz.size and col[nz[0]] < 0:
            q[:, j] = -col
    return q


def subspace_gaussian(spec: SynthSpec) -> VectorDataset:
    """Gaussian points in a random intrinsic_dim subspace of R^d, plus optional noise.

    With noise_sigma = 0 every point lies exactly in the planted linear subspace,
    and pairwise L2 distances equal those of the intrinsic-space points.
    """
    if spec.kind != "subspace_gaussian":
        raise ValueError(f"spec kind is {spec.kind!r}, not subspace_gaussian")
    rng = np.random.default_rng(spec.seed)
    z = rng.standard_normal((spec.n, spec.intrinsic_dim))
    basis = _orthonormal_embedding(rng, spec.d, spec.intrinsic_dim)
    data = z @ basis.T
    if spec.noise_sigma > 0.0:
        data += spec.noise_sigma * rng.standard_normal((spec.n, spec.d))
    return VectorDataset(
        spec.name, data.astype(np.float32), source="synthetic", meta=spec.header_meta()
    )


def uniform_ball(spec: SynthSpec) -> VectorDataset:
    """n points uniform in the unit d-ball: uniform direction, radius = U^(1/d)."""
    if spec.kind != "uniform_ball":
        raise ValueError(f"spec kind is {spec.kind!r}, not uniform_ball")
    rng = np.random.default_rng(spec.seed)
    g = rng.standard_normal((spec.n, spec.d))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    radii = rng.random(spec.n) ** (1.0 / spec.d)
    data = (g / norms) * radii[:, None]
    return VectorDataset(
        spec.name, data.astype(np.float32), source="synthetic", meta=spec.header_meta()
    )


def generate(spec: SynthSpec) -> VectorDataset:
    if spec.kind == "gaussian":
        return gaussian_dataset(spec)
    if spec.kind == "subspace_gaussian":
        return subspace_gaussian(spec)
    return uniform_ball(spec)

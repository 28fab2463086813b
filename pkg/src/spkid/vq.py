"""Per-speaker k-means codebooks and codebook file IO.

Training is Lloyd's algorithm with k-means++ seeding, fully deterministic
given (data, k, seed): per-iteration distortion is recorded and checked to be
non-increasing, and empty clusters are re-seeded with the point farthest from
its assigned centroid. sklearn is deliberately not used here; the determinism,
iteration-history, and re-seeding contracts are cheaper to own than to coerce
out of a library.
"""

from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .psdct import FeatureVector

log = logging.getLogger(__name__)

CODEBOOK_MAGIC = b"VQCB"
CODEBOOK_VERSION = 1
MANIFEST_NAME = "manifest.json"

DEFAULT_SEED = 42
DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 300


@dataclass(eq=False)
class Codebook:
    speaker_id: str
    kind: str
    k: int
    dim: int
    centroids: np.ndarray  # (k, dim) float64
    seed: int
    train_vector_count: int

    def __post_init__(self):
        self.centroids = np.ascontiguousarray(self.centroids, dtype=np.float64)
        if self.k < 1:
            raise ValueError("codebook size must be >= 1")
        if self.centroids.shape != (self.k, self.dim):
            raise ValueError(f"centroid shape {self.centroids.shape} != ({self.k}, {self.dim})")
        if not np.all(np.isfinite(self.centroids)):
            raise ValueError("centroids must be finite")


def _sq_dists(data: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d2 = (
        np.sum(data**2, axis=1)[:, None]
        - 2.0 * data @ centroids.T
        + np.sum(centroids**2, axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _kmeanspp_init(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = data.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = np.sum((data - data[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            raise ValueError("fewer distinct vectors than requested centroids")
        idx = int(rng.choice(n, p=d2 / total))
        chosen.append(idx)
        d2 = np.minimum(d2, np.sum((data - data[idx]) ** 2, axis=1))
    return data[chosen].copy()


def lloyd_kmeans(
    data: np.ndarray,
    k: int,
    seed: int = DEFAULT_SEED,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[np.ndarray, list[float]]:
    """k-means centroids plus the per-iteration mean-squared-distance history.

    Stops when the largest centroid displacement falls below tol relative to
    the RMS vector norm of the data, or after max_iter iterations.
    """
    data = np.ascontiguousarray(data, dtype=np.float64)
    n = data.shape[0]
    if n == 0:
        raise ValueError("no training vectors")
    n_distinct = np.unique(data, axis=0).shape[0]
    if k > n_distinct:
        raise ValueError(f"k={k} exceeds the {n_distinct} distinct training vectors")

    rng = np.random.default_rng(seed)
    centroids = _kmeanspp_init(data, k, rng)
    scale = float(np.sqrt(np.mean(np.sum(data**2, axis=1)))) or 1.0

    history: list[float] = []
    for _ in range(max_iter):
        d2 = _sq_dists(data, centroids)
        labels = np.argmin(d2, axis=1)
        distortion = float(np.mean(d2[np.arange(n), labels]))
        if history and distortion > history[-1] + 1e-12 * (1.0 + history[-1]):
            raise RuntimeError(
                f"distortion increased ({history[-1]} -> {distortion}); Lloyd update bug"
            )
        history.append(distortion)

        new_centroids = centroids.copy()
        for j in range(k):
            mask = labels == j
            if np.any(mask):
                new_centroids[j] = data[mask].mean(axis=0)
        # re-seed empty clusters with the points farthest from their centroid
        empty = [j for j in range(k) if not np.any(labels == j)]
        if empty:
            point_d2 = np.sum((data - new_centroids[labels]) ** 2, axis=1)
            for j in empty:
                far = int(np.argmax(point_d2))
                new_centroids[j] = data[far]
                point_d2[far] = 0.0

        movement = float(np.max(np.sqrt(np.sum((new_centroids - centroids) ** 2, axis=1))))
        centroids = new_centroids
        if movement < tol * scale:
            break
    return centroids, history


def _as_matrix(vectors: list[FeatureVector]) -> tuple[np.ndarray, str]:
    if not vectors:
        raise ValueError("empty vector list")
    kind = vectors[0].kind
    dim = vectors[0].dim
    for v in vectors:
        if v.kind != kind:
            raise ValueError(f"mixed feature kinds: {kind} vs {v.kind}")
        if v.dim != dim:
            raise ValueError(f"dimension mismatch: {dim} vs {v.dim}")
    return np.stack([v.values for v in vectors]), kind


def train_codebook(
    vectors: list[FeatureVector],
    k: int,
    seed: int = DEFAULT_SEED,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    speaker_id: str = "",
) -> Codebook:
    """Cluster one speaker's vectors of one kind into a k-entry codebook."""
    data, kind = _as_matrix(vectors)
    log.info("training %s codebook k=%d for %r on %d vectors", kind, k, speaker_id, len(vectors))
    centroids, _ = lloyd_kmeans(data, k, seed=seed, tol=tol, max_iter=max_iter)
    return Codebook(
        speaker_id=speaker_id,
        kind=kind,
        k=k,
        dim=data.shape[1],
        centroids=centroids,
        seed=seed,
        train_vector_count=data.shape[0],
    )


def distortion(vectors: list[FeatureVector], codebook: Codebook) -> float:
    """Mean squared Euclidean distance to the nearest centroid."""
    data, kind = _as_matrix(vectors)
    if kind != codebook.kind:
        raise ValueError(f"feature kind {kind} does not match codebook kind {codebook.kind}")
    if data.shape[1] != codebook.dim:
        raise ValueError(f"dimension {data.shape[1]} does not match codebook dim {codebook.dim}")
    return float(np.mean(np.min(_sq_dists(data, codebook.centroids), axis=1)))


def save_codebook(codebook: Codebook, path) -> None:
    """Binary format: versioned header + centroids as little-endian float64."""
    kind_b = codebook.kind.encode("utf-8")
    spk_b = codebook.speaker_id.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CODEBOOK_MAGIC)
        fh.write(struct.pack("<IIIqQ", CODEBOOK_VERSION, codebook.k, codebook.dim,
                             codebook.seed, codebook.train_vector_count))
        fh.write(struct.pack("<I", len(kind_b)) + kind_b)
        fh.write(struct.pack("<I", len(spk_b)) + spk_b)
        fh.write(np.ascontiguousarray(codebook.centroids, dtype="<f8").tobytes())


def load_codebook(path) -> Codebook:
    with open(path, "rb") as fh:
        if fh.read(4) != CODEBOOK_MAGIC:
            raise ValueError(f"{path}: not a codebook file")
        version, k, dim, seed, count = struct.unpack("<IIIqQ", fh.read(28))
        if version != CODEBOOK_VERSION:
            raise ValueError(f"{path}: unsupported codebook version {version}")
        (kind_len,) = struct.unpack("<I", fh.read(4))
        kind = fh.read(kind_len).decode("utf-8")
        (spk_len,) = struct.unpack("<I", fh.read(4))
        speaker_id = fh.read(spk_len).decode("utf-8")
        centroids = np.frombuffer(fh.read(k * dim * 8), dtype="<f8").reshape(k, dim)
    return Codebook(speaker_id, kind, k, dim, centroids.copy(), seed, count)


def save_model_dir(codebooks: list[Codebook], model_dir) -> None:
    """One file per speaker per kind plus a manifest listing them all."""
    model_dir = Path(model_dir)
    model_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for cb in sorted(codebooks, key=lambda c: (c.kind, c.speaker_id)):
        fname = f"{cb.speaker_id}.{cb.kind}.cb"
        save_codebook(cb, model_dir / fname)
        entries.append(
            {"file": fname, "speaker_id": cb.speaker_id, "kind": cb.kind, "k": cb.k, "dim": cb.dim}
        )
    manifest = {"version": CODEBOOK_VERSION, "codebooks": entries}
    with open(model_dir / MANIFEST_NAME, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def load_model_dir(model_dir, kind: str | None = None) -> list[Codebook]:
    model_dir = Path(model_dir)
    manifest_path = model_dir / MANIFEST_NAME
    if not manifest_path.exists():
        raise ValueError(f"{model_dir}: no {MANIFEST_NAME}; not a model directory")
    with open(manifest_path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    codebooks = []
    for entry in manifest["codebooks"]:
        if kind is not None and entry["kind"] != kind:
            continue
        codebooks.append(load_codebook(model_dir / entry["file"]))
    return codebooks

"""Cumulative-minimum-distance scoring, nearest-codebook identification, fusion.

The score of a test-vector set against one speaker's codebook is the sum over
vectors of the Euclidean (not squared) distance to the nearest centroid; the
enrolled speaker with the least score wins. Two systems are combined as a
convex combination of their scores, weighted by their measured accuracies.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .psdct import FeatureVector
from .vq import Codebook, _as_matrix, _sq_dists


@dataclass(frozen=True)
class CmdScore:
    speaker_id: str
    kind: str
    cmd: float
    n_vectors: int

    def __post_init__(self):
        if self.cmd < 0.0:
            raise ValueError("cumulative minimum distance cannot be negative")


@dataclass(frozen=True)
class FusionWeights:
    """Accuracy-derived convex weight: alpha = a_dct / (a_dct + a_mfcc)."""

    a_dct: float
    a_mfcc: float

    def __post_init__(self):
        if not (0.0 <= self.a_dct <= 1.0 and 0.0 <= self.a_mfcc <= 1.0):
            raise ValueError("accuracies must lie in [0, 1]")
        if self.a_dct + self.a_mfcc <= 0.0:
            raise ValueError("at least one accuracy must be positive")

    @property
    def alpha(self) -> float:
        return self.a_dct / (self.a_dct + self.a_mfcc)


@dataclass(frozen=True)
class FusedScore:
    speaker_id: str
    d_dct: float
    d_mfcc: float
    d_com: float


def cmd(test_vectors: list[FeatureVector], codebook: Codebook) -> CmdScore:
    """Sum over test vectors of the min Euclidean distance to any centroid."""
    data, kind = _as_matrix(test_vectors)
    if kind != codebook.kind:
        raise ValueError(f"feature kind {kind} does not match codebook kind {codebook.kind}")
    if data.shape[1] != codebook.dim:
        raise ValueError(f"dimension {data.shape[1]} does not match codebook dim {codebook.dim}")
    min_d = np.sqrt(np.min(_sq_dists(data, codebook.centroids), axis=1))
    return CmdScore(codebook.speaker_id, kind, float(np.sum(min_d)), data.shape[0])


def identify(test_vectors: list[FeatureVector], codebooks: list[Codebook]) -> tuple[list[CmdScore], str]:
    """Score against every enrolled codebook; least distance wins.

    Returns the scores ranked ascending plus the predicted speaker id; ties
    break lexicographically on speaker id.
    """
    if not codebooks:
        raise ValueError("no enrolled codebooks")
    kinds = {cb.kind for cb in codebooks}
    if len(kinds) != 1:
        raise ValueError(f"mixed codebook kinds: {sorted(kinds)}")
    scores = [cmd(test_vectors, cb) for cb in codebooks]
    scores.sort(key=lambda s: (s.cmd, s.speaker_id))
    return scores, scores[0].speaker_id


def fuse(
    scores_dct: list[CmdScore],
    scores_mfcc: list[CmdScore],
    weights: FusionWeights,
    per_vector: bool = False,
) -> tuple[list[FusedScore], str]:
    """Convex combination d_com = alpha*d_dct + (1-alpha)*d_mfcc per speaker.

    Raw sums are combined by default. per_vector=True divides each system's
    score by its test-vector count first, making fusion robust to the two
    systems seeing different numbers of vectors.
    """
    by_dct = {s.speaker_id: s for s in scores_dct}
    by_mfcc = {s.speaker_id: s for s in scores_mfcc}
    if set(by_dct) != set(by_mfcc):
        raise ValueError(
            f"speaker sets differ: {sorted(set(by_dct) ^ set(by_mfcc))} present in only one system"
        )
    alpha = weights.alpha
    fused = []
    for speaker_id in sorted(by_dct):
        d_dct = by_dct[speaker_id].cmd
        d_mfcc = by_mfcc[speaker_id].cmd
        if per_vector:
            d_dct /= by_dct[speaker_id].n_vectors
            d_mfcc /= by_mfcc[speaker_id].n_vectors
        fused.append(
            FusedScore(speaker_id, d_dct, d_mfcc, alpha * d_dct + (1.0 - alpha) * d_mfcc)
        )
    fused.sort(key=lambda s: (s.d_com, s.speaker_id))
    return fused, fused[0].speaker_id


def write_score_csv(fh, scores: list[CmdScore], test_speaker: str = "") -> None:
    writer = csv.writer(fh)
    writer.writerow(["test_speaker", "speaker", "kind", "cmd", "n_vectors", "rank"])
    for rank, s in enumerate(sorted(scores, key=lambda s: (s.cmd, s.speaker_id)), start=1):
        writer.writerow([test_speaker, s.speaker_id, s.kind, f"{s.cmd:.9g}", s.n_vectors, rank])


def write_fused_csv(fh, fused: list[FusedScore], alpha: float, test_speaker: str = "") -> None:
    writer = csv.writer(fh)
    writer.writerow(["test_speaker", "speaker", "d_dct", "d_mfcc", "alpha", "d_com", "rank"])
    for rank, s in enumerate(sorted(fused, key=lambda s: (s.d_com, s.speaker_id)), start=1):
        writer.writerow(
            [test_speaker, s.speaker_id, f"{s.d_dct:.9g}", f"{s.d_mfcc:.9g}", f"{alpha:.6f}", f"{s.d_com:.9g}", rank]
        )

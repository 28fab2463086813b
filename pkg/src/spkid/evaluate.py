"""Experiment orchestration: train/test runs, codebook-size and coefficient sweeps.

A run trains one codebook per speaker per size per feature kind on the train
utterances, pools each speaker's test utterances into one cumulative decision,
and reports closed-set identification accuracy, per-trial score rankings, and
the accuracy-weighted fusion of the two systems.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .classify import CmdScore, FusionWeights, fuse, identify
from .corpus import (
    DEFAULT_VOICED_SET,
    Utterance,
    extract_voiced_regions,
    load_corpus,
    split_speakers,
)
from .gci import PitchCycle, cycles_from_region
from .mfcc import MfccConfig, mfcc_features_for_region
from .psdct import DEFAULT_NUM_COEFFS, KIND_MFCC, KIND_PSDCT, FeatureVector, mec, psdct_feature
from .synth import VOICED_PHONE
from .vq import DEFAULT_SEED, train_codebook

log = logging.getLogger(__name__)

# Reference results of the 30-speaker TIMIT protocol this harness mirrors
# (identification accuracy in percent); reproducing them needs licensed TIMIT.
TIMIT30_REFERENCE_ACCURACY = {
    16: (90.0, 90.0, 100.0),
    32: (96.7, 96.7, 100.0),
    64: (96.7, 100.0, 100.0),
    128: (96.7, 100.0, 100.0),
}
# coefficient count -> (mean energy captured %, accuracy %) at codebook size 32
TIMIT30_REFERENCE_SWEEP = {
    10: (81.7, 93.3),
    15: (90.7, 96.7),
    20: (93.4, 96.7),
    25: (94.5, 96.7),
    30: (95.6, 96.7),
    35: (96.3, 96.7),
    40: (96.9, 96.7),
}

KIND_FUSED = "fused"


@dataclass
class ExperimentConfig:
    corpus_root: str | Path | None = None
    n_train: int = 6
    n_test: int = 2
    codebook_sizes: tuple[int, ...] = (16, 32, 64, 128)
    coeff_counts: tuple[int, ...] = (10, 15, 20, 25, 30, 35, 40)
    n_coeffs: int = DEFAULT_NUM_COEFFS
    seed: int = DEFAULT_SEED
    voiced_set: frozenset[str] | None = None
    kinds: tuple[str, ...] = (KIND_PSDCT, KIND_MFCC)
    test_pattern: str = "sa"
    mfcc: MfccConfig = field(default_factory=MfccConfig)
    sweep_codebook_size: int = 32

    def __post_init__(self):
        if not self.codebook_sizes or any(k < 1 for k in self.codebook_sizes):
            raise ValueError("codebook_sizes must be a non-empty list of sizes >= 1")
        if not self.coeff_counts or any(k < 1 for k in self.coeff_counts):
            raise ValueError("coeff_counts must be a non-empty list of counts >= 1")
        if not self.kinds:
            raise ValueError("at least one feature kind required")

    def effective_voiced_set(self) -> frozenset[str]:
        # default covers TIMIT sonorants plus the synthetic generator's marker
        if self.voiced_set is not None:
            return self.voiced_set
        return DEFAULT_VOICED_SET | {VOICED_PHONE}


@dataclass
class TrialResult:
    speaker_id: str
    kind: str
    codebook_size: int
    predicted: str
    correct: bool
    scores: tuple[tuple[str, float], ...]  # (candidate, score) ascending
    n_vectors: int = 0
    alpha: float | None = None


@dataclass
class EvalReport:
    accuracies: dict[str, dict[int, float]]  # kind -> codebook size -> fraction
    alphas: dict[int, float]
    trials: list[TrialResult]
    speakers: list[str]
    n_coeffs: int
    seed: int

    def validate(self) -> None:
        """Recount per-trial rows against the tabulated accuracies."""
        for kind, by_size in self.accuracies.items():
            for size, acc in by_size.items():
                rows = [t for t in self.trials if t.kind == kind and t.codebook_size == size]
                if len(rows) != len(self.speakers):
                    raise AssertionError(f"{kind}/{size}: {len(rows)} trials for {len(self.speakers)} speakers")
                recount = sum(t.correct for t in rows) / len(rows)
                if abs(recount - acc) > 1e-12:
                    raise AssertionError(f"{kind}/{size}: accuracy {acc} != recount {recount}")

    def to_markdown(self) -> str:
        kinds = [k for k in (KIND_PSDCT, KIND_MFCC) if k in self.accuracies]
        sizes = sorted({s for by_size in self.accuracies.values() for s in by_size})
        lines = [
            "# Speaker identification report",
            "",
            f"- speakers: {len(self.speakers)}",
            f"- feature dim: {self.n_coeffs} (psdct)",
            f"- seed: {self.seed}",
            "",
            "## Accuracy by codebook size",
            "",
            "| codebook size | " + " | ".join(kinds + [KIND_FUSED, "alpha"]) + " |",
            "|" + "---|" * (len(kinds) + 3),
        ]
        for size in sizes:
            cells = [f"{self.accuracies[k][size] * 100:.1f}" if size in self.accuracies.get(k, {}) else "-" for k in kinds]
            fused_acc = self.accuracies.get(KIND_FUSED, {}).get(size)
            cells.append(f"{fused_acc * 100:.1f}" if fused_acc is not None else "-")
            alpha = self.alphas.get(size)
            cells.append(f"{alpha:.3f}" if alpha is not None else "-")
            lines.append(f"| {size} | " + " | ".join(cells) + " |")
        lines += [
            "",
            "Reference (30-speaker TIMIT protocol, percent):",
            "",
            "| codebook size | psdct | mfcc | fused |",
            "|---|---|---|---|",
        ]
        for size, (a, b, c) in TIMIT30_REFERENCE_ACCURACY.items():
            lines.append(f"| {size} | {a} | {b} | {c} |")
        lines.append("")
        return "\n".join(lines)

    def write_csv(self, fh) -> None:
        writer = csv.writer(fh)
        writer.writerow(
            ["test_speaker", "kind", "codebook_size", "rank", "candidate", "score",
             "n_vectors", "alpha", "predicted", "correct"]
        )
        for t in self.trials:
            for rank, (candidate, score) in enumerate(t.scores, start=1):
                writer.writerow(
                    [t.speaker_id, t.kind, t.codebook_size, rank, candidate, f"{score:.9g}",
                     t.n_vectors or "", f"{t.alpha:.6f}" if t.alpha is not None else "",
                     t.predicted, int(t.correct)]
                )


def collect_cycles(utterances: list[Utterance], voiced_set: frozenset[str]) -> list[PitchCycle]:
    cycles: list[PitchCycle] = []
    for utt in utterances:
        for region in extract_voiced_regions(utt, voiced_set):
            cycles.extend(cycles_from_region(region))
    return cycles


def psdct_features(cycles: list[PitchCycle], n_coeffs: int) -> list[FeatureVector]:
    return [psdct_feature(c, n_coeffs) for c in cycles if len(c) > n_coeffs]


def collect_mfcc_features(
    utterances: list[Utterance], voiced_set: frozenset[str], config: MfccConfig
) -> list[FeatureVector]:
    feats: list[FeatureVector] = []
    for utt in utterances:
        for region in extract_voiced_regions(utt, voiced_set):
            feats.extend(mfcc_features_for_region(region, config))
    return feats


def run_experiment(config: ExperimentConfig, utterances: list[Utterance] | None = None) -> EvalReport:
    """Train, identify, and fuse over every configured codebook size.

    The fusion weight per size is derived from the two systems' accuracies
    measured in this same report (the closed-loop protocol the reference
    results use).
    """
    if utterances is None:
        if config.corpus_root is None:
            raise ValueError("either utterances or corpus_root must be provided")
        utterances = load_corpus(config.corpus_root)
    voiced_set = config.effective_voiced_set()
    splits = split_speakers(utterances, config.n_train, config.n_test, config.test_pattern)
    speakers = [s.speaker_id for s in splits]

    train_feats: dict[str, dict[str, list[FeatureVector]]] = {k: {} for k in config.kinds}
    test_feats: dict[str, dict[str, list[FeatureVector]]] = {k: {} for k in config.kinds}
    for split in splits:
        if KIND_PSDCT in config.kinds:
            train_feats[KIND_PSDCT][split.speaker_id] = psdct_features(
                collect_cycles(split.train_utterances, voiced_set), config.n_coeffs
            )
            test_feats[KIND_PSDCT][split.speaker_id] = psdct_features(
                collect_cycles(split.test_utterances, voiced_set), config.n_coeffs
            )
        if KIND_MFCC in config.kinds:
            train_feats[KIND_MFCC][split.speaker_id] = collect_mfcc_features(
                split.train_utterances, voiced_set, config.mfcc
            )
            test_feats[KIND_MFCC][split.speaker_id] = collect_mfcc_features(
                split.test_utterances, voiced_set, config.mfcc
            )
    for kind in config.kinds:
        for speaker_id in speakers:
            if not train_feats[kind][speaker_id]:
                raise ValueError(f"speaker {speaker_id}: no {kind} training vectors")
            if not test_feats[kind][speaker_id]:
                raise ValueError(f"speaker {speaker_id}: no {kind} test vectors")

    accuracies: dict[str, dict[int, float]] = {k: {} for k in config.kinds}
    alphas: dict[int, float] = {}
    trials: list[TrialResult] = []
    # scores[(kind, size, test speaker)] -> ranked CmdScore list
    scores: dict[tuple[str, int, str], list[CmdScore]] = {}

    for kind in config.kinds:
        for size in config.codebook_sizes:
            codebooks = [
                train_codebook(train_feats[kind][spk], size, seed=config.seed, speaker_id=spk)
                for spk in speakers
            ]
            correct = 0
            for spk in speakers:
                ranked, predicted = identify(test_feats[kind][spk], codebooks)
                scores[(kind, size, spk)] = ranked
                ok = predicted == spk
                correct += ok
                trials.append(
                    TrialResult(
                        speaker_id=spk,
                        kind=kind,
                        codebook_size=size,
                        predicted=predicted,
                        correct=ok,
                        scores=tuple((s.speaker_id, s.cmd) for s in ranked),
                        n_vectors=len(test_feats[kind][spk]),
                    )
                )
            accuracies[kind][size] = correct / len(speakers)

    if KIND_PSDCT in config.kinds and KIND_MFCC in config.kinds:
        accuracies[KIND_FUSED] = {}
        for size in config.codebook_sizes:
            a_dct = accuracies[KIND_PSDCT][size]
            a_mfcc = accuracies[KIND_MFCC][size]
            if a_dct + a_mfcc <= 0.0:
                log.warning("size %d: both systems at zero accuracy; skipping fusion", size)
                continue
            weights = FusionWeights(a_dct, a_mfcc)
            alphas[size] = weights.alpha
            correct = 0
            for spk in speakers:
                fused, predicted = fuse(
                    scores[(KIND_PSDCT, size, spk)], scores[(KIND_MFCC, size, spk)], weights
                )
                ok = predicted == spk
                correct += ok
                trials.append(
                    TrialResult(
                        speaker_id=spk,
                        kind=KIND_FUSED,
                        codebook_size=size,
                        predicted=predicted,
                        correct=ok,
                        scores=tuple((s.speaker_id, s.d_com) for s in fused),
                        alpha=weights.alpha,
                    )
                )
            accuracies[KIND_FUSED][size] = correct / len(speakers)

    report = EvalReport(
        accuracies=accuracies,
        alphas=alphas,
        trials=trials,
        speakers=speakers,
        n_coeffs=config.n_coeffs,
        seed=config.seed,
    )
    report.validate()
    return report


@dataclass
class SweepRow:
    n_coeffs: int
    mec_total: float  # retained energy over full frame energy
    mec_ac: float  # retained energy over non-mean coefficient energy
    accuracy: float


def sweep_coefficients(config: ExperimentConfig, utterances: list[Utterance] | None = None) -> list[SweepRow]:
    """Accuracy and mean-energy-captured as a function of coefficient count.

    Codebook size is fixed (default 32). Cycles shorter than the largest
    requested coefficient count are excluded once up front, so the energy
    statistics for every K are computed over the same cycle set and are
    monotone in K by construction.
    """
    if utterances is None:
        if config.corpus_root is None:
            raise ValueError("either utterances or corpus_root must be provided")
        utterances = load_corpus(config.corpus_root)
    voiced_set = config.effective_voiced_set()
    splits = split_speakers(utterances, config.n_train, config.n_test, config.test_pattern)
    speakers = [s.speaker_id for s in splits]
    max_k = max(config.coeff_counts)

    train_cycles = {
        s.speaker_id: [c for c in collect_cycles(s.train_utterances, voiced_set) if len(c) > max_k]
        for s in splits
    }
    test_cycles = {
        s.speaker_id: [c for c in collect_cycles(s.test_utterances, voiced_set) if len(c) > max_k]
        for s in splits
    }
    pooled_train = [c for spk in speakers for c in train_cycles[spk]]
    if not pooled_train:
        raise ValueError("no usable pitch cycles in the training data")

    rows = []
    for k in sorted(config.coeff_counts):
        codebooks = [
            train_codebook(
                psdct_features(train_cycles[spk], k),
                config.sweep_codebook_size,
                seed=config.seed,
                speaker_id=spk,
            )
            for spk in speakers
        ]
        correct = 0
        for spk in speakers:
            _, predicted = identify(psdct_features(test_cycles[spk], k), codebooks)
            correct += predicted == spk
        rows.append(
            SweepRow(
                n_coeffs=k,
                mec_total=mec(pooled_train, k, include_dc=True),
                mec_ac=mec(pooled_train, k, include_dc=False),
                accuracy=correct / len(speakers),
            )
        )
    return rows


def sweep_to_markdown(rows: list[SweepRow], codebook_size: int) -> str:
    lines = [
        "# Coefficient-count sweep",
        "",
        f"- codebook size: {codebook_size}",
        "- MEC = mean fraction of cycle energy captured by the retained coefficients",
        "  (total: denominator includes the mean coefficient; ac: it does not)",
        "",
        "| coeffs | MEC total % | MEC ac % | accuracy % |",
        "|---|---|---|---|",
    ]
    for r in rows:
        lines.append(
            f"| {r.n_coeffs} | {r.mec_total * 100:.1f} | {r.mec_ac * 100:.1f} | {r.accuracy * 100:.1f} |"
        )
    lines += [
        "",
        "Reference (30-speaker TIMIT protocol, percent):",
        "",
        "| coeffs | MEC % | accuracy % |",
        "|---|---|---|",
    ]
    for k, (mec_pct, acc_pct) in TIMIT30_REFERENCE_SWEEP.items():
        lines.append(f"| {k} | {mec_pct} | {acc_pct} |")
    lines.append("")
    return "\n".join(lines)


def write_sweep_csv(fh, rows: list[SweepRow]) -> None:
    writer = csv.writer(fh)
    writer.writerow(["n_coeffs", "mec_total", "mec_ac", "accuracy"])
    for r in rows:
        writer.writerow([r.n_coeffs, f"{r.mec_total:.9g}", f"{r.mec_ac:.9g}", f"{r.accuracy:.9g}"])

"""Waveform and label IO, voiced-region selection, and train/test splits.

Corpus layout on disk: one directory per speaker, holding ``<utt>.wav``
(RIFF/WAVE, PCM 16-bit mono), ``<utt>.phn`` (TIMIT-style ``begin end phone``
lines), and optionally ``<utt>.gci`` (ground-truth excitation instants written
by the synthetic generator, one sample index per line).
"""

from __future__ import annotations

import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

PCM_SCALE = 32768.0  # symmetric 16-bit range

PITCH_MIN_HZ = 60.0
PITCH_MAX_HZ = 400.0

# Sonorant TIMIT labels treated as voiced by default: vowels, semivowels,
# nasals. Overridable via a voiced-set file (one label per line).
DEFAULT_VOICED_SET = frozenset(
    (
        "iy ih eh ae aa aw ay ah ao oy ow uh uw ux er ax ix axr ax-h "
        "l r w y el "
        "m n ng em en eng nx"
    ).split()
)


class CorpusError(ValueError):
    """Base class for corpus file problems."""


class MalformedWavError(CorpusError):
    """File is not a readable RIFF/WAVE container."""


class UnsupportedWavError(CorpusError):
    """WAV container is valid but the encoding is not PCM 16-bit mono."""


class PhnParseError(CorpusError):
    """Phone label file could not be parsed."""


def min_period(sample_rate: int) -> int:
    """Shortest plausible pitch period in samples (400 Hz)."""
    return int(round(sample_rate / PITCH_MAX_HZ))


def max_period(sample_rate: int) -> int:
    """Longest plausible pitch period in samples (60 Hz)."""
    return int(round(sample_rate / PITCH_MIN_HZ))


@dataclass(frozen=True)
class PhoneSegment:
    begin: int
    end: int
    phone: str

    def __post_init__(self):
        if self.begin < 0 or self.begin >= self.end:
            raise ValueError(f"bad segment bounds [{self.begin}, {self.end})")


@dataclass(eq=False)
class Utterance:
    """A mono waveform with amplitudes in [-1, 1], plus optional phone labels.

    ``impulses`` carries ground-truth excitation positions for synthetic
    utterances (absolute sample indices); None for real recordings.
    """

    samples: np.ndarray
    sample_rate: int
    speaker_id: str
    utterance_id: str
    segments: list[PhoneSegment] | None = None
    impulses: np.ndarray | None = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.samples.size == 0:
            raise ValueError("utterance has no samples")
        peak = float(np.max(np.abs(self.samples)))
        if peak > 1.0:
            raise ValueError(f"samples exceed [-1, 1] (peak {peak})")
        if self.segments is not None:
            prev_end = 0
            for seg in self.segments:
                if seg.begin < prev_end:
                    raise ValueError(f"segments overlap or unsorted at {seg}")
                prev_end = seg.end
            if prev_end > self.samples.size:
                raise ValueError("segment extends past end of utterance")


@dataclass(frozen=True, eq=False)
class VoicedRegion:
    """Contiguous voiced slice of an utterance."""

    samples: np.ndarray
    source_offset: int
    sample_rate: int
    region_id: str = ""

    def __len__(self) -> int:
        return self.samples.size


@dataclass
class SpeakerSplit:
    speaker_id: str
    train_utterances: list[Utterance]
    test_utterances: list[Utterance]

    def __post_init__(self):
        train_ids = {u.utterance_id for u in self.train_utterances}
        test_ids = {u.utterance_id for u in self.test_utterances}
        if train_ids & test_ids:
            raise ValueError(
                f"speaker {self.speaker_id}: train/test sets overlap: {train_ids & test_ids}"
            )


def load_wav(path, speaker_id: str | None = None, utterance_id: str | None = None) -> Utterance:
    """Read a RIFF/WAVE PCM 16-bit mono file, scaling samples by 1/32768.

    Speaker and utterance ids default to the parent directory name and the
    file stem. NIST SPHERE containers (unconverted TIMIT) are rejected with
    a dedicated message.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == b"NIST":
        raise UnsupportedWavError(
            f"{path}: NIST SPHERE container; convert to RIFF/WAVE (e.g. with sph2pipe) first"
        )
    if head != b"RIFF":
        raise MalformedWavError(f"{path}: not a RIFF/WAVE file")
    try:
        with wave.open(str(path), "rb") as wf:
            if wf.getcomptype() != "NONE":
                raise UnsupportedWavError(f"{path}: compressed WAV ({wf.getcomptype()}) not supported, need PCM")
            if wf.getnchannels() != 1:
                raise UnsupportedWavError(f"{path}: {wf.getnchannels()} channels, need mono")
            if wf.getsampwidth() != 2:
                raise UnsupportedWavError(f"{path}: {8 * wf.getsampwidth()}-bit samples, need 16-bit")
            rate = wf.getframerate()
            raw = wf.readframes(wf.getnframes())
    except wave.Error as exc:
        raise MalformedWavError(f"{path}: {exc}") from exc
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / PCM_SCALE
    return Utterance(
        samples=samples,
        sample_rate=rate,
        speaker_id=speaker_id if speaker_id is not None else path.parent.name,
        utterance_id=utterance_id if utterance_id is not None else path.stem,
    )


def write_wav(path, samples, sample_rate: int) -> None:
    """Write samples in [-1, 1] as PCM 16-bit mono."""
    samples = np.asarray(samples, dtype=np.float64)
    ints = np.clip(np.rint(samples * PCM_SCALE), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(sample_rate)
        wf.writeframes(ints.tobytes())


def parse_phn(path) -> list[PhoneSegment]:
    """Parse a TIMIT-style label file: one 'begin end phone' triple per line."""
    path = Path(path)
    segments: list[PhoneSegment] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 3:
                raise PhnParseError(f"{path}:{lineno}: expected 'begin end phone', got {line!r}")
            try:
                begin, end = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise PhnParseError(f"{path}:{lineno}: non-integer bounds in {line!r}") from exc
            try:
                seg = PhoneSegment(begin, end, parts[2])
            except ValueError as exc:
                raise PhnParseError(f"{path}:{lineno}: {exc}") from exc
            if segments and seg.begin < segments[-1].end:
                raise PhnParseError(
                    f"{path}:{lineno}: segment {seg} overlaps or precedes previous {segments[-1]}"
                )
            segments.append(seg)
    return segments


def load_voiced_set(path) -> frozenset[str]:
    """Read a voiced-set file: one phone label per line."""
    with open(path, "r", encoding="utf-8") as fh:
        labels = {line.strip() for line in fh if line.strip()}
    if not labels:
        raise CorpusError(f"{path}: voiced-set file is empty")
    return frozenset(labels)


def extract_voiced_regions(
    utt: Utterance,
    voiced_set: frozenset[str] = DEFAULT_VOICED_SET,
    min_length: int | None = None,
) -> list[VoicedRegion]:
    """Merge maximal runs of contiguous voiced segments into regions.

    Runs shorter than ``min_length`` (default: one maximum pitch period)
    are dropped; no complete pitch cycle fits in them.
    """
    if utt.segments is None:
        raise ValueError(f"utterance {utt.utterance_id} has no phone segments")
    if min_length is None:
        min_length = max_period(utt.sample_rate)

    regions: list[VoicedRegion] = []
    run_start: int | None = None
    run_end = 0

    def close_run():
        nonlocal run_start
        if run_start is not None and run_end - run_start >= min_length:
            regions.append(
                VoicedRegion(
                    samples=utt.samples[run_start:run_end].copy(),
                    source_offset=run_start,
                    sample_rate=utt.sample_rate,
                    region_id=f"{utt.speaker_id}/{utt.utterance_id}@{run_start}",
                )
            )
        run_start = None

    for seg in utt.segments:
        if seg.phone in voiced_set:
            if run_start is None or seg.begin != run_end:
                close_run()
                run_start = seg.begin
            run_end = seg.end
        else:
            close_run()
    close_run()
    return regions


def split_speakers(
    utterances: list[Utterance],
    n_train: int = 6,
    n_test: int = 2,
    test_pattern: str = "sa",
) -> list[SpeakerSplit]:
    """Group utterances by speaker into disjoint train/test sets.

    Utterance ids starting with ``test_pattern`` (case-insensitive; TIMIT's
    two SA sentences) are placed in the test set first; remaining test slots
    are filled from the end of the id-sorted list. Deterministic.
    """
    by_speaker: dict[str, list[Utterance]] = {}
    for utt in utterances:
        by_speaker.setdefault(utt.speaker_id, []).append(utt)

    splits = []
    for speaker_id in sorted(by_speaker):
        utts = sorted(by_speaker[speaker_id], key=lambda u: u.utterance_id)
        if len(utts) < n_train + n_test:
            raise CorpusError(
                f"speaker {speaker_id} has {len(utts)} utterances, "
                f"needs {n_train + n_test} for a {n_train}/{n_test} split"
            )
        pattern = test_pattern.lower()
        test = [u for u in utts if pattern and u.utterance_id.lower().startswith(pattern)][:n_test]
        rest = [u for u in utts if all(u is not t for t in test)]
        while len(test) < n_test:
            test.append(rest.pop())
        train = rest[:n_train]
        splits.append(SpeakerSplit(speaker_id, train, sorted(test, key=lambda u: u.utterance_id)))
    return splits


def save_corpus(utterances: list[Utterance], root) -> None:
    """Write utterances to the on-disk corpus layout (wav + phn + gci)."""
    root = Path(root)
    for utt in utterances:
        spk_dir = root / utt.speaker_id
        spk_dir.mkdir(parents=True, exist_ok=True)
        write_wav(spk_dir / f"{utt.utterance_id}.wav", utt.samples, utt.sample_rate)
        if utt.segments is not None:
            with open(spk_dir / f"{utt.utterance_id}.phn", "w", encoding="utf-8") as fh:
                for seg in utt.segments:
                    fh.write(f"{seg.begin} {seg.end} {seg.phone}\n")
        if utt.impulses is not None:
            with open(spk_dir / f"{utt.utterance_id}.gci", "w", encoding="utf-8") as fh:
                for pos in utt.impulses:
                    fh.write(f"{int(pos)}\n")


def load_timit_utterances(root, n_male: int = 16, n_female: int = 14, seed: int = 42) -> list[Utterance]:
    """Load a random gender-balanced speaker subset from a TIMIT-layout tree.

    Expects ``root/{TRAIN,TEST}/DR*/<speaker>/<utt>.{wav,phn}`` with speaker
    directories named M* or F*. The .wav files must already be RIFF/WAVE
    (SPHERE originals are rejected by load_wav with a conversion hint).
    """
    root = Path(root)
    speaker_dirs = sorted(
        (p for p in root.glob("*/*/*") if p.is_dir() and p.name[:1].upper() in ("M", "F")),
        key=lambda p: p.name,
    )
    males = [p for p in speaker_dirs if p.name[:1].upper() == "M"]
    females = [p for p in speaker_dirs if p.name[:1].upper() == "F"]
    if len(males) < n_male or len(females) < n_female:
        raise CorpusError(
            f"{root}: found {len(males)} male / {len(females)} female speakers, "
            f"need {n_male}/{n_female}"
        )
    rng = np.random.default_rng(seed)
    chosen = [males[i] for i in rng.choice(len(males), size=n_male, replace=False)]
    chosen += [females[i] for i in rng.choice(len(females), size=n_female, replace=False)]

    utterances = []
    for spk_dir in chosen:
        wavs = sorted(list(spk_dir.glob("*.wav")) + list(spk_dir.glob("*.WAV")))
        for wav_path in wavs:
            utt = load_wav(wav_path, speaker_id=spk_dir.name, utterance_id=wav_path.stem.lower())
            for suffix in (".phn", ".PHN"):
                phn = wav_path.with_suffix(suffix)
                if phn.exists():
                    utt.segments = parse_phn(phn)
                    break
            utterances.append(utt)
    return utterances


def load_corpus(root) -> list[Utterance]:
    """Load every wav under root/<speaker>/, attaching labels and metadata."""
    root = Path(root)
    if not root.is_dir():
        raise CorpusError(f"corpus root {root} is not a directory")
    utterances = []
    for wav_path in sorted(root.glob("*/*.wav")):
        utt = load_wav(wav_path)
        phn_path = wav_path.with_suffix(".phn")
        if phn_path.exists():
            utt.segments = parse_phn(phn_path)
        gci_path = wav_path.with_suffix(".gci")
        if gci_path.exists():
            with open(gci_path, "r", encoding="utf-8") as fh:
                utt.impulses = np.array([int(line) for line in fh if line.strip()], dtype=np.int64)
        utterances.append(utt)
    if not utterances:
        raise CorpusError(f"no wav files found under {root}")
    return utterances

import wave

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spkid.corpus import (
    DEFAULT_VOICED_SET,
    CorpusError,
    MalformedWavError,
    PhnParseError,
    PhoneSegment,
    UnsupportedWavError,
    Utterance,
    extract_voiced_regions,
    load_corpus,
    load_voiced_set,
    load_wav,
    max_period,
    min_period,
    parse_phn,
    save_corpus,
    split_speakers,
    write_wav,
)
from spkid.synth import synth_corpus


def write_raw_wav(path, ints, rate=16000, channels=1, sampwidth=2):
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(channels)
        wf.setsampwidth(sampwidth)
        wf.setframerate(rate)
        wf.writeframes(np.asarray(ints, dtype="<i2").tobytes())


def make_utt(n=4000, segments=None, speaker="s", utt="u"):
    return Utterance(np.zeros(n), 16000, speaker, utt, segments=segments)


def test_period_bounds_at_16k():
    assert min_period(16000) == 40
    assert max_period(16000) == 267
    assert min_period(8000) == 20


def test_load_wav_pcm_scaling(tmp_path):
    path = tmp_path / "t.wav"
    write_raw_wav(path, [0, 16384, -16384])
    utt = load_wav(path)
    assert utt.samples.tolist() == [0.0, 0.5, -0.5]
    assert utt.sample_rate == 16000
    assert utt.utterance_id == "t"


def test_load_wav_rejects_sphere(tmp_path):
    path = tmp_path / "sphere.wav"
    path.write_bytes(b"NIST_1A\n   1024\n" + b"\x00" * 64)
    with pytest.raises(UnsupportedWavError, match="SPHERE"):
        load_wav(path)


def test_load_wav_rejects_garbage(tmp_path):
    path = tmp_path / "bad.wav"
    path.write_bytes(b"this is not audio at all")
    with pytest.raises(MalformedWavError):
        load_wav(path)


def test_load_wav_rejects_truncated_riff(tmp_path):
    path = tmp_path / "trunc.wav"
    path.write_bytes(b"RIFF\x04\x00\x00\x00WAVE")
    with pytest.raises(MalformedWavError):
        load_wav(path)


def test_load_wav_rejects_stereo(tmp_path):
    path = tmp_path / "st.wav"
    write_raw_wav(path, [0, 0, 0, 0], channels=2)
    with pytest.raises(UnsupportedWavError, match="mono"):
        load_wav(path)


def test_load_wav_rejects_8bit(tmp_path):
    path = tmp_path / "b8.wav"
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(1)
        wf.setframerate(16000)
        wf.writeframes(b"\x00\x01\x02")
    with pytest.raises(UnsupportedWavError, match="16-bit"):
        load_wav(path)


def test_load_wav_rejects_float_format(tmp_path):
    # hand-rolled RIFF with IEEE-float format code 3
    import struct

    data = struct.pack("<4f", 0.0, 0.1, -0.1, 0.2)
    fmt = struct.pack("<HHIIHH", 3, 1, 16000, 64000, 4, 32)
    body = b"WAVEfmt " + struct.pack("<I", len(fmt)) + fmt + b"data" + struct.pack("<I", len(data)) + data
    path = tmp_path / "f32.wav"
    path.write_bytes(b"RIFF" + struct.pack("<I", len(body)) + body)
    with pytest.raises((UnsupportedWavError, MalformedWavError)):
        load_wav(path)


def test_wav_round_trip_via_synth(tmp_path):
    utt = synth_corpus(2, 1, seed=11)[0]
    assert utt.samples.size > 1000
    path = tmp_path / "rt.wav"
    write_wav(path, utt.samples, utt.sample_rate)
    back = load_wav(path)
    assert back.sample_rate == utt.sample_rate
    assert np.array_equal(back.samples, utt.samples)


def test_parse_phn_basic(tmp_path):
    path = tmp_path / "a.phn"
    path.write_text("0 3050 h#\n3050 4000 iy\n")
    segs = parse_phn(path)
    assert segs[0] == PhoneSegment(0, 3050, "h#")
    assert segs[1].phone == "iy"


def test_parse_phn_empty(tmp_path):
    path = tmp_path / "e.phn"
    path.write_text("")
    assert parse_phn(path) == []


def test_parse_phn_overlap(tmp_path):
    path = tmp_path / "o.phn"
    path.write_text("0 10 a\n5 12 b\n")
    with pytest.raises(PhnParseError, match="overlap"):
        parse_phn(path)


def test_parse_phn_bad_line_reports_number(tmp_path):
    path = tmp_path / "b.phn"
    path.write_text("0 10 a\nnonsense\n")
    with pytest.raises(PhnParseError, match=":2"):
        parse_phn(path)


def test_utterance_validation():
    with pytest.raises(ValueError):
        Utterance(np.array([]), 16000, "s", "u")
    with pytest.raises(ValueError):
        Utterance(np.array([2.0]), 16000, "s", "u")
    with pytest.raises(ValueError):
        Utterance(np.zeros(10), 0, "s", "u")
    with pytest.raises(ValueError):
        make_utt(100, [PhoneSegment(0, 50, "a"), PhoneSegment(40, 80, "b")])
    with pytest.raises(ValueError):
        make_utt(100, [PhoneSegment(0, 200, "a")])


def test_extract_voiced_regions_merges_runs():
    segs = [
        PhoneSegment(0, 500, "h#"),
        PhoneSegment(500, 900, "iy"),
        PhoneSegment(900, 1400, "ih"),
        PhoneSegment(1400, 1700, "s"),
        PhoneSegment(1700, 2400, "aa"),
    ]
    utt = make_utt(2400, segs)
    regions = extract_voiced_regions(utt, frozenset({"iy", "ih", "aa"}))
    assert [(r.source_offset, len(r)) for r in regions] == [(500, 900), (1700, 700)]
    assert regions[0].region_id.endswith("@500")


def test_extract_voiced_regions_none_voiced():
    utt = make_utt(1000, [PhoneSegment(0, 1000, "h#")])
    assert extract_voiced_regions(utt, DEFAULT_VOICED_SET) == []


def test_extract_voiced_regions_drops_short_runs():
    # 100 samples < one max pitch period (267 at 16 kHz)
    utt = make_utt(1000, [PhoneSegment(0, 100, "aa"), PhoneSegment(100, 1000, "h#")])
    assert extract_voiced_regions(utt, frozenset({"aa"})) == []


def test_extract_voiced_regions_requires_segments():
    with pytest.raises(ValueError):
        extract_voiced_regions(make_utt(), DEFAULT_VOICED_SET)


def test_extract_voiced_regions_breaks_at_gaps():
    # voiced labels that are not sample-contiguous do not merge
    segs = [PhoneSegment(0, 400, "iy"), PhoneSegment(500, 900, "ih")]
    utt = make_utt(900, segs)
    regions = extract_voiced_regions(utt, frozenset({"iy", "ih"}))
    assert [(r.source_offset, len(r)) for r in regions] == [(0, 400), (500, 400)]


@given(
    st.lists(
        st.tuples(st.integers(1, 500), st.sampled_from(["aa", "s", "h#", "iy"])),
        min_size=1,
        max_size=12,
    )
)
@settings(max_examples=60, deadline=None)
def test_extract_voiced_regions_invariants(layout):
    segs = []
    cursor = 0
    for length, phone in layout:
        segs.append(PhoneSegment(cursor, cursor + length, phone))
        cursor += length
    utt = make_utt(cursor, segs)
    regions = extract_voiced_regions(utt, frozenset({"aa", "iy"}))
    total = 0
    prev_end = 0
    for r in regions:
        assert r.source_offset >= prev_end
        assert r.source_offset + len(r) <= utt.samples.size
        assert len(r) >= max_period(16000)
        prev_end = r.source_offset + len(r)
        total += len(r)
    assert total <= utt.samples.size


def test_split_speakers_default_and_sa():
    utts = [make_utt(100, None, "spk", f"u{i}") for i in range(8)]
    (split,) = split_speakers(utts)
    assert [u.utterance_id for u in split.train_utterances] == [f"u{i}" for i in range(6)]
    assert [u.utterance_id for u in split.test_utterances] == ["u6", "u7"]

    utts = [make_utt(100, None, "spk", name) for name in ["sa1", "sa2", "si1", "sx1", "sx2", "sx3", "sx4", "sx5"]]
    (split,) = split_speakers(utts)
    assert [u.utterance_id for u in split.test_utterances] == ["sa1", "sa2"]
    assert len(split.train_utterances) == 6


def test_split_speakers_too_few_names_speaker():
    utts = [make_utt(100, None, "spk9", f"u{i}") for i in range(5)]
    with pytest.raises(CorpusError, match="spk9"):
        split_speakers(utts)


def test_voiced_set_file(tmp_path):
    path = tmp_path / "v.txt"
    path.write_text("aa\niy\n\nv\n")
    assert load_voiced_set(path) == frozenset({"aa", "iy", "v"})
    empty = tmp_path / "e.txt"
    empty.write_text("\n")
    with pytest.raises(CorpusError):
        load_voiced_set(empty)


def test_corpus_dir_round_trip(tmp_path):
    utts = synth_corpus(2, 2, seed=3)
    save_corpus(utts, tmp_path)
    back = load_corpus(tmp_path)
    assert len(back) == len(utts)
    orig = {(u.speaker_id, u.utterance_id): u for u in utts}
    for b in back:
        o = orig[(b.speaker_id, b.utterance_id)]
        assert np.array_equal(b.samples, o.samples)
        assert b.segments == o.segments
        assert np.array_equal(b.impulses, o.impulses)


def test_load_corpus_missing(tmp_path):
    with pytest.raises(CorpusError):
        load_corpus(tmp_path / "nope")
    (tmp_path / "empty").mkdir()
    with pytest.raises(CorpusError):
        load_corpus(tmp_path / "empty")

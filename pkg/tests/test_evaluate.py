import io

import pytest

from spkid.evaluate import (
    ExperimentConfig,
    collect_cycles,
    run_experiment,
    sweep_coefficients,
    sweep_to_markdown,
    write_sweep_csv,
)
from spkid.synth import synth_corpus


@pytest.fixture(scope="module")
def corpus6():
    return synth_corpus(6, 8, seed=21)


@pytest.fixture(scope="module")
def report6(corpus6):
    return run_experiment(ExperimentConfig(codebook_sizes=(8, 16), seed=42), utterances=corpus6)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(codebook_sizes=())
    with pytest.raises(ValueError):
        ExperimentConfig(codebook_sizes=(0,))
    with pytest.raises(ValueError):
        ExperimentConfig(coeff_counts=())
    with pytest.raises(ValueError):
        ExperimentConfig(kinds=())


def test_experiment_needs_corpus():
    with pytest.raises(ValueError, match="corpus_root"):
        run_experiment(ExperimentConfig())


def test_accuracies_and_fusion_present(report6):
    for kind in ("psdct", "mfcc", "fused"):
        assert set(report6.accuracies[kind]) == {8, 16}
        for acc in report6.accuracies[kind].values():
            assert 0.0 <= acc <= 1.0
    assert report6.accuracies["psdct"][16] >= 5 / 6
    assert report6.accuracies["mfcc"][16] >= 5 / 6
    for size in (8, 16):
        top = max(report6.accuracies["psdct"][size], report6.accuracies["mfcc"][size])
        assert report6.accuracies["fused"][size] >= top - 1e-12
    assert set(report6.alphas) == {8, 16}


def test_report_internal_consistency(report6):
    report6.validate()
    trials = [t for t in report6.trials if t.kind == "psdct" and t.codebook_size == 16]
    assert len(trials) == 6
    for t in trials:
        assert t.predicted == t.scores[0][0]
        ranks = [s[1] for s in t.scores]
        assert ranks == sorted(ranks)
        assert t.n_vectors > 0


def test_experiment_is_deterministic(corpus6):
    config = ExperimentConfig(codebook_sizes=(8,), seed=42)
    a = run_experiment(config, utterances=corpus6)
    b = run_experiment(config, utterances=corpus6)
    assert a == b


def test_markdown_and_csv_outputs(report6):
    md = report6.to_markdown()
    assert "| codebook size |" in md
    assert "Reference (30-speaker TIMIT protocol" in md
    buf = io.StringIO()
    report6.write_csv(buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0].startswith("test_speaker,kind,codebook_size,rank")
    # one row per candidate per trial: (2 kinds * 2 sizes + fused * 2 sizes) * 6 speakers * 6 candidates
    assert len(lines) - 1 == 6 * 6 * 6


def test_speaker_with_too_few_utterances_is_named():
    utts = synth_corpus(2, 8, seed=3)
    short = [u for u in utts if not (u.speaker_id == "spk01" and u.utterance_id == "u07")]
    with pytest.raises(Exception, match="spk01"):
        run_experiment(ExperimentConfig(codebook_sizes=(8,)), utterances=short)


def test_sweep_mec_monotone_and_accuracy_plateau(corpus6):
    config = ExperimentConfig(coeff_counts=(10, 15, 20, 25), sweep_codebook_size=16, seed=42)
    rows = sweep_coefficients(config, utterances=corpus6)
    assert [r.n_coeffs for r in rows] == [10, 15, 20, 25]
    mecs = [r.mec_total for r in rows]
    assert all(b >= a - 1e-12 for a, b in zip(mecs, mecs[1:]))
    assert all(0.0 <= m <= 1.0 for m in mecs)
    assert all(r.mec_ac >= r.mec_total - 1e-12 for r in rows)
    # accuracy holds up once enough coefficients are kept (within one trial)
    one_trial = 1.0 / 6.0
    for r in rows[1:]:
        assert r.accuracy >= rows[0].accuracy - one_trial - 1e-12

    md = sweep_to_markdown(rows, 16)
    assert "MEC" in md and "Reference" in md
    buf = io.StringIO()
    write_sweep_csv(buf, rows)
    assert len(buf.getvalue().strip().splitlines()) == 5


def test_collect_cycles_counts(corpus6):
    voiced = ExperimentConfig().effective_voiced_set()
    cycles = collect_cycles(corpus6[:2], voiced)
    assert len(cycles) > 100
    assert all(len(c) >= 40 for c in cycles)

"""Command-line interface.

Subcommands: synth (generate a synthetic corpus), extract (features to CSV),
train (codebooks to a model directory), identify (score test utterances
against a model directory), evaluate (full accuracy report), sweep
(coefficient-count sweep).
"""

from __future__ import annotations

import argparse
import sys
from contextlib import nullcontext
from pathlib import Path

from . import evaluate as ev
from .classify import FusionWeights, fuse, identify, write_fused_csv, write_score_csv
from .corpus import load_corpus, load_voiced_set, save_corpus, split_speakers
from .mfcc import MfccConfig
from .psdct import KIND_MFCC, KIND_PSDCT
from .synth import synth_corpus
from .vq import load_model_dir, save_model_dir, train_codebook


def _add_common(p, model_dir=False):
    p.add_argument("--corpus", required=True, help="corpus root directory")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--voiced-set", help="file with one voiced phone label per line")
    if model_dir:
        p.add_argument("--model-dir", required=True, help="codebook model directory")


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def _config_from_args(args, **overrides) -> ev.ExperimentConfig:
    voiced = frozenset(load_voiced_set(args.voiced_set)) if getattr(args, "voiced_set", None) else None
    return ev.ExperimentConfig(corpus_root=args.corpus, seed=args.seed, voiced_set=voiced, **overrides)


def _out_stream(path):
    return open(path, "w", encoding="utf-8", newline="") if path else nullcontext(sys.stdout)


def cmd_synth(args) -> int:
    utts = synth_corpus(args.speakers, args.utterances, args.seed, args.sample_rate)
    save_corpus(utts, args.corpus)
    n_spk = len({u.speaker_id for u in utts})
    print(f"wrote {len(utts)} utterances for {n_spk} speakers to {args.corpus}")
    return 0


def cmd_extract(args) -> int:
    config = _config_from_args(args, n_coeffs=args.coeffs)
    utts = load_corpus(args.corpus)
    voiced = config.effective_voiced_set()
    if args.epoch_dump:
        from .corpus import extract_voiced_regions
        from .gci import detect_gci, dump_epochs_csv, map_to_peaks

        with open(args.epoch_dump, "w", encoding="utf-8", newline="") as fh:
            fh.write("region_id,epoch,mapped_peak\n")
            for utt in utts:
                for region in extract_voiced_regions(utt, voiced):
                    epochs = detect_gci(region)
                    peaks = map_to_peaks(region, epochs)
                    dump_epochs_csv(fh, region, epochs, peaks)
    with _out_stream(args.report_out) as fh:
        if args.kind == KIND_PSDCT:
            fh.write("speaker,utterance,cycle_index," + ",".join(f"k{i}" for i in range(1, args.coeffs + 1)) + "\n")
            for utt in utts:
                feats = ev.psdct_features(ev.collect_cycles([utt], voiced), args.coeffs)
                for i, f in enumerate(feats):
                    fh.write(f"{utt.speaker_id},{utt.utterance_id},{i}," + ",".join(f"{v:.9g}" for v in f.values) + "\n")
        else:
            mcfg = MfccConfig()
            fh.write("speaker,utterance,frame_index," + ",".join(f"k{i}" for i in range(1, mcfg.n_coeffs + 1)) + "\n")
            for utt in utts:
                feats = ev.collect_mfcc_features([utt], voiced, mcfg)
                for i, f in enumerate(feats):
                    fh.write(f"{utt.speaker_id},{utt.utterance_id},{i}," + ",".join(f"{v:.9g}" for v in f.values) + "\n")
    return 0


def _split_features(config, utts, kind, which):
    voiced = config.effective_voiced_set()
    splits = split_speakers(utts, config.n_train, config.n_test, config.test_pattern)
    out = {}
    for split in splits:
        group = split.train_utterances if which == "train" else split.test_utterances
        if kind == KIND_PSDCT:
            out[split.speaker_id] = ev.psdct_features(ev.collect_cycles(group, voiced), config.n_coeffs)
        else:
            out[split.speaker_id] = ev.collect_mfcc_features(group, voiced, config.mfcc)
    return out


def cmd_train(args) -> int:
    config = _config_from_args(args, n_coeffs=args.coeffs)
    utts = load_corpus(args.corpus)
    kinds = [KIND_PSDCT, KIND_MFCC] if args.kind == "fused" else [args.kind]
    codebooks = []
    for kind in kinds:
        feats = _split_features(config, utts, kind, "train")
        for spk, vectors in sorted(feats.items()):
            codebooks.append(
                train_codebook(vectors, args.codebook_size, seed=args.seed, speaker_id=spk)
            )
    save_model_dir(codebooks, args.model_dir)
    print(f"wrote {len(codebooks)} codebooks (k={args.codebook_size}) to {args.model_dir}")
    return 0


def cmd_identify(args) -> int:
    config = _config_from_args(args, n_coeffs=args.coeffs)
    utts = load_corpus(args.corpus)
    fused_mode = args.kind == "fused"
    if fused_mode and (args.acc_dct is None or args.acc_mfcc is None):
        print("--kind fused requires --acc-dct and --acc-mfcc (accuracies in [0,1])", file=sys.stderr)
        return 2
    kinds = [KIND_PSDCT, KIND_MFCC] if fused_mode else [args.kind]
    test_feats = {kind: _split_features(config, utts, kind, "test") for kind in kinds}
    books = {kind: load_model_dir(args.model_dir, kind=kind) for kind in kinds}
    for kind in kinds:
        if not books[kind]:
            print(f"model dir {args.model_dir} has no {kind} codebooks", file=sys.stderr)
            return 2

    correct = total = 0
    with _out_stream(args.report_out) as fh:
        for spk in sorted(test_feats[kinds[0]]):
            if fused_mode:
                ranked_dct, _ = identify(test_feats[KIND_PSDCT][spk], books[KIND_PSDCT])
                ranked_mfcc, _ = identify(test_feats[KIND_MFCC][spk], books[KIND_MFCC])
                weights = FusionWeights(args.acc_dct, args.acc_mfcc)
                fused, predicted = fuse(ranked_dct, ranked_mfcc, weights)
                write_fused_csv(fh, fused, weights.alpha, test_speaker=spk)
            else:
                ranked, predicted = identify(test_feats[args.kind][spk], books[args.kind])
                write_score_csv(fh, ranked, test_speaker=spk)
            correct += predicted == spk
            total += 1
            print(f"{spk}: predicted {predicted}", file=sys.stderr)
    print(f"identified {correct}/{total} test speakers correctly", file=sys.stderr)
    return 0


def cmd_evaluate(args) -> int:
    kinds = (KIND_PSDCT, KIND_MFCC) if args.kind == "fused" else (args.kind,)
    config = _config_from_args(
        args, n_coeffs=args.coeffs, codebook_sizes=_int_list(args.codebook_size), kinds=kinds
    )
    report = ev.run_experiment(config)
    markdown = report.to_markdown()
    print(markdown)
    if args.report_out:
        out = Path(args.report_out)
        out.with_suffix(".md").write_text(markdown, encoding="utf-8")
        with open(out.with_suffix(".csv"), "w", encoding="utf-8", newline="") as fh:
            report.write_csv(fh)
        print(f"wrote {out.with_suffix('.md')} and {out.with_suffix('.csv')}", file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    config = _config_from_args(
        args, coeff_counts=_int_list(args.coeffs), sweep_codebook_size=args.codebook_size
    )
    rows = ev.sweep_coefficients(config)
    markdown = ev.sweep_to_markdown(rows, args.codebook_size)
    print(markdown)
    if args.report_out:
        out = Path(args.report_out)
        out.with_suffix(".md").write_text(markdown, encoding="utf-8")
        with open(out.with_suffix(".csv"), "w", encoding="utf-8", newline="") as fh:
            ev.write_sweep_csv(fh, rows)
        print(f"wrote {out.with_suffix('.md')} and {out.with_suffix('.csv')}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spkid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--corpus", required=True, help="output corpus directory")
    p.add_argument("--speakers", type=int, default=12)
    p.add_argument("--utterances", type=int, default=8)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--sample-rate", type=int, default=16000)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract", help="dump feature vectors to CSV")
    _add_common(p)
    p.add_argument("--kind", choices=[KIND_PSDCT, KIND_MFCC], default=KIND_PSDCT)
    p.add_argument("--coeffs", type=int, default=15)
    p.add_argument("--report-out", help="output CSV path (default stdout)")
    p.add_argument("--epoch-dump", help="also write a (region_id,epoch,mapped_peak) debug CSV")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train per-speaker codebooks")
    _add_common(p, model_dir=True)
    p.add_argument("--kind", choices=[KIND_PSDCT, KIND_MFCC, "fused"], default="fused",
                   help="fused trains both systems")
    p.add_argument("--codebook-size", type=int, default=32)
    p.add_argument("--coeffs", type=int, default=15)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("identify", help="identify test utterances against a model directory")
    _add_common(p, model_dir=True)
    p.add_argument("--kind", choices=[KIND_PSDCT, KIND_MFCC, "fused"], default=KIND_PSDCT)
    p.add_argument("--coeffs", type=int, default=15)
    p.add_argument("--acc-dct", type=float, help="measured PS-DCT accuracy in [0,1] (fused mode)")
    p.add_argument("--acc-mfcc", type=float, help="measured MFCC accuracy in [0,1] (fused mode)")
    p.add_argument("--report-out", help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("evaluate", help="full train/test report over codebook sizes")
    _add_common(p)
    p.add_argument("--kind", choices=[KIND_PSDCT, KIND_MFCC, "fused"], default="fused",
                   help="fused evaluates both systems plus their combination")
    p.add_argument("--codebook-size", default="16,32,64,128", help="comma-separated sizes")
    p.add_argument("--coeffs", type=int, default=15)
    p.add_argument("--report-out", help="output path prefix (.md and .csv)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="accuracy/energy vs coefficient count")
    _add_common(p)
    p.add_argument("--coeffs", default="10,15,20,25,30,35,40", help="comma-separated counts")
    p.add_argument("--codebook-size", type=int, default=32)
    p.add_argument("--report-out", help="output path prefix (.md and .csv)")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

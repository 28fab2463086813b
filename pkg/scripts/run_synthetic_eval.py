#!/usr/bin/env python3
"""Full synthetic-corpus experiment: accuracy vs codebook size plus fusion.

Generates the corpus in memory, runs both feature systems over sizes
16/32/64/128, and prints the markdown report.
"""

import argparse
import time

from spkid.evaluate import ExperimentConfig, run_experiment
from spkid.synth import synth_corpus


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--speakers", type=int, default=12)
    parser.add_argument("--utterances", type=int, default=8)
    parser.add_argument("--corpus-seed", type=int, default=7)
    parser.add_argument("--seed", type=int, default=42, help="codebook training seed")
    parser.add_argument("--sizes", default="16,32,64,128")
    parser.add_argument("--coeffs", type=int, default=15)
    parser.add_argument("--report-out", help="write the markdown report here too")
    args = parser.parse_args()

    sizes = tuple(int(s) for s in args.sizes.split(","))
    start = time.perf_counter()
    corpus = synth_corpus(args.speakers, args.utterances, args.corpus_seed)
    config = ExperimentConfig(codebook_sizes=sizes, n_coeffs=args.coeffs, seed=args.seed)
    result = run_experiment(config, utterances=corpus)
    markdown = result.to_markdown()
    print(markdown)
    print(f"total time: {time.perf_counter() - start:.1f}s")
    if args.report_out:
        with open(args.report_out, "w", encoding="utf-8") as fh:
            fh.write(markdown)


if __name__ == "__main__":
    main()

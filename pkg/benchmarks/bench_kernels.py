#!/usr/bin/env python3
"""Time the compiled kernels against the pure-Python fallback.

Runs each kernel on synthetic workloads sized like real use (metric
scoring, BPE learning and application, LM scoring) and prints one table
row per kernel with both timings and the speedup factor.  The compiled
column is skipped when the extension is not built.
"""

import argparse
import random
import time

from mtstack._kernels import _pyimpl

try:
    from mtstack._kernels import _speedups
except ImportError:
    _speedups = None

from mtstack.bpe import END_OF_WORD, learn_bpe
from mtstack.lm import _padded, train_lm

VOCAB = [
    "virus", "mask", "dose", "care", "hand", "soap", "safe", "stay",
    "home", "test", "ward", "nurse", "fever", "cough", "wash", "clean",
]


def best_of(repeat, func):
    timings = []
    for _ in range(repeat):
        started = time.perf_counter()
        func()
        timings.append(time.perf_counter() - started)
    return min(timings)


def build_workloads(scale, seed):
    rng = random.Random(seed)
    lines = [
        " ".join(rng.choice(VOCAB) for _ in range(rng.randint(4, 12)))
        for _ in range(40 * scale)
    ]
    tokens = " ".join(lines).split()
    text = "".join(lines)[: 3000 * scale]

    bpe_words = []
    bpe_freqs = []
    for word in set(tokens):
        bpe_words.append(tuple(word[:-1]) + (word[-1] + END_OF_WORD,))
        bpe_freqs.append(rng.randint(1, 400))

    model = learn_bpe(lines, 120)
    apply_words = [
        tuple(word[:-1]) + (word[-1] + END_OF_WORD,)
        for word in (rng.choice(tokens) for _ in range(200 * scale))
    ]

    lm = train_lm(lines, order=3, smoothing="witten_bell")
    sequences = [_padded(lm, line)[1] for line in lines]

    return {
        "count_token_ngrams": lambda impl: impl.count_token_ngrams(tokens, 4),
        "count_char_ngrams": lambda impl: impl.count_char_ngrams(text, 6),
        "count_adjacent_pairs": lambda impl: impl.count_adjacent_pairs(bpe_words, bpe_freqs),
        "apply_merges": lambda impl: [
            impl.apply_merges(word, model._ranks) for word in apply_words
        ],
        "sequence_log2prob": lambda impl: [
            impl.sequence_log2prob(seq, lm.order - 1, lm.prob_table, lm.backoff_table)
            for seq in sequences
        ],
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing repetitions; the best run counts (default 5)")
    parser.add_argument("--scale", type=int, default=10,
                        help="workload size multiplier (default 10)")
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    workloads = build_workloads(args.scale, args.seed)

    name_width = max(len(name) for name in workloads)
    header = f"{'kernel':<{name_width}}  {'python ms':>10}  {'cython ms':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, workload in workloads.items():
        python_s = best_of(args.repeat, lambda: workload(_pyimpl))
        if _speedups is None:
            print(f"{name:<{name_width}}  {python_s * 1000:>10.2f}  {'n/a':>10}  {'n/a':>8}")
            continue
        cython_s = best_of(args.repeat, lambda: workload(_speedups))
        speedup = python_s / cython_s if cython_s > 0 else float("inf")
        print(
            f"{name:<{name_width}}  {python_s * 1000:>10.2f}  "
            f"{cython_s * 1000:>10.2f}  {speedup:>7.1f}x"
        )
    if _speedups is None:
        print("\ncompiled extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()

"""Benchmark the two Gibbs sweep kernels and verify they agree bit-for-bit.

Usage: python benchmarks/bench_gibbs.py [--docs 6000] [--doc-len 8]
       [--vocab 200] [--topics 5] [--sweeps 20] [--seed 0]

The workload defaults approximate production volume: 6000 short comments.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from reputex.topics import LdaHyperparams, gibbs_sweep, init_model, kernels
from reputex.textprep import EncodedCorpus, EncodedDocument, Vocabulary


def synthetic_corpus(docs: int, doc_len: int, vocab: int, seed: int) -> EncodedCorpus:
    rng = np.random.default_rng(seed)
    terms = tuple(f"w{i}" for i in range(vocab))
    vocabulary = Vocabulary(
        terms=terms,
        index={t: i for i, t in enumerate(terms)},
        corpus_term_counts=tuple([1] * vocab),
    )
    documents = tuple(
        EncodedDocument(
            review=None,
            token_ids=tuple(int(w) for w in rng.integers(0, vocab, size=doc_len)),
        )
        for _ in range(docs)
    )
    return EncodedCorpus(vocabulary=vocabulary, documents=documents)


def time_backend(name: str, corpus, hp, sweeps: int):
    kernel = kernels.get_backend(name)
    state = init_model(corpus, hp)
    start = time.perf_counter()
    for _ in range(sweeps):
        gibbs_sweep(state, kernel=kernel)
    elapsed = time.perf_counter() - start
    return elapsed / sweeps, state


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docs", type=int, default=6000)
    parser.add_argument("--doc-len", type=int, default=8)
    parser.add_argument("--vocab", type=int, default=200)
    parser.add_argument("--topics", type=int, default=5)
    parser.add_argument("--sweeps", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    corpus = synthetic_corpus(args.docs, args.doc_len, args.vocab, args.seed)
    hp = LdaHyperparams(K=args.topics, iterations=0, seed=args.seed)
    tokens = corpus.total_tokens
    print(
        f"corpus: {args.docs} docs x {args.doc_len} tokens, V={args.vocab}, "
        f"K={args.topics}, {tokens} tokens total"
    )

    results = {}
    states = {}
    for name in kernels.available_backends():
        per_sweep, state = time_backend(name, corpus, hp, args.sweeps)
        results[name] = per_sweep
        states[name] = state
        rate = tokens / per_sweep / 1e6
        print(
            f"{name:>8}: {per_sweep * 1000:8.2f} ms/sweep   "
            f"{rate:6.1f} M tokens/s   (1000 sweeps ~ {per_sweep * 1000:.0f} s)"
        )

    if len(states) == 2:
        a, b = states.values()
        identical = (
            a.rng_state == b.rng_state
            and np.array_equal(a.z, b.z)
            and np.array_equal(a.n_kw, b.n_kw)
        )
        print(f"backends agree bit-for-bit: {identical}")
        if not identical:
            return 1
        fast, slow = min(results.values()), max(results.values())
        print(f"speedup: x{slow / fast:.1f}")
    else:
        print("only one backend available; no comparison")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

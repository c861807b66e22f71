"""LDA topic modeling via collapsed Gibbs sampling.

The model: each document is a mixture over K latent topics, each topic a
distribution over the vocabulary. Inference integrates out both mixtures and
resamples per-token topic assignments from the count-based conditional

    p(z = k) ∝ (n_dk + α) · (n_kw + β) / (n_k + V·β)

with the resampled token's own counts removed. Training is strictly
sequential in a fixed (document, position) scan order, so a (corpus,
hyperparameters) pair fully determines the result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from ..rng import SplitMix64
from ..textprep import EncodedCorpus
from . import kernels


class EmptyCorpus(ValueError):
    """No documents or no vocabulary to model."""


class IndexOutOfRange(IndexError):
    pass


@dataclass(frozen=True)
class LdaHyperparams:
    """Gibbs-LDA settings. alpha defaults to 50/K, the usual symmetric prior."""

    K: int = 5
    alpha: float | None = None
    beta: float = 0.01
    iterations: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.alpha is None:
            object.__setattr__(self, "alpha", 50.0 / self.K)
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")


@dataclass
class TopicModelState:
    """Topic assignments plus the sufficient statistics driving the sampler.

    Documents are flattened: token t of document d lives at position
    doc_offsets[d] + t in token_words and z.
    """

    hyperparams: LdaHyperparams
    corpus: EncodedCorpus
    token_words: np.ndarray  # int32 [T]
    doc_offsets: np.ndarray  # int64 [D+1]
    z: np.ndarray  # int32 [T]
    n_dk: np.ndarray  # int32 [D, K]
    n_kw: np.ndarray  # int32 [K, V]
    n_k: np.ndarray  # int32 [K]
    rng_state: int

    @property
    def num_documents(self) -> int:
        return len(self.doc_offsets) - 1

    @property
    def num_topics(self) -> int:
        return self.hyperparams.K

    @property
    def vocab_size(self) -> int:
        return self.n_kw.shape[1]

    def doc_lengths(self) -> np.ndarray:
        return np.diff(self.doc_offsets)


def init_model(corpus: EncodedCorpus, hp: LdaHyperparams) -> TopicModelState:
    """Assign every token a uniform topic from the seeded generator."""
    if not corpus.documents or len(corpus.vocabulary) == 0:
        raise EmptyCorpus("corpus has no documents or an empty vocabulary")
    K = hp.K
    V = len(corpus.vocabulary)
    D = len(corpus.documents)
    lengths = [len(doc) for doc in corpus.documents]
    offsets = np.zeros(D + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    T = int(offsets[-1])
    token_words = np.fromiter(
        (w for doc in corpus.documents for w in doc.token_ids), dtype=np.int32, count=T
    )
    rng = SplitMix64(hp.seed)
    z = np.fromiter((rng.randbelow(K) for _ in range(T)), dtype=np.int32, count=T)
    n_dk = np.zeros((D, K), dtype=np.int32)
    n_kw = np.zeros((K, V), dtype=np.int32)
    n_k = np.zeros(K, dtype=np.int32)
    for d in range(D):
        for t in range(offsets[d], offsets[d + 1]):
            k = z[t]
            w = token_words[t]
            n_dk[d, k] += 1
            n_kw[k, w] += 1
            n_k[k] += 1
    return TopicModelState(
        hyperparams=hp,
        corpus=corpus,
        token_words=token_words,
        doc_offsets=offsets,
        z=z,
        n_dk=n_dk,
        n_kw=n_kw,
        n_k=n_k,
        rng_state=rng.state,
    )


def full_conditional(state: TopicModelState, d: int, i: int) -> np.ndarray:
    """Conditional topic distribution for token i of document d.

    Counts are evaluated with that token removed. Pure: does not mutate the
    state. Returns a length-K probability vector summing to 1.
    """
    if not 0 <= d < state.num_documents:
        raise IndexOutOfRange(f"document index {d} out of range")
    start, end = int(state.doc_offsets[d]), int(state.doc_offsets[d + 1])
    if not 0 <= i < end - start:
        raise IndexOutOfRange(f"token position {i} out of range for document {d}")
    t = start + i
    w = int(state.token_words[t])
    k_old = int(state.z[t])
    hp = state.hyperparams
    nd = state.n_dk[d].astype(np.float64)
    nw = state.n_kw[:, w].astype(np.float64)
    nk = state.n_k.astype(np.float64)
    nd[k_old] -= 1
    nw[k_old] -= 1
    nk[k_old] -= 1
    weights = (nd + hp.alpha) * (nw + hp.beta) / (nk + state.vocab_size * hp.beta)
    return weights / weights.sum()


def gibbs_sweep(state: TopicModelState, kernel=None) -> TopicModelState:
    """Resample every token once, in the fixed scan order; returns the state."""
    sweep = kernel.sweep if kernel is not None else kernels.sweep
    state.rng_state = sweep(
        state.token_words,
        state.doc_offsets,
        state.z,
        state.n_dk,
        state.n_kw,
        state.n_k,
        state.hyperparams.alpha,
        state.hyperparams.beta,
        state.rng_state,
    )
    return state


def train(corpus: EncodedCorpus, hp: LdaHyperparams, kernel=None) -> TopicModelState:
    """init_model followed by hp.iterations sweeps."""
    state = init_model(corpus, hp)
    for _ in range(hp.iterations):
        gibbs_sweep(state, kernel=kernel)
    return state


def phi(state: TopicModelState) -> np.ndarray:
    """Smoothed topic-term estimates: (n_kw + β) / (n_k + V·β), rows sum to 1."""
    hp = state.hyperparams
    num = state.n_kw + hp.beta
    den = state.n_k + state.vocab_size * hp.beta
    return num / den[:, None]


def theta(state: TopicModelState) -> np.ndarray:
    """Smoothed document-topic estimates: (n_dk + α) / (N_d + K·α).

    Empty documents get the uniform prior mean row.
    """
    hp = state.hyperparams
    num = state.n_dk + hp.alpha
    den = state.doc_lengths() + hp.K * hp.alpha
    return num / den[:, None]


def log_joint(state: TopicModelState) -> float:
    """Collapsed log joint log P(w, z | α, β), Dirichlet-multinomial form.

    Invariant under any relabeling of topics together with their counts.
    """
    hp = state.hyperparams
    K = hp.K
    V = state.vocab_size
    D = state.num_documents
    lengths = state.doc_lengths()
    topic_side = (
        K * gammaln(V * hp.beta)
        - gammaln(state.n_k + V * hp.beta).sum()
        + gammaln(state.n_kw + hp.beta).sum()
        - K * V * gammaln(hp.beta)
    )
    doc_side = (
        D * gammaln(K * hp.alpha)
        - gammaln(lengths + K * hp.alpha).sum()
        + gammaln(state.n_dk + hp.alpha).sum()
        - D * K * gammaln(hp.alpha)
    )
    return float(topic_side + doc_side)


@dataclass(frozen=True)
class TopicTerm:
    term: str
    probability: float


@dataclass(frozen=True)
class TopicReport:
    """Per topic, the ranked surviving (term, probability) list."""

    topics: tuple[tuple[TopicTerm, ...], ...]

    def to_payload(self) -> list:
        """JSON-ready shape used by the store, the API, and the CLI."""
        return [
            [{"term": t.term, "probability": t.probability} for t in topic]
            for topic in self.topics
        ]


def report_from_phi(
    phi_matrix: np.ndarray, terms, M: int = 6, min_prob: float = 0.02
) -> TopicReport:
    """Rank each topic's terms by probability, truncate at M, apply the cutoff.

    Terms are ordered by probability descending with term id ascending as
    tiebreak; entries below min_prob are dropped after truncation, so a topic
    may list fewer than M terms.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if not 0.0 <= min_prob < 1.0:
        raise ValueError("min_prob must be in [0, 1)")
    topics = []
    for row in np.asarray(phi_matrix, dtype=np.float64):
        order = sorted(range(len(row)), key=lambda wid: (-row[wid], wid))
        kept = [
            TopicTerm(term=terms[wid], probability=float(row[wid]))
            for wid in order[:M]
            if row[wid] >= min_prob
        ]
        topics.append(tuple(kept))
    return TopicReport(topics=tuple(topics))


def top_terms(state: TopicModelState, M: int = 6, min_prob: float = 0.02) -> TopicReport:
    """The report over the state's final sample (no cross-sample averaging)."""
    return report_from_phi(phi(state), state.corpus.vocabulary.terms, M=M, min_prob=min_prob)

"""Raw review text to encoded bag-of-words corpus.

Tokenization splits on Unicode non-letter boundaries (so digit runs and
punctuation never enter tokens), lowercases, drops short tokens and
stopwords. Vocabulary ids are dense 0..V-1 in first-appearance order, which
keeps the whole pipeline deterministic for a fixed review order.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from importlib import resources

from .domain import Review

# Maximal runs of Unicode letters: \w minus digits and underscore.
_LETTER_RUN_RE = re.compile(r"[^\W\d_]+", re.UNICODE)


class EmptyVocabulary(ValueError):
    """Nothing survived tokenization and the min_count threshold."""


def load_stopwords(path=None) -> frozenset[str]:
    """Read a stopword file: one lowercase term per line, # comments allowed.

    With no path, returns the bundled Portuguese list.
    """
    if path is None:
        text = (
            resources.files("reputex").joinpath("data/stopwords_pt.txt").read_text("utf-8")
        )
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


def _strip_accents(token: str) -> str:
    decomposed = unicodedata.normalize("NFD", token)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    min_token_length: int = 2
    stopwords: frozenset[str] = field(default_factory=load_stopwords)
    keep_accents: bool = True

    def __post_init__(self):
        if self.min_token_length < 1:
            raise ValueError("min_token_length must be >= 1")


def tokenize(text: str, config: TokenizerConfig | None = None) -> list[str]:
    """Split text into surviving content tokens."""
    if config is None:
        config = TokenizerConfig()
    stopwords = config.stopwords
    if not config.keep_accents:
        stopwords = frozenset(_strip_accents(w) for w in stopwords)
    out = []
    for token in _LETTER_RUN_RE.findall(text):
        if config.lowercase:
            token = token.lower()
        if not config.keep_accents:
            token = _strip_accents(token)
        if len(token) < config.min_token_length:
            continue
        if token.lower() in stopwords:
            continue
        out.append(token)
    return out


@dataclass(frozen=True)
class Vocabulary:
    """Dense integer-indexed term set with corpus-wide occurrence totals."""

    terms: tuple[str, ...]
    index: dict[str, int]
    corpus_term_counts: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.terms)


def build_vocabulary(token_lists, min_count: int = 1) -> Vocabulary:
    """Collect distinct terms in first-appearance order, dropping rare ones.

    Raises EmptyVocabulary when no term reaches min_count.
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    order: list[str] = []
    counts: dict[str, int] = {}
    for tokens in token_lists:
        for token in tokens:
            if token not in counts:
                counts[token] = 0
                order.append(token)
            counts[token] += 1
    survivors = [t for t in order if counts[t] >= min_count]
    if not survivors:
        raise EmptyVocabulary(f"no term appears at least {min_count} time(s)")
    return Vocabulary(
        terms=tuple(survivors),
        index={t: i for i, t in enumerate(survivors)},
        corpus_term_counts=tuple(counts[t] for t in survivors),
    )


@dataclass(frozen=True)
class EncodedDocument:
    review: Review | None
    token_ids: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.token_ids)


@dataclass(frozen=True)
class EncodedCorpus:
    vocabulary: Vocabulary
    documents: tuple[EncodedDocument, ...]

    @property
    def total_tokens(self) -> int:
        return sum(len(d) for d in self.documents)

    def decode(self, doc: EncodedDocument) -> list[str]:
        return [self.vocabulary.terms[i] for i in doc.token_ids]


def encode_documents(
    token_lists: list[list[str]], min_count: int = 1, reviews: list[Review] | None = None
) -> EncodedCorpus:
    """Encode pre-tokenized documents against a vocabulary built from them.

    Tokens below min_count are dropped from documents; empty documents are
    retained so document indexes stay aligned with the inputs.
    """
    vocab = build_vocabulary(token_lists, min_count=min_count)
    docs = []
    for i, tokens in enumerate(token_lists):
        ids = tuple(vocab.index[t] for t in tokens if t in vocab.index)
        review = reviews[i] if reviews is not None else None
        docs.append(EncodedDocument(review=review, token_ids=ids))
    return EncodedCorpus(vocabulary=vocab, documents=tuple(docs))


def encode_corpus(
    reviews: list[Review],
    config: TokenizerConfig | None = None,
    min_count: int = 1,
) -> EncodedCorpus:
    """One review = one document; documents align index-wise with the input."""
    token_lists = [tokenize(r.description, config) for r in reviews]
    return encode_documents(token_lists, min_count=min_count, reviews=reviews)

from __future__ import annotations

from datetime import date, datetime, timezone

import pytest

from reputex.domain import Review, ReviewClassification
from reputex.fixture_site import default_spec, generate_site, serve_fixture
from reputex.textprep import EncodedCorpus, EncodedDocument, Vocabulary

FETCHED_AT = datetime(2018, 7, 1, 12, 0, 0, tzinfo=timezone.utc)


def make_review(
    slug="empresa-a",
    description="Produto excelente, entrega no prazo",
    classification=ReviewClassification.PRAISE,
    posted_date=date(2018, 3, 5),
    source_url="http://fixture.local/company/empresa-a/reviews?page=1",
    fetched_at=FETCHED_AT,
) -> Review:
    return Review(
        company_slug=slug,
        description=description,
        classification=classification,
        posted_date=posted_date,
        source_url=source_url,
        fetched_at=fetched_at,
    )


def corpus_from_token_ids(docs_tokens: list[list[int]], V: int) -> EncodedCorpus:
    """Build an encoded corpus directly from token-id lists (synthetic tests)."""
    terms = tuple(f"term{i}" for i in range(V))
    vocab = Vocabulary(
        terms=terms,
        index={t: i for i, t in enumerate(terms)},
        corpus_term_counts=tuple(
            sum(1 for doc in docs_tokens for w in doc if w == i) for i in range(V)
        ),
    )
    docs = tuple(
        EncodedDocument(review=None, token_ids=tuple(doc)) for doc in docs_tokens
    )
    return EncodedCorpus(vocabulary=vocab, documents=docs)


@pytest.fixture(scope="session")
def fixture_site_default():
    """The standard 3-company x 120-review site, generated once."""
    return generate_site(default_spec(seed=1))


@pytest.fixture(scope="session")
def fixture_server(fixture_site_default):
    handle = serve_fixture(fixture_site_default)
    yield handle
    handle.close()

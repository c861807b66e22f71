"""Core domain vocabulary: companies, reviews, classifications, dedup keys.

All values here are immutable after construction and validated on creation,
so every other module can share them freely across threads.
"""

from __future__ import annotations

import hashlib
import re
import unicodedata
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from enum import Enum
from urllib.parse import urlparse

SLUG_RE = re.compile(r"^[a-z0-9-]+$")

_DMY_RE = re.compile(r"^(\d{2})/(\d{2})/(\d{4})$")
_ISO_RE = re.compile(r"^(\d{4})-(\d{2})-(\d{2})$")

_WS_RUN_RE = re.compile(r"\s+")


class DomainError(ValueError):
    """Base for validation failures in this module."""


class UnknownLabel(DomainError):
    """Classification label outside the closed praise/complaint set.

    Signals an unexpected page variant, not a crash.
    """

    def __init__(self, label: str):
        super().__init__(f"unknown classification label: {label!r}")
        self.label = label


class InvalidDate(DomainError):
    """Date string in neither accepted format, or an impossible date."""


class ReviewClassification(Enum):
    PRAISE = "Praise"
    COMPLAINT = "Complaint"

    def render(self) -> str:
        """Canonical string used in files and APIs."""
        return self.value


def _fold(text: str) -> str:
    """Lowercase and strip combining accents, for label matching only."""
    decomposed = unicodedata.normalize("NFD", text.strip().casefold())
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


# Folded label -> classification. Accepts both the canonical API strings and
# the platform's original Portuguese labels, accent-mangled or not.
_LABELS = {
    "elogio": ReviewClassification.PRAISE,
    "praise": ReviewClassification.PRAISE,
    "reclamacao": ReviewClassification.COMPLAINT,
    "complaint": ReviewClassification.COMPLAINT,
}


def parse_classification(label: str) -> ReviewClassification:
    """Map a praise/complaint label to its classification.

    Matching trims surrounding whitespace and folds case and accents, so
    entity-mangled crawled HTML ("reclamacao") still parses.
    """
    try:
        return _LABELS[_fold(label)]
    except KeyError:
        raise UnknownLabel(label) from None


def parse_review_date(text: str) -> date:
    """Parse dd/mm/yyyy (primary) or yyyy-mm-dd (fallback) into a date."""
    s = text.strip()
    m = _DMY_RE.match(s)
    if m:
        day, month, year = int(m.group(1)), int(m.group(2)), int(m.group(3))
    else:
        m = _ISO_RE.match(s)
        if not m:
            raise InvalidDate(f"unrecognized date format: {text!r}")
        year, month, day = int(m.group(1)), int(m.group(2)), int(m.group(3))
    try:
        return date(year, month, day)
    except ValueError:
        raise InvalidDate(f"impossible calendar date: {text!r}") from None


@dataclass(frozen=True, slots=True)
class Company:
    slug: str
    name: str
    sector: str = ""

    def __post_init__(self):
        if not SLUG_RE.match(self.slug):
            raise DomainError(f"invalid company slug: {self.slug!r}")


@dataclass(frozen=True, slots=True)
class Review:
    """One consumer comment about a company."""

    company_slug: str
    description: str
    classification: ReviewClassification
    posted_date: date
    source_url: str
    fetched_at: datetime

    def __post_init__(self):
        if not SLUG_RE.match(self.company_slug):
            raise DomainError(f"invalid company slug: {self.company_slug!r}")
        if not self.description.strip():
            raise DomainError("review description is empty")
        parsed = urlparse(self.source_url)
        if not (parsed.scheme and parsed.netloc):
            raise DomainError(f"source_url is not absolute: {self.source_url!r}")
        if self.fetched_at.tzinfo is None:
            raise DomainError("fetched_at must be timezone-aware (UTC)")
        if self.posted_date > self.fetched_at.astimezone(timezone.utc).date():
            raise DomainError(
                f"posted_date {self.posted_date} is after fetch date"
            )


def normalize_description(description: str) -> str:
    """Trim, collapse internal whitespace runs to one space, case-fold."""
    return _WS_RUN_RE.sub(" ", description.strip()).casefold()


@dataclass(frozen=True, slots=True)
class ReviewKey:
    """Deduplication identity of a review within one company.

    The digest covers (normalized description, posted date, classification);
    source_url is deliberately excluded because the same review can appear on
    multiple listing pages.
    """

    company_slug: str
    content_digest: str = field(compare=True)


def review_key(review: Review) -> ReviewKey:
    payload = "\n".join(
        (
            normalize_description(review.description),
            review.posted_date.isoformat(),
            review.classification.render(),
        )
    )
    digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()
    return ReviewKey(company_slug=review.company_slug, content_digest=digest)


def utc_now() -> datetime:
    return datetime.now(timezone.utc)

"""Polite sequential crawler for paginated review listings.

Role split: run_crawl drives the loop (engine), the visited set is the URL
frontier (scheduler), fetch_page is the downloader, parse_review_listing is
the spider, and the caller-supplied sink is the item pipeline.

The politeness clock is per host and process-wide: concurrent crawls against
one host jointly honor the minimum request spacing.
"""

from __future__ import annotations

import math
import re
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from html.parser import HTMLParser
from urllib.parse import urljoin, urlparse

import requests

from .domain import (
    Company,
    DomainError,
    Review,
    parse_classification,
    parse_review_date,
    utc_now,
)

_LISTING_PATH_RE = re.compile(r"/company/([a-z0-9-]+)/reviews")


class CrawlerError(Exception):
    pass


class FetchError(CrawlerError):
    """Base for terminal download failures (after retries)."""


class NetworkError(FetchError):
    pass


class Timeout(FetchError):
    pass


class HttpError(FetchError):
    def __init__(self, status: int, url: str):
        super().__init__(f"HTTP {status} for {url}")
        self.status = status
        self.url = url


class UnrecognizedPage(CrawlerError):
    """The review-list container is absent: a structural site change."""


class InvalidBaseUrl(ValueError):
    pass


class InvalidPlan(ValueError):
    pass


@dataclass(frozen=True)
class FetchPolicy:
    min_delay_s: float = 1.0
    max_retries: int = 2
    timeout_s: float = 10.0
    user_agent: str = "reputex/0.1"

    def __post_init__(self):
        if self.min_delay_s < 0:
            raise ValueError("min_delay_s must be >= 0")
        if self.timeout_s <= 0:
            raise ValueError("timeout_s must be > 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


@dataclass(frozen=True)
class CrawlPlan:
    company_slug: str
    seed_url: str
    max_reviews: int = 6000


@dataclass(frozen=True)
class PageResult:
    url: str
    http_status: int
    body: str
    fetched_at: datetime


@dataclass(frozen=True)
class FetchLogEntry:
    url: str
    started_at: datetime
    http_status: int | None  # None: no response (transport failure)
    attempt: int


@dataclass
class ListingParse:
    reviews: list[Review]
    next_page: str | None
    warnings: list[str] = field(default_factory=list)


@dataclass
class CrawlSummary:
    pages_fetched: int = 0
    reviews_extracted: int = 0
    warnings: list[str] = field(default_factory=list)


class CrawlError(CrawlerError):
    """Terminal crawl failure; partial progress is preserved in .summary."""

    def __init__(self, summary: CrawlSummary, cause: Exception):
        super().__init__(str(cause))
        self.summary = summary
        self.cause = cause


def plan_crawl(company: Company, base_url: str, max_reviews: int = 6000) -> CrawlPlan:
    parsed = urlparse(base_url)
    if not (parsed.scheme and parsed.netloc):
        raise InvalidBaseUrl(f"base URL must be absolute: {base_url!r}")
    if max_reviews <= 0:
        raise InvalidPlan(f"max_reviews must be > 0, got {max_reviews}")
    seed = f"{base_url.rstrip('/')}/company/{company.slug}/reviews?page=1"
    return CrawlPlan(company_slug=company.slug, seed_url=seed, max_reviews=max_reviews)


class PolitenessClock:
    """Serializes request slots per host with a minimum spacing.

    Slots are whole microseconds on the monotonic clock, reported as UTC
    datetimes off a fixed wall anchor, so logged timestamps carry the exact
    slot spacing with no float rounding losses.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._next_free_us: dict[str, int] = {}
        self._wall_anchor = datetime.now(timezone.utc)
        self._mono_anchor_us = time.monotonic_ns() // 1000

    def reserve(self, host: str, min_delay_s: float) -> datetime:
        """Block until this host's next slot; returns the slot's timestamp."""
        delay_us = math.ceil(min_delay_s * 1_000_000)  # never round the gap down
        with self._lock:
            now_us = time.monotonic_ns() // 1000
            slot_us = max(now_us, self._next_free_us.get(host, now_us))
            self._next_free_us[host] = slot_us + delay_us
        if slot_us > now_us:
            time.sleep((slot_us - now_us) / 1_000_000)
        return self._wall_anchor + timedelta(microseconds=slot_us - self._mono_anchor_us)


_default_clock = PolitenessClock()


def fetch_page(
    url: str,
    policy: FetchPolicy,
    log: list[FetchLogEntry] | None = None,
    session: requests.Session | None = None,
    clock: PolitenessClock | None = None,
) -> PageResult:
    """Download one page, retrying transport errors and 5xx responses.

    At most max_retries+1 attempts; each attempt takes a politeness slot for
    the host (so the retry backoff equals the politeness delay) and appends
    one FetchLogEntry.
    """
    parsed = urlparse(url)
    if not (parsed.scheme and parsed.netloc):
        raise ValueError(f"url must be absolute: {url!r}")
    clock = clock or _default_clock
    own_session = session is None
    session = session or requests.Session()
    last_error: FetchError | None = None
    try:
        for attempt in range(1, policy.max_retries + 2):
            started_at = clock.reserve(parsed.netloc, policy.min_delay_s)
            status: int | None = None
            try:
                resp = session.get(
                    url,
                    timeout=policy.timeout_s,
                    headers={"User-Agent": policy.user_agent},
                )
                status = resp.status_code
            except requests.exceptions.Timeout:
                last_error = Timeout(f"timed out fetching {url}")
            except requests.exceptions.RequestException as exc:
                last_error = NetworkError(f"transport failure for {url}: {exc}")
            finally:
                if log is not None:
                    log.append(
                        FetchLogEntry(
                            url=url, started_at=started_at, http_status=status, attempt=attempt
                        )
                    )
            if status is None:
                continue
            if 200 <= status < 300:
                if resp.encoding is None:
                    resp.encoding = "utf-8"
                return PageResult(
                    url=url, http_status=status, body=resp.text, fetched_at=utc_now()
                )
            if 400 <= status < 500:
                raise HttpError(status, url)
            last_error = HttpError(status, url)
        assert last_error is not None
        raise last_error
    finally:
        if own_session:
            session.close()


class _ListingExtractor(HTMLParser):
    """Pulls review items and the next-page link out of a listing page."""

    _FIELD_CLASSES = {"review-text": "text", "review-kind": "kind", "review-date": "date"}

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.saw_list = False
        self.items: list[dict[str, str]] = []
        self.next_href: str | None = None
        self._item: dict[str, list[str]] | None = None
        self._item_tag = ""
        self._field: str | None = None
        self._field_tag = ""

    def handle_starttag(self, tag, attrs):
        attrs = dict(attrs)
        classes = (attrs.get("class") or "").split()
        if "review-list" in classes:
            self.saw_list = True
        if "review-item" in classes:
            self._item = {"text": [], "kind": [], "date": []}
            self._item_tag = tag
            return
        if self._item is not None:
            for cls, key in self._FIELD_CLASSES.items():
                if cls in classes:
                    self._field = key
                    self._field_tag = tag
                    return
        if tag == "a" and "next" in (attrs.get("rel") or "").split():
            href = attrs.get("href")
            if href and self.next_href is None:
                self.next_href = href

    def handle_data(self, data):
        if self._item is not None and self._field is not None:
            self._item[self._field].append(data)

    def handle_endtag(self, tag):
        if self._field is not None and tag == self._field_tag:
            self._field = None
        elif self._item is not None and tag == self._item_tag:
            self.items.append({k: "".join(v) for k, v in self._item.items()})
            self._item = None


def parse_review_listing(body: str, page_url: str) -> ListingParse:
    """Extract every review item in document order plus the next-page link.

    Item-level field failures are collected as warnings and the item skipped;
    a missing review-list container raises UnrecognizedPage.
    """
    path_match = _LISTING_PATH_RE.search(urlparse(page_url).path)
    if not path_match:
        raise UnrecognizedPage(f"URL does not match the listing route: {page_url}")
    company_slug = path_match.group(1)
    extractor = _ListingExtractor()
    extractor.feed(body)
    extractor.close()
    if not extractor.saw_list:
        raise UnrecognizedPage(f"no review-list container at {page_url}")
    fetched_at = utc_now()
    reviews = []
    warnings = []
    for position, item in enumerate(extractor.items):
        try:
            reviews.append(
                Review(
                    company_slug=company_slug,
                    description=item["text"].strip(),
                    classification=parse_classification(item["kind"]),
                    posted_date=parse_review_date(item["date"]),
                    source_url=page_url,
                    fetched_at=fetched_at,
                )
            )
        except DomainError as exc:
            warnings.append(f"skipped item {position} on {page_url}: {exc}")
    next_page = None
    if extractor.next_href:
        next_page = urljoin(page_url, extractor.next_href)
        if next_page == page_url:
            warnings.append(f"next link points at the page itself on {page_url}")
            next_page = None
    return ListingParse(reviews=reviews, next_page=next_page, warnings=warnings)


def run_crawl(
    plan: CrawlPlan,
    policy: FetchPolicy,
    sink,
    fetch_log: list[FetchLogEntry] | None = None,
    session: requests.Session | None = None,
    clock: PolitenessClock | None = None,
) -> CrawlSummary:
    """Follow next-page links from the seed, streaming reviews to the sink.

    Stops when pagination ends, max_reviews is reached, or a page-level
    error occurs; the latter raises CrawlError carrying the partial summary.
    No URL is requested twice within one crawl.
    """
    if plan.max_reviews <= 0:
        raise InvalidPlan(f"max_reviews must be > 0, got {plan.max_reviews}")
    summary = CrawlSummary()
    visited: set[str] = set()
    own_session = session is None
    session = session or requests.Session()
    try:
        url: str | None = plan.seed_url
        while url:
            if url in visited:
                summary.warnings.append(f"pagination loop detected at {url}")
                break
            visited.add(url)
            try:
                page = fetch_page(url, policy, log=fetch_log, session=session, clock=clock)
            except FetchError as exc:
                raise CrawlError(summary, exc) from exc
            summary.pages_fetched += 1
            try:
                parsed = parse_review_listing(page.body, url)
            except UnrecognizedPage as exc:
                raise CrawlError(summary, exc) from exc
            summary.warnings.extend(parsed.warnings)
            for review in parsed.reviews:
                if summary.reviews_extracted >= plan.max_reviews:
                    break
                sink(review)
                summary.reviews_extracted += 1
            if summary.reviews_extracted >= plan.max_reviews:
                break
            url = parsed.next_page
    finally:
        if own_session:
            session.close()
    return summary

"""Durable, deduplicated persistence of reviews and topic reports.

Layout on disk, per company slug:

    <root>/<slug>/meta.json           company display name and sector
    <root>/<slug>/reviews.log         one JSON record per line, UTF-8, LF
    <root>/<slug>/reports/*.report    one JSON document per saved report

The log is append-only; the dedup index is held in memory and rebuilt from
the log on open, so reload always reproduces the identical logical state.
A torn final line (crash mid-append) is tolerated and dropped on reload;
corruption anywhere earlier is an error.
"""

from __future__ import annotations

import csv
import io
import json
import os
import threading
from dataclasses import dataclass
from datetime import date, datetime, timezone
from pathlib import Path

from .domain import (
    Company,
    Review,
    ReviewClassification,
    SLUG_RE,
    parse_classification,
    review_key,
)

REVIEW_FIELDS = ("description", "classification", "posted_date", "source_url", "fetched_at")

EXPORT_FORMATS = ("delimited-table", "structured-records")


class StorageError(Exception):
    """I/O failure or on-disk corruption."""


class InvalidRecord(StorageError):
    """A record violates the review schema."""


class UnknownCompany(KeyError):
    def __init__(self, slug: str):
        super().__init__(slug)
        self.slug = slug

    def __str__(self):
        return f"unknown company: {self.slug!r}"


class NoReport(LookupError):
    def __init__(self, slug: str):
        super().__init__(f"no stored report for company {slug!r}")


@dataclass(frozen=True)
class AppendResult:
    inserted: int
    duplicates: int


@dataclass(frozen=True)
class ReviewPage:
    items: list[Review]
    total: int
    offset: int
    limit: int


@dataclass(frozen=True)
class StoredReport:
    """A topic report plus the parameters that produced it."""

    company_slug: str
    created_at: datetime
    parameters: dict
    topics: list  # per topic: list of {"term": str, "probability": float}

    def to_json_dict(self) -> dict:
        return {
            "company_slug": self.company_slug,
            "created_at": self.created_at.isoformat(),
            "parameters": self.parameters,
            "topics": self.topics,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "StoredReport":
        return cls(
            company_slug=data["company_slug"],
            created_at=datetime.fromisoformat(data["created_at"]),
            parameters=data["parameters"],
            topics=data["topics"],
        )


def review_to_record(review: Review) -> dict:
    return {
        "description": review.description,
        "classification": review.classification.render(),
        "posted_date": review.posted_date.isoformat(),
        "source_url": review.source_url,
        "fetched_at": review.fetched_at.isoformat(),
    }


def record_to_review(record: dict, company_slug: str) -> Review:
    try:
        return Review(
            company_slug=company_slug,
            description=record["description"],
            classification=parse_classification(record["classification"]),
            posted_date=date.fromisoformat(record["posted_date"]),
            source_url=record["source_url"],
            fetched_at=datetime.fromisoformat(record["fetched_at"]),
        )
    except (KeyError, ValueError) as exc:
        raise InvalidRecord(f"bad review record: {exc}") from exc


class _CompanyState:
    """In-memory view of one company's log, guarded by its own lock."""

    def __init__(self):
        self.lock = threading.RLock()
        self.reviews: list[Review] = []
        self.digests: set[str] = set()
        self.company: Company | None = None


class ReviewStore:
    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._companies: dict[str, _CompanyState] = {}
        self._load_all()

    # -- loading ---------------------------------------------------------

    def _load_all(self) -> None:
        for entry in sorted(self.root.iterdir()):
            if entry.is_dir() and SLUG_RE.match(entry.name):
                self._companies[entry.name] = self._load_company(entry.name)

    def _load_company(self, slug: str) -> _CompanyState:
        state = _CompanyState()
        meta_path = self.root / slug / "meta.json"
        if meta_path.exists():
            try:
                meta = json.loads(meta_path.read_text("utf-8"))
                state.company = Company(
                    slug=slug, name=meta.get("name", slug), sector=meta.get("sector", "")
                )
            except (OSError, ValueError) as exc:
                raise StorageError(f"unreadable meta for {slug!r}: {exc}") from exc
        else:
            state.company = Company(slug=slug, name=slug)
        log_path = self._log_path(slug)
        if not log_path.exists():
            return state
        try:
            raw = log_path.read_bytes()
        except OSError as exc:
            raise StorageError(f"cannot read {log_path}: {exc}") from exc
        lines = raw.split(b"\n")
        # A trailing empty chunk is the normal final-LF case; a non-empty
        # final chunk without LF is a torn append and is dropped.
        body, tail = lines[:-1], lines[-1]
        for i, line in enumerate(body):
            if not line.strip():
                continue
            try:
                record = json.loads(line.decode("utf-8"))
                review = record_to_review(record, slug)
            except (UnicodeDecodeError, ValueError, InvalidRecord) as exc:
                raise StorageError(
                    f"corrupt record at {log_path}:{i + 1}: {exc}"
                ) from exc
            state.reviews.append(review)
            state.digests.add(review_key(review).content_digest)
        if tail.strip():
            try:
                record = json.loads(tail.decode("utf-8"))
                review = record_to_review(record, slug)
            except (UnicodeDecodeError, ValueError, InvalidRecord):
                pass  # torn final record, lost with the crash that tore it
            else:
                state.reviews.append(review)
                state.digests.add(review_key(review).content_digest)
        return state

    # -- companies -------------------------------------------------------

    def _log_path(self, slug: str) -> Path:
        return self.root / slug / "reviews.log"

    def _state(self, slug: str) -> _CompanyState:
        with self._lock:
            try:
                return self._companies[slug]
            except KeyError:
                raise UnknownCompany(slug) from None

    def has_company(self, slug: str) -> bool:
        with self._lock:
            return slug in self._companies

    def ensure_company(self, slug: str, name: str | None = None, sector: str = "") -> Company:
        """Create the company directory and metadata if absent."""
        company = Company(slug=slug, name=name or slug, sector=sector)
        with self._lock:
            state = self._companies.get(slug)
            if state is None:
                cdir = self.root / slug
                try:
                    cdir.mkdir(parents=True, exist_ok=True)
                    (cdir / "meta.json").write_text(
                        json.dumps({"name": company.name, "sector": company.sector}),
                        encoding="utf-8",
                    )
                except OSError as exc:
                    raise StorageError(f"cannot create company dir: {exc}") from exc
                state = _CompanyState()
                state.company = company
                self._companies[slug] = state
            return state.company

    def list_companies(self) -> list[Company]:
        with self._lock:
            return sorted(
                (s.company for s in self._companies.values() if s.company),
                key=lambda c: c.slug,
            )

    # -- reviews ---------------------------------------------------------

    def append_reviews(self, company_slug: str, batch: list[Review]) -> AppendResult:
        """Append new reviews, skipping duplicates by content key.

        Single writer per company: callers must not append to one company
        from two threads at once; the per-company lock makes that safe but
        serialized either way.
        """
        self.ensure_company(company_slug)
        state = self._state(company_slug)
        inserted = duplicates = 0
        with state.lock:
            log_path = self._log_path(company_slug)
            try:
                with open(log_path, "a", encoding="utf-8", newline="\n") as fh:
                    for review in batch:
                        if review.company_slug != company_slug:
                            raise InvalidRecord(
                                f"review for {review.company_slug!r} appended to {company_slug!r}"
                            )
                        digest = review_key(review).content_digest
                        if digest in state.digests:
                            duplicates += 1
                            continue
                        fh.write(json.dumps(review_to_record(review), ensure_ascii=False))
                        fh.write("\n")
                        fh.flush()
                        state.digests.add(digest)
                        state.reviews.append(review)
                        inserted += 1
                    fh.flush()
                    os.fsync(fh.fileno())
            except OSError as exc:
                raise StorageError(f"append failed for {company_slug!r}: {exc}") from exc
        return AppendResult(inserted=inserted, duplicates=duplicates)

    def _snapshot(self, company_slug: str) -> list[Review]:
        state = self._state(company_slug)
        with state.lock:
            return list(state.reviews)

    def list_reviews(
        self,
        company_slug: str,
        classification: ReviewClassification | None = None,
        date_range: tuple[date | None, date | None] | None = None,
        offset: int = 0,
        limit: int = 50,
    ) -> ReviewPage:
        """Stable page over the filtered set: posted_date desc, digest asc."""
        if not 1 <= limit <= 1000:
            raise ValueError(f"limit must be in [1, 1000], got {limit}")
        if offset < 0:
            raise ValueError(f"offset must be >= 0, got {offset}")
        reviews = self._snapshot(company_slug)
        if classification is not None:
            reviews = [r for r in reviews if r.classification is classification]
        if date_range is not None:
            lo, hi = date_range
            if lo is not None:
                reviews = [r for r in reviews if r.posted_date >= lo]
            if hi is not None:
                reviews = [r for r in reviews if r.posted_date <= hi]
        reviews.sort(key=_list_order)
        return ReviewPage(
            items=reviews[offset : offset + limit],
            total=len(reviews),
            offset=offset,
            limit=limit,
        )

    def all_reviews(self, company_slug: str) -> list[Review]:
        """Every stored review in the stable list order."""
        reviews = self._snapshot(company_slug)
        reviews.sort(key=_list_order)
        return reviews

    def classification_counts(self, company_slug: str) -> dict[str, int]:
        reviews = self._snapshot(company_slug)
        praise = sum(1 for r in reviews if r.classification is ReviewClassification.PRAISE)
        return {"praise": praise, "complaint": len(reviews) - praise}

    # -- reports ---------------------------------------------------------

    def _reports_dir(self, slug: str) -> Path:
        return self.root / slug / "reports"

    def save_report(self, report: StoredReport) -> str:
        state = self._state(report.company_slug)
        for key in ("K", "words", "min_prob", "seed", "iterations"):
            if key not in report.parameters:
                raise InvalidRecord(f"report parameters missing {key!r}")
        with state.lock:
            rdir = self._reports_dir(report.company_slug)
            try:
                rdir.mkdir(parents=True, exist_ok=True)
                seq = 1 + max(
                    (_report_seq(p.name) for p in rdir.glob("*.report")), default=0
                )
                stamp = report.created_at.astimezone(timezone.utc).strftime(
                    "%Y%m%dT%H%M%S%f"
                )
                report_id = f"{stamp}-{seq:06d}"
                path = rdir / f"{report_id}.report"
                path.write_text(
                    json.dumps(report.to_json_dict(), ensure_ascii=False, sort_keys=True),
                    encoding="utf-8",
                )
            except OSError as exc:
                raise StorageError(f"cannot save report: {exc}") from exc
        return report_id

    def load_latest_report(self, company_slug: str) -> StoredReport:
        state = self._state(company_slug)
        with state.lock:
            rdir = self._reports_dir(company_slug)
            candidates = sorted(rdir.glob("*.report"), key=lambda p: _report_seq(p.name))
            if not candidates:
                raise NoReport(company_slug)
            path = candidates[-1]
            try:
                return StoredReport.from_json_dict(json.loads(path.read_text("utf-8")))
            except (OSError, ValueError, KeyError) as exc:
                raise StorageError(f"unreadable report {path}: {exc}") from exc

    # -- export ----------------------------------------------------------

    def render_export(self, company_slug: str, fmt: str) -> bytes:
        """Serialize a company's reviews in one of the two export formats."""
        if fmt not in EXPORT_FORMATS:
            raise ValueError(f"unknown export format: {fmt!r}")
        reviews = self.all_reviews(company_slug)
        buf = io.StringIO()
        if fmt == "delimited-table":
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["description", "classification", "posted_date"])
            for r in reviews:
                writer.writerow(
                    [r.description, r.classification.render(), r.posted_date.isoformat()]
                )
        else:
            for r in reviews:
                buf.write(json.dumps(review_to_record(r), ensure_ascii=False))
                buf.write("\n")
        return buf.getvalue().encode("utf-8")

    def export_reviews(self, company_slug: str, fmt: str, destination) -> int:
        """Write the export to a path or binary file object; returns bytes written."""
        payload = self.render_export(company_slug, fmt)
        try:
            if hasattr(destination, "write"):
                destination.write(payload)
            else:
                Path(destination).write_bytes(payload)
        except OSError as exc:
            raise StorageError(f"export failed: {exc}") from exc
        return len(payload)


def _list_order(review: Review) -> tuple[int, str]:
    # posted_date descending, content digest ascending as tiebreak
    return (-review.posted_date.toordinal(), review_key(review).content_digest)


def _report_seq(filename: str) -> int:
    stem = filename.rsplit(".", 1)[0]
    try:
        return int(stem.rsplit("-", 1)[1])
    except (IndexError, ValueError):
        return 0

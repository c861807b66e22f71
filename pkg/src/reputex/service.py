"""HTTP orchestration: accept a company request, crawl into the store,
expose reviews, trigger topic modeling, return the summary.

Crawling is asynchronous (a background job the client polls); topic modeling
is synchronous, returning the stored report in the response. At most one
non-terminal crawl job exists per company; a repeated start returns the
existing job. All errors use one shape: {"status", "code", "message"}.
"""

from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import HTTPException, RequestValidationError
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import crawler, textprep, topics
from .domain import SLUG_RE, parse_classification, utc_now
from .store import (
    EXPORT_FORMATS,
    NoReport,
    ReviewStore,
    StoredReport,
    UnknownCompany,
)

JOB_STATES = ("Queued", "Running", "Done", "Failed")

ERROR_CODES = (
    "bad_slug",
    "bad_request",
    "unknown_company",
    "unknown_job",
    "no_report",
    "empty_corpus",
    "internal",
)


class ApiError(HTTPException):
    def __init__(self, status: int, code: str, message: str):
        assert code in ERROR_CODES
        super().__init__(status_code=status, detail=message)
        self.code = code


@dataclass
class CrawlJobRecord:
    job_id: str
    company_slug: str
    state: str = "Queued"
    summary: dict | None = None
    error: str | None = None
    created_at: datetime = field(default_factory=utc_now)
    finished_at: datetime | None = None

    def snapshot(self) -> dict:
        return {
            "job_id": self.job_id,
            "company_slug": self.company_slug,
            "state": self.state,
            "summary": dict(self.summary) if self.summary is not None else None,
            "error": self.error,
            "created_at": self.created_at.isoformat(),
            "finished_at": self.finished_at.isoformat() if self.finished_at else None,
        }


class CrawlJobManager:
    """Runs crawl jobs on a worker pool, one non-terminal job per company."""

    def __init__(
        self,
        store: ReviewStore,
        policy: crawler.FetchPolicy,
        default_base_url: str,
        default_max_reviews: int = 6000,
        max_workers: int = 4,
    ):
        self.store = store
        self.policy = policy
        self.default_base_url = default_base_url
        self.default_max_reviews = default_max_reviews
        self._lock = threading.Lock()
        self._jobs: dict[str, CrawlJobRecord] = {}
        self._active: dict[str, str] = {}  # slug -> non-terminal job id
        self._executor = ThreadPoolExecutor(max_workers=max_workers)

    def start(self, slug: str, base_url: str | None, max_reviews: int | None) -> dict:
        company = self.store.ensure_company(slug)
        plan = crawler.plan_crawl(
            company,
            base_url or self.default_base_url,
            max_reviews or self.default_max_reviews,
        )
        with self._lock:
            active_id = self._active.get(slug)
            if active_id is not None:
                return self._jobs[active_id].snapshot()
            job = CrawlJobRecord(job_id=uuid.uuid4().hex, company_slug=slug)
            self._jobs[job.job_id] = job
            self._active[slug] = job.job_id
            snapshot = job.snapshot()
        self._executor.submit(self._run, job.job_id, plan)
        return snapshot

    def get(self, job_id: str) -> dict | None:
        with self._lock:
            job = self._jobs.get(job_id)
            return job.snapshot() if job else None

    def _run(self, job_id: str, plan: crawler.CrawlPlan) -> None:
        with self._lock:
            job = self._jobs[job_id]
            job.state = "Running"
        inserted = duplicates = 0

        def sink(review):
            nonlocal inserted, duplicates
            result = self.store.append_reviews(plan.company_slug, [review])
            inserted += result.inserted
            duplicates += result.duplicates

        def summary_dict(s: crawler.CrawlSummary) -> dict:
            return {
                "pages_fetched": s.pages_fetched,
                "reviews_extracted": s.reviews_extracted,
                "warnings": list(s.warnings),
                "inserted": inserted,
                "duplicates": duplicates,
            }

        try:
            summary = crawler.run_crawl(plan, self.policy, sink)
        except crawler.CrawlError as exc:
            with self._lock:
                job.state = "Failed"
                job.error = str(exc)
                job.summary = summary_dict(exc.summary)
                job.finished_at = utc_now()
                self._active.pop(plan.company_slug, None)
        except Exception as exc:  # noqa: BLE001 (job boundary)
            with self._lock:
                job.state = "Failed"
                job.error = f"internal: {exc}"
                job.finished_at = utc_now()
                self._active.pop(plan.company_slug, None)
        else:
            with self._lock:
                job.state = "Done"
                job.summary = summary_dict(summary)
                job.finished_at = utc_now()
                self._active.pop(plan.company_slug, None)

    def shutdown(self) -> None:
        self._executor.shutdown(wait=False)


class CrawlRequest(BaseModel):
    base_url: str | None = None
    max_reviews: int | None = None


class TopicsRequest(BaseModel):
    K: int = 5
    words: int = 6
    min_prob: float = 0.02
    seed: int = 0
    iterations: int = 1000


def run_topic_modeling(store: ReviewStore, slug: str, params: TopicsRequest) -> dict:
    """Encode all stored reviews, train, report, persist; returns the report."""
    reviews = store.all_reviews(slug)
    if not reviews:
        raise ApiError(422, "empty_corpus", f"company {slug!r} has no stored reviews")
    try:
        hp = topics.LdaHyperparams(K=params.K, iterations=params.iterations, seed=params.seed)
        if params.words < 1 or not 0.0 <= params.min_prob < 1.0:
            raise ValueError("words must be >= 1 and min_prob in [0, 1)")
    except ValueError as exc:
        raise ApiError(400, "bad_request", str(exc)) from exc
    try:
        corpus = textprep.encode_corpus(reviews)
    except textprep.EmptyVocabulary as exc:
        raise ApiError(422, "empty_corpus", str(exc)) from exc
    state = topics.train(corpus, hp)
    report = topics.top_terms(state, M=params.words, min_prob=params.min_prob)
    stored = StoredReport(
        company_slug=slug,
        created_at=utc_now(),
        parameters={
            "K": hp.K,
            "words": params.words,
            "min_prob": params.min_prob,
            "seed": params.seed,
            "iterations": hp.iterations,
            "alpha": hp.alpha,
            "beta": hp.beta,
        },
        topics=report.to_payload(),
    )
    report_id = store.save_report(stored)
    payload = stored.to_json_dict()
    payload["report_id"] = report_id
    return payload


def create_app(
    store: ReviewStore,
    base_url: str,
    policy: crawler.FetchPolicy | None = None,
    webui_dist: str | Path | None = None,
    default_max_reviews: int = 6000,
) -> FastAPI:
    policy = policy or crawler.FetchPolicy()
    manager = CrawlJobManager(
        store, policy, default_base_url=base_url, default_max_reviews=default_max_reviews
    )

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        yield
        manager.shutdown()

    app = FastAPI(title="reputex", version="0.1.0", lifespan=lifespan)
    app.state.store = store
    app.state.jobs = manager

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status_code,
            content={"status": exc.status_code, "code": exc.code, "message": exc.detail},
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_req: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"status": 400, "code": "bad_request", "message": str(exc.errors())},
        )

    def _require_company(slug: str) -> None:
        if not store.has_company(slug):
            raise ApiError(404, "unknown_company", f"unknown company: {slug}")

    @app.post("/companies/{slug}/crawl", status_code=202)
    def start_crawl(slug: str, body: CrawlRequest | None = None):
        if not SLUG_RE.match(slug):
            raise ApiError(400, "bad_slug", f"malformed company slug: {slug!r}")
        body = body or CrawlRequest()
        if body.max_reviews is not None and body.max_reviews <= 0:
            raise ApiError(400, "bad_request", "max_reviews must be > 0")
        try:
            return manager.start(slug, body.base_url, body.max_reviews)
        except crawler.InvalidBaseUrl as exc:
            raise ApiError(400, "bad_request", str(exc)) from exc

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        record = manager.get(job_id)
        if record is None:
            raise ApiError(404, "unknown_job", f"unknown job: {job_id}")
        return record

    @app.get("/companies/{slug}/reviews")
    def list_reviews(
        slug: str, classification: str | None = None, offset: int = 0, limit: int = 50
    ):
        _require_company(slug)
        kind = None
        if classification is not None:
            try:
                kind = parse_classification(classification)
            except ValueError as exc:
                raise ApiError(400, "bad_request", str(exc)) from exc
        try:
            page = store.list_reviews(slug, classification=kind, offset=offset, limit=limit)
        except ValueError as exc:
            raise ApiError(400, "bad_request", str(exc)) from exc
        return {
            "items": [
                {
                    "description": r.description,
                    "classification": r.classification.render(),
                    "posted_date": r.posted_date.isoformat(),
                    "source_url": r.source_url,
                }
                for r in page.items
            ],
            "total": page.total,
            "offset": page.offset,
            "limit": page.limit,
        }

    @app.post("/companies/{slug}/topics")
    def model_topics(slug: str, body: TopicsRequest | None = None):
        _require_company(slug)
        return run_topic_modeling(store, slug, body or TopicsRequest())

    @app.get("/companies/{slug}/topics/latest")
    def latest_report(slug: str):
        _require_company(slug)
        try:
            return store.load_latest_report(slug).to_json_dict()
        except NoReport as exc:
            raise ApiError(404, "no_report", str(exc)) from exc

    @app.get("/companies")
    def list_companies():
        out = []
        for company in store.list_companies():
            counts = store.classification_counts(company.slug)
            out.append(
                {
                    "slug": company.slug,
                    "name": company.name,
                    "sector": company.sector,
                    "praise": counts["praise"],
                    "complaint": counts["complaint"],
                    "total": counts["praise"] + counts["complaint"],
                }
            )
        return out

    @app.get("/companies/{slug}/export")
    def export_reviews(slug: str, format: str = "delimited-table"):
        _require_company(slug)
        if format not in EXPORT_FORMATS:
            raise ApiError(400, "bad_request", f"unknown export format: {format!r}")
        payload = store.render_export(slug, format)
        if format == "delimited-table":
            media, ext = "text/csv; charset=utf-8", "csv"
        else:
            media, ext = "application/x-ndjson", "jsonl"
        return Response(
            content=payload,
            media_type=media,
            headers={
                "Content-Disposition": f'attachment; filename="{slug}-reviews.{ext}"'
            },
        )

    if webui_dist is not None and Path(webui_dist).is_dir():
        app.mount("/", StaticFiles(directory=str(webui_dist), html=True), name="webui")

    return app

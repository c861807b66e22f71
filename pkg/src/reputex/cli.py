"""Command-line driver for every pipeline stage.

    reputex crawl <slug> --base-url URL [--max-reviews N] [--min-delay-ms N]
    reputex model <slug> [--topics K] [--words M] [--min-prob P] [--seed S] ...
    reputex report <slug> [--format human-table|structured]
    reputex export <slug> --out PATH [--format delimited-table|structured-records]
    reputex serve [--port N] [--base-url URL] [--webui-dist DIR] ...
    reputex fixture-serve [--port N] [--companies SPECFILE] [--seed S]

Exit codes: 0 ok, 1 operational failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import signal
import socket
import sys
import threading

from . import crawler, fixture_site, textprep, topics
from .domain import utc_now
from .service import create_app
from .store import NoReport, ReviewStore, StoredReport, UnknownCompany


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _policy_from_args(args) -> crawler.FetchPolicy:
    return crawler.FetchPolicy(
        min_delay_s=args.min_delay_ms / 1000.0,
        max_retries=args.max_retries,
        timeout_s=args.timeout,
        user_agent=args.user_agent,
    )


def _print_report_human(parameters: dict, topic_payload: list) -> None:
    for k, terms in enumerate(topic_payload):
        cells = "  ".join(f"{t['term']} {t['probability']:.4f}" for t in terms)
        print(f"{k}\t{cells}")


def _print_report_structured(slug: str, parameters: dict, topic_payload: list) -> None:
    # created_at is deliberately excluded: structured output is a pure
    # function of (store contents, parameters) and must be byte-reproducible.
    print(json.dumps({"company": slug, "parameters": parameters}, sort_keys=True, ensure_ascii=False))
    for k, terms in enumerate(topic_payload):
        print(json.dumps({"topic": k, "terms": terms}, sort_keys=True, ensure_ascii=False))


def _print_report(args, report: StoredReport) -> None:
    if args.format == "structured":
        _print_report_structured(report.company_slug, report.parameters, report.topics)
    else:
        _print_report_human(report.parameters, report.topics)


def cmd_crawl(args) -> int:
    store = ReviewStore(args.store)
    company = store.ensure_company(args.slug)
    try:
        plan = crawler.plan_crawl(company, args.base_url, args.max_reviews)
    except (crawler.InvalidBaseUrl, crawler.InvalidPlan) as exc:
        return _fail(str(exc))
    inserted = duplicates = 0

    def sink(review):
        nonlocal inserted, duplicates
        result = store.append_reviews(args.slug, [review])
        inserted += result.inserted
        duplicates += result.duplicates

    try:
        summary = crawler.run_crawl(plan, _policy_from_args(args), sink)
    except crawler.CrawlError as exc:
        print(
            f"pages={exc.summary.pages_fetched} reviews={exc.summary.reviews_extracted} "
            f"duplicates={duplicates}"
        )
        return _fail(str(exc))
    for warning in summary.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(
        f"pages={summary.pages_fetched} reviews={summary.reviews_extracted} "
        f"duplicates={duplicates}"
    )
    return 0


def cmd_model(args) -> int:
    store = ReviewStore(args.store)
    try:
        reviews = store.all_reviews(args.slug)
    except UnknownCompany as exc:
        return _fail(str(exc))
    if not reviews:
        return _fail("empty corpus")
    try:
        stopwords = textprep.load_stopwords(args.stopwords)
        config = textprep.TokenizerConfig(
            min_token_length=args.min_token_length, stopwords=stopwords
        )
        corpus = textprep.encode_corpus(reviews, config, min_count=args.min_count)
    except textprep.EmptyVocabulary:
        return _fail("empty corpus")
    except OSError as exc:
        return _fail(f"cannot read stopwords: {exc}")
    hp = topics.LdaHyperparams(
        K=args.topics,
        alpha=args.alpha,
        beta=args.beta,
        iterations=args.iterations,
        seed=args.seed,
    )
    state = topics.train(corpus, hp)
    report = topics.top_terms(state, M=args.words, min_prob=args.min_prob)
    stored = StoredReport(
        company_slug=args.slug,
        created_at=utc_now(),
        parameters={
            "K": hp.K,
            "words": args.words,
            "min_prob": args.min_prob,
            "seed": args.seed,
            "iterations": hp.iterations,
            "alpha": hp.alpha,
            "beta": hp.beta,
        },
        topics=report.to_payload(),
    )
    store.save_report(stored)
    _print_report(args, stored)
    return 0


def cmd_report(args) -> int:
    store = ReviewStore(args.store)
    try:
        report = store.load_latest_report(args.slug)
    except (UnknownCompany, NoReport) as exc:
        return _fail(str(exc))
    _print_report(args, report)
    return 0


def cmd_export(args) -> int:
    store = ReviewStore(args.store)
    try:
        count = store.export_reviews(args.slug, args.format, args.out)
    except UnknownCompany as exc:
        return _fail(str(exc))
    print(f"wrote {count} bytes to {args.out}")
    return 0


def _bind_or_fail(host: str, port: int) -> socket.socket | None:
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((host, port))
    except OSError:
        sock.close()
        return None
    return sock


def cmd_serve(args) -> int:
    import uvicorn

    store = ReviewStore(args.store)
    app = create_app(
        store,
        base_url=args.base_url,
        policy=_policy_from_args(args),
        webui_dist=args.webui_dist,
        default_max_reviews=args.max_reviews,
    )
    sock = _bind_or_fail(args.host, args.port)
    if sock is None:
        return _fail(f"cannot bind {args.host}:{args.port}")
    # listen before announcing, so early clients queue instead of being refused
    sock.listen(128)
    host, port = sock.getsockname()[:2]
    print(f"listening on http://{host}:{port}", flush=True)
    # uvicorn re-raises the signal that stopped it after restoring handlers;
    # with this no-op installed, a SIGTERM shutdown exits 0 instead of dying.
    signal.signal(signal.SIGTERM, lambda *_: None)
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    server.run(sockets=[sock])
    return 0


def cmd_fixture_serve(args) -> int:
    if args.companies:
        try:
            spec = fixture_site.load_fixture_spec(args.companies)
        except (OSError, ValueError, KeyError) as exc:
            return _fail(f"bad fixture spec file: {exc}")
        if args.seed is not None:
            spec = fixture_site.FixtureSpec(
                companies=spec.companies, page_size=spec.page_size, seed=args.seed
            )
    else:
        spec = fixture_site.default_spec(seed=args.seed if args.seed is not None else 1)
    site = fixture_site.generate_site(spec)
    try:
        handle = fixture_site.serve_fixture(site, port=args.port)
    except fixture_site.BindError as exc:
        return _fail(str(exc))
    print(f"listening on {handle.base_url}", flush=True)
    stop = threading.Event()
    signal.signal(signal.SIGTERM, lambda *_: stop.set())
    try:
        stop.wait()
    except KeyboardInterrupt:
        pass
    handle.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reputex", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_store(p):
        p.add_argument(
            "--store",
            default=os.environ.get("REPUTEX_STORE", "./reputex-store"),
            help="store root directory",
        )

    def add_policy(p):
        p.add_argument("--min-delay-ms", type=int, default=1000)
        p.add_argument("--max-retries", type=int, default=2)
        p.add_argument("--timeout", type=float, default=10.0)
        p.add_argument("--user-agent", default="reputex/0.1")

    def add_format(p):
        p.add_argument(
            "--format", choices=["human-table", "structured"], default="human-table"
        )

    p = sub.add_parser("crawl", help="crawl one company's reviews into the store")
    p.add_argument("slug")
    p.add_argument("--base-url", default=os.environ.get("REPUTEX_BASE_URL"), required="REPUTEX_BASE_URL" not in os.environ)
    p.add_argument("--max-reviews", type=int, default=6000)
    add_store(p)
    add_policy(p)
    p.set_defaults(func=cmd_crawl)

    p = sub.add_parser("model", help="train LDA on stored reviews and save the report")
    p.add_argument("slug")
    p.add_argument("--topics", type=int, default=5, metavar="K")
    p.add_argument("--words", type=int, default=6, metavar="M")
    p.add_argument("--min-prob", type=float, default=0.02)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stopwords", default=None, help="stopword file (default: bundled)")
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--min-token-length", type=int, default=2)
    add_store(p)
    add_format(p)
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("report", help="print the latest stored report")
    p.add_argument("slug")
    add_store(p)
    add_format(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("export", help="export stored reviews to a file")
    p.add_argument("slug")
    p.add_argument("--out", required=True)
    p.add_argument(
        "--format",
        choices=["delimited-table", "structured-records"],
        default="delimited-table",
    )
    add_store(p)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument(
        "--base-url",
        default=os.environ.get("REPUTEX_BASE_URL", "http://127.0.0.1:8100"),
        help="review platform base URL crawled by jobs",
    )
    p.add_argument("--max-reviews", type=int, default=6000)
    p.add_argument("--webui-dist", default=os.environ.get("REPUTEX_WEBUI_DIST"))
    add_store(p)
    add_policy(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("fixture-serve", help="serve the synthetic review site")
    p.add_argument("--port", type=int, default=8100)
    p.add_argument("--companies", default=None, help="fixture spec JSON file")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_fixture_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Acceptance suite: one test per criterion, each printing a PASS line with
its measured evidence. Tolerances and runtime bounds are pinned here.

Run as: pytest tests/test_acceptance.py -s
"""

from __future__ import annotations

import statistics
import subprocess
import sys
import time

import numpy as np
import pytest

from reputex import textprep, topics
from reputex.crawler import FetchPolicy, plan_crawl, run_crawl
from reputex.domain import Company
from reputex.fixture_site import (
    FixtureCompany,
    FixtureSpec,
    generate_site,
    serve_fixture,
)
from reputex.store import ReviewStore
from reputex.topics import (
    LdaHyperparams,
    full_conditional,
    gibbs_sweep,
    init_model,
    log_joint,
    report_from_phi,
    top_terms,
    train,
)

import oracles
from conftest import corpus_from_token_ids
from synthetic import planted_two_topic_corpus, random_small_corpus

ZERO_DELAY = FetchPolicy(min_delay_s=0.0, max_retries=1, timeout_s=10.0)


def ok(criterion: int, evidence: str) -> None:
    print(f"\nACCEPTANCE {criterion}: PASS - {evidence}")


def test_criterion_1_gibbs_oracle_equivalence():
    """full_conditional equals the enumerated exact conditional (<= 1e-9)."""
    instances = [
        # (docs, V, K): every instance keeps K^N <= 4096
        ([[0, 1, 2], [2, 1]], 3, 2),  # D=2, N=5, V=3, K=2
        ([[0, 1], [1], [0]], 2, 3),  # 3^4
        ([[0, 0, 1, 2]], 3, 4),  # 4^4
        ([[0, 1, 2, 3], [3, 2]], 4, 2),  # 2^6
        ([[0, 1], [2, 0], [1, 1]], 3, 2),  # 2^6
        ([[0, 1, 0], [1, 0, 1]], 2, 4),  # 4^6 = 4096 boundary
    ]
    start = time.perf_counter()
    checked = 0
    worst = 0.0
    for docs, V, K in instances:
        n_tokens = sum(len(d) for d in docs)
        assert K**n_tokens <= 4096
        corpus = corpus_from_token_ids(docs, V)
        alpha, beta = 0.5, 0.1
        table = oracles.enumerate_joint(docs, K, V, alpha, beta)
        for seed in (3, 91):
            state = init_model(
                corpus, LdaHyperparams(K=K, alpha=alpha, beta=beta, seed=seed)
            )
            for _ in range(3):  # also check states away from initialization
                z = [
                    [int(k) for k in state.z[state.doc_offsets[d] : state.doc_offsets[d + 1]]]
                    for d in range(len(docs))
                ]
                for d, doc in enumerate(docs):
                    for i in range(len(doc)):
                        expected = oracles.exact_conditional(table, docs, z, d, i, K)
                        got = full_conditional(state, d, i)
                        worst = max(worst, float(np.max(np.abs(got - expected))))
                        checked += 1
                gibbs_sweep(state)
    elapsed = time.perf_counter() - start
    assert worst <= 1e-9, f"max deviation {worst}"
    assert elapsed < 5.0, f"took {elapsed:.2f}s"
    ok(1, f"{checked} conditionals, max |Δ| = {worst:.2e}, {elapsed:.2f}s")


def test_criterion_2_count_conservation():
    """All three count equalities after init and after every sweep, 200 corpora."""
    rng = np.random.default_rng(20260101)
    start = time.perf_counter()
    corpora = 0
    while corpora < 200:
        corpus, K = random_small_corpus(rng)
        if not corpus.documents:
            continue
        corpora += 1
        seed = int(rng.integers(1 << 62))
        state = init_model(corpus, LdaHyperparams(K=K, seed=seed))
        docs = [list(doc.token_ids) for doc in corpus.documents]
        for step in range(4):  # init + 3 sweeps
            if step:
                gibbs_sweep(state)
            z = [
                [int(k) for k in state.z[state.doc_offsets[d] : state.doc_offsets[d + 1]]]
                for d in range(len(docs))
            ]
            n_dk, n_kw, n_k = oracles.recount(docs, z, K, len(corpus.vocabulary))
            assert np.array_equal(state.n_dk, np.array(n_dk).reshape(state.n_dk.shape))
            assert np.array_equal(state.n_kw, np.array(n_kw).reshape(state.n_kw.shape))
            assert np.array_equal(state.n_k, np.array(n_k))
            lengths = [len(d) for d in docs]
            assert state.n_dk.sum(axis=1).tolist() == lengths
            assert np.array_equal(state.n_kw.sum(axis=1), state.n_k)
            assert state.n_k.sum() == sum(lengths)
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"took {elapsed:.2f}s"
    ok(2, f"{corpora} corpora × (init + 3 sweeps), {elapsed:.2f}s")


def test_criterion_3_planted_topic_recovery():
    """Two disjoint planted vocabularies are recovered at >= 95% purity."""
    start = time.perf_counter()
    corpus, planted = planted_two_topic_corpus(num_docs=200, doc_len=20, terms_per_topic=10)
    state = train(corpus, LdaHyperparams(K=2, iterations=200, seed=42))
    report = top_terms(state, M=6, min_prob=0.0)
    term_id = corpus.vocabulary.index
    tops = [[term_id[t.term] for t in topic] for topic in report.topics]
    overlap = {(k, j): len(set(tops[k]) & planted[j]) for k in (0, 1) for j in (0, 1)}
    k0, j0 = max(overlap, key=overlap.get)  # greedy: best pair first
    matching = {k0: j0, 1 - k0: 1 - j0}
    purities = []
    for k in (0, 1):
        purity = overlap[(k, matching[k])] / len(tops[k])
        assert purity >= 0.95, f"topic {k} purity {purity}"
        purities.append(purity)
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"took {elapsed:.2f}s"
    ok(3, f"top-6 purities {purities}, {elapsed:.2f}s")


def test_criterion_4_log_joint_improvement():
    """Median log-joint gain over 20 fixed seeds is positive."""
    corpus, _ = planted_two_topic_corpus(num_docs=200, doc_len=20, terms_per_topic=10)
    deltas = []
    for seed in range(20):
        state = init_model(corpus, LdaHyperparams(K=2, iterations=0, seed=seed))
        initial = log_joint(state)
        for _ in range(200):
            gibbs_sweep(state)
        deltas.append(log_joint(state) - initial)
    median = statistics.median(deltas)
    assert median > 0.0, f"median delta {median}"
    ok(4, f"median Δlog-joint = +{median:.1f} over 20 seeds (min {min(deltas):.1f})")


def test_criterion_5_paper_configuration_fidelity(fixture_site_default):
    """Defaults give 5 topics × <= 6 terms, none below the 2% cutoff."""
    from reputex.domain import Review, utc_now

    truth = fixture_site_default.ground_truth["empresa-a"]
    reviews = [
        Review(
            company_slug="empresa-a",
            description=r.description,
            classification=r.classification,
            posted_date=r.posted_date,
            source_url="http://fixture.local/company/empresa-a/reviews?page=1",
            fetched_at=utc_now(),
        )
        for r in truth
    ]
    corpus = textprep.encode_corpus(reviews)
    hp = LdaHyperparams()  # K=5, alpha=10, beta=0.01, 1000 sweeps
    state = train(corpus, hp)
    report = top_terms(state)  # M=6, min_prob=0.02
    assert len(report.topics) == 5
    for topic in report.topics:
        assert 0 < len(topic) <= 6
        assert all(entry.probability >= 0.02 for entry in topic)
    # A sparse topic may keep only 3 of its 6 candidates after the cutoff.
    row = np.array([[0.80, 0.12, 0.04, 0.015, 0.01, 0.01, 0.005]])
    constructed = report_from_phi(row, tuple("abcdefg"), M=6, min_prob=0.02)
    assert len(constructed.topics[0]) == 3
    sizes = [len(t) for t in report.topics]
    ok(5, f"5 topics with term counts {sizes}, all probabilities >= 0.02; "
          f"constructed row reports exactly 3 terms")


def test_criterion_6_crawl_round_trip(fixture_site_default, fixture_server, tmp_path):
    """3 x 120 fixture reviews land in the store exactly, no URL refetched."""
    start = time.perf_counter()
    store = ReviewStore(tmp_path / "store")
    slugs = ("empresa-a", "empresa-b", "empresa-c")
    total = 0
    for slug in slugs:
        plan = plan_crawl(Company(slug, slug), fixture_server.base_url, 6000)
        log = []
        summary = run_crawl(
            plan, ZERO_DELAY, lambda r, s=slug: store.append_reviews(s, [r]), fetch_log=log
        )
        total += summary.reviews_extracted
        urls = [e.url for e in log]
        assert len(urls) == len(set(urls)), "a URL was fetched twice"
    assert total == 360
    for slug in slugs:
        stored = store.all_reviews(slug)
        truth = fixture_site_default.ground_truth[slug]
        assert len(stored) == 120
        got = [(r.description, r.classification, r.posted_date) for r in stored]
        expected = [(t.description, t.classification, t.posted_date) for t in truth]
        assert got == expected, f"field mismatch for {slug}"
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"took {elapsed:.2f}s"
    ok(6, f"360 reviews, field-identical, unique URLs, {elapsed:.2f}s")


def test_criterion_7_politeness(fixture_server):
    """Consecutive same-host fetches are >= 50 ms apart across a whole crawl."""
    policy = FetchPolicy(min_delay_s=0.05, max_retries=0, timeout_s=10.0)
    plan = plan_crawl(Company("empresa-a", "A"), fixture_server.base_url, 6000)
    log = []
    run_crawl(plan, policy, lambda r: None, fetch_log=log)
    assert len(log) == 5
    gaps = [
        (later.started_at - earlier.started_at).total_seconds()
        for earlier, later in zip(log, log[1:])
    ]
    assert all(gap >= 0.05 for gap in gaps), gaps
    ok(7, f"gaps {['%.3f' % g for g in gaps]} s, all >= 0.050 s")


def test_criterion_8_dedup_idempotence(fixture_site_default, tmp_path):
    """Appending one 120-review batch twice: 120 inserted, then 120 duplicates."""
    from reputex.domain import Review, utc_now

    batch = [
        Review(
            company_slug="empresa-a",
            description=r.description,
            classification=r.classification,
            posted_date=r.posted_date,
            source_url="http://fixture.local/company/empresa-a/reviews?page=1",
            fetched_at=utc_now(),
        )
        for r in fixture_site_default.ground_truth["empresa-a"]
    ]
    store = ReviewStore(tmp_path / "store")
    first = store.append_reviews("empresa-a", batch)
    second = store.append_reviews("empresa-a", batch)
    assert (first.inserted, first.duplicates) == (120, 0)
    assert (second.inserted, second.duplicates) == (0, 120)
    before = store.list_reviews("empresa-a", limit=1000)
    reloaded = ReviewStore(tmp_path / "store").list_reviews("empresa-a", limit=1000)
    assert reloaded.total == before.total == 120
    assert reloaded.items == before.items
    ok(8, "inserted=120/dup=0 then inserted=0/dup=120; reload identical")


def test_criterion_9_end_to_end_determinism(fixture_server, tmp_path):
    """CLI crawl + model --seed 7 from an empty store is byte-reproducible."""

    def pipeline(store_dir) -> bytes:
        crawl = subprocess.run(
            [
                sys.executable, "-m", "reputex.cli", "crawl", "empresa-a",
                "--store", str(store_dir),
                "--base-url", fixture_server.base_url,
                "--min-delay-ms", "0",
            ],
            capture_output=True,
            timeout=120,
        )
        assert crawl.returncode == 0, crawl.stderr.decode()
        model = subprocess.run(
            [
                sys.executable, "-m", "reputex.cli", "model", "empresa-a",
                "--store", str(store_dir),
                "--seed", "7",
                "--format", "structured",
            ],
            capture_output=True,
            timeout=300,
        )
        assert model.returncode == 0, model.stderr.decode()
        return model.stdout

    first = pipeline(tmp_path / "run1")
    second = pipeline(tmp_path / "run2")
    assert first == second
    assert first.count(b"\n") == 6  # parameters line + 5 topic lines
    ok(9, f"two runs, {len(first)} identical bytes of structured report")


def test_criterion_10_table_1_scale_smoke(tmp_path):
    """Full pipeline at production volume (6000 comments) in < 5 minutes."""
    start = time.perf_counter()
    spec = FixtureSpec(
        companies=(
            FixtureCompany("empresa-g", "Empresa G", "Bens de Consumo", 6000, 0.7),
        ),
        seed=99,
    )
    site = generate_site(spec)
    store = ReviewStore(tmp_path / "store")
    with serve_fixture(site) as handle:
        plan = plan_crawl(Company("empresa-g", "G"), handle.base_url, 6000)
        summary = run_crawl(
            plan, ZERO_DELAY, lambda r: store.append_reviews("empresa-g", [r])
        )
    assert summary.reviews_extracted == 6000
    crawl_done = time.perf_counter()
    reviews = store.all_reviews("empresa-g")
    corpus = textprep.encode_corpus(reviews)
    encode_done = time.perf_counter()
    state = train(corpus, LdaHyperparams(K=5, iterations=1000, seed=0))
    report = top_terms(state)
    assert len(report.topics) == 5
    elapsed = time.perf_counter() - start
    assert elapsed < 300.0, f"took {elapsed:.1f}s"
    ok(
        10,
        f"crawl {crawl_done - start:.1f}s, encode {encode_done - crawl_done:.1f}s, "
        f"train({topics.BACKEND_NAME}) {elapsed - (encode_done - start):.1f}s, "
        f"total {elapsed:.1f}s < 300s",
    )

"""Deterministic synthetic review-listing site.

Generates paginated listing pages in the canonical HTML shape the crawler
consumes, and serves them over a local HTTP server. The generated review set
is kept as ground truth so crawl tests can assert exact round-trips.

Canonical listing shape (normative, shared with crawler.parse_review_listing):

    <ul class="review-list">
      <li class="review-item">
        <p class="review-text">...</p>
        <span class="review-kind">Elogio|Reclamação</span>
        <span class="review-date">dd/mm/yyyy</span>
      </li>
      ...
    </ul>
    <a rel="next" href="...">   (only when another page exists)

Route template: GET /company/<slug>/reviews?page=N (1-based).
"""

from __future__ import annotations

import html
import json
import re
import threading
from dataclasses import dataclass, field
from datetime import date, timedelta
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .domain import ReviewClassification
from .rng import SplitMix64

# Newest review carries this date; each older review is one day earlier.
DATE_EPOCH = date(2018, 6, 30)

_FAULT_ROUTE_RE = re.compile(r"^/fault/(\d{3})$")
_LISTING_ROUTE_RE = re.compile(r"^/company/([a-z0-9-]+)/reviews$")


class BindError(OSError):
    """The requested port could not be bound."""


# Phrase themes use vocabulary typical of e-commerce reviews (preço, frete,
# entrega, prazo, desconto, ...). Praise and complaint pools are kept
# thematic so small topic runs have recoverable structure.
PRAISE_PHRASES: tuple[tuple[str, ...], ...] = (
    (
        "Entrega rápida e produto dentro do prazo",
        "A entrega chegou antes do prazo combinado",
        "Produto entregue no prazo, entrega excelente",
        "Prazo de entrega cumprido, chegou tudo certo",
        "Entrega sempre no prazo, recomendo a loja",
    ),
    (
        "Preço baixo e frete grátis na compra",
        "Frete grátis e desconto no preço do produto",
        "Melhor preço do mercado e frete barato",
        "Comprei com desconto, preço excelente",
        "Preço bom, desconto aplicado e frete grátis",
    ),
    (
        "Site fácil de usar, compra com facilidade",
        "Facilidade na compra pelo site, tudo fácil",
        "O site é rápido e a compra foi simples",
        "Comprar pelo site é fácil e prático",
        "Site organizado, achei o produto com facilidade",
    ),
    (
        "Loja boa, produto excelente, gostei muito",
        "Produto de ótima qualidade, loja excelente",
        "Gostei do produto, a loja é muito boa",
        "Ótimo produto, sempre compro nessa loja",
        "Loja confiável e produto bom, parabéns",
    ),
    (
        "Empresa de confiança, marca excelente",
        "Confio na {company}, sempre compro sem problema",
        "Marca de confiança, a {company} é ótima",
        "A {company} é uma empresa séria e confiável",
        "Confiança total na loja, empresa excelente",
    ),
)

COMPLAINT_PHRASES: tuple[tuple[str, ...], ...] = (
    (
        "Entrega atrasada, o prazo não foi cumprido",
        "Produto chegou fora do prazo, entrega ruim",
        "Atraso na entrega, esperei muito pelo produto",
        "Prazo de entrega estourado, péssima experiência",
        "A entrega atrasou e ninguém avisou do atraso",
    ),
    (
        "Produto veio com defeito, tive problema",
        "Problema com o produto, veio errado",
        "Produto de qualidade ruim, decepcionado",
        "O produto quebrou na primeira semana, problema sério",
        "Recebi o produto com defeito de fábrica",
    ),
    (
        "Preço alto e frete caro demais",
        "Cobraram frete caro e o preço subiu no checkout",
        "Preço abusivo, desconto prometido não veio",
        "Frete mais caro que o produto, absurdo",
        "Preço diferente do anunciado, me senti enganado",
    ),
    (
        "Atendimento péssimo, ninguém resolve o problema",
        "Suporte demorado, atendimento ruim da loja",
        "A loja não responde, atendimento horrível",
        "Tentei contato com a {company} e nada de resposta",
        "Atendimento da {company} deixou a desejar",
    ),
)


@dataclass(frozen=True)
class FixtureCompany:
    slug: str
    name: str
    sector: str
    review_count: int
    praise_fraction: float

    def __post_init__(self):
        if self.review_count < 0:
            raise ValueError("review_count must be >= 0")
        if not 0.0 <= self.praise_fraction <= 1.0:
            raise ValueError("praise_fraction must be in [0, 1]")


@dataclass(frozen=True)
class FixtureSpec:
    companies: tuple[FixtureCompany, ...]
    page_size: int = 25
    seed: int = 1
    praise_phrases: tuple[tuple[str, ...], ...] = PRAISE_PHRASES
    complaint_phrases: tuple[tuple[str, ...], ...] = COMPLAINT_PHRASES

    def __post_init__(self):
        if self.page_size < 1:
            raise ValueError("page_size must be >= 1")


@dataclass(frozen=True)
class GroundTruthReview:
    description: str
    classification: ReviewClassification
    posted_date: date


@dataclass
class FixtureSite:
    spec: FixtureSpec
    companies: dict[str, FixtureCompany] = field(default_factory=dict)
    ground_truth: dict[str, list[GroundTruthReview]] = field(default_factory=dict)
    pages: dict[str, list[str]] = field(default_factory=dict)


def load_fixture_spec(path: str | Path) -> FixtureSpec:
    """Read a fixture spec file: {"companies": [...], "page_size", "seed"}."""
    data = json.loads(Path(path).read_text("utf-8"))
    companies = tuple(
        FixtureCompany(
            slug=c["slug"],
            name=c.get("name", c["slug"]),
            sector=c.get("sector", ""),
            review_count=int(c["review_count"]),
            praise_fraction=float(c.get("praise_fraction", 0.7)),
        )
        for c in data["companies"]
    )
    return FixtureSpec(
        companies=companies,
        page_size=int(data.get("page_size", 25)),
        seed=int(data.get("seed", 1)),
    )


def default_spec(seed: int = 1) -> FixtureSpec:
    """Three companies mirroring the studied-companies setup at desk scale."""
    return FixtureSpec(
        companies=(
            FixtureCompany("empresa-a", "Empresa A", "Bens de Consumo e Serviços de Viagem", 120, 0.5833333),
            FixtureCompany("empresa-b", "Empresa B", "Bens de Consumo", 120, 0.75),
            FixtureCompany("empresa-c", "Empresa C", "Eletrodomésticos", 120, 0.65),
        ),
        seed=seed,
    )


def _round_half_up(x: float) -> int:
    return int(x + 0.5)


def generate_site(spec: FixtureSpec) -> FixtureSite:
    """Deterministic in (spec, seed): same inputs give byte-identical pages."""
    site = FixtureSite(spec=spec)
    for company in spec.companies:
        rng = SplitMix64(spec.seed ^ _slug_hash(company.slug))
        n = company.review_count
        praise_count = _round_half_up(n * company.praise_fraction)
        kinds = [ReviewClassification.PRAISE] * praise_count + [
            ReviewClassification.COMPLAINT
        ] * (n - praise_count)
        rng.shuffle(kinds)
        reviews = []
        for i, kind in enumerate(kinds):
            pools = (
                spec.praise_phrases
                if kind is ReviewClassification.PRAISE
                else spec.complaint_phrases
            )
            theme = rng.choice(pools)
            parts = [rng.choice(theme) for _ in range(1 + rng.randbelow(2))]
            text = ". ".join(parts).format(company=company.name)
            reviews.append(
                GroundTruthReview(
                    description=text,
                    classification=kind,
                    posted_date=DATE_EPOCH - timedelta(days=i),
                )
            )
        site.companies[company.slug] = company
        site.ground_truth[company.slug] = reviews
        site.pages[company.slug] = _render_pages(company, reviews, spec.page_size)
    return site


def _slug_hash(slug: str) -> int:
    h = 0
    for ch in slug.encode("utf-8"):
        h = (h * 131 + ch) & 0xFFFFFFFFFFFFFFFF
    return h


def _render_pages(
    company: FixtureCompany, reviews: list[GroundTruthReview], page_size: int
) -> list[str]:
    page_count = (len(reviews) + page_size - 1) // page_size
    pages = []
    for page_no in range(1, page_count + 1):
        chunk = reviews[(page_no - 1) * page_size : page_no * page_size]
        items = []
        for r in chunk:
            kind = "Elogio" if r.classification is ReviewClassification.PRAISE else "Reclamação"
            items.append(
                "    <li class=\"review-item\">\n"
                f"      <p class=\"review-text\">{html.escape(r.description)}</p>\n"
                f"      <span class=\"review-kind\">{kind}</span>\n"
                f"      <span class=\"review-date\">{r.posted_date.strftime('%d/%m/%Y')}</span>\n"
                "    </li>"
            )
        next_link = (
            f"  <a rel=\"next\" href=\"/company/{company.slug}/reviews?page={page_no + 1}\">"
            "Próxima página</a>\n"
            if page_no < page_count
            else ""
        )
        pages.append(
            "<!DOCTYPE html>\n"
            "<html lang=\"pt-BR\">\n"
            "<head>\n"
            "  <meta charset=\"utf-8\">\n"
            f"  <title>{html.escape(company.name)} - Avaliações - página {page_no}</title>\n"
            "</head>\n"
            "<body>\n"
            f"  <h1>{html.escape(company.name)}</h1>\n"
            f"  <p class=\"company-sector\">{html.escape(company.sector)}</p>\n"
            "  <ul class=\"review-list\">\n"
            + "\n".join(items)
            + "\n  </ul>\n"
            + next_link
            + "</body>\n"
            "</html>\n"
        )
    return pages


class _FixtureHandler(BaseHTTPRequestHandler):
    server: "FixtureHTTPServer"

    def do_GET(self):  # noqa: N802 (http.server API)
        parsed = urlparse(self.path)
        override = self.server.faults.get(self.path) or self.server.faults.get(parsed.path)
        if override is not None:
            self._send_status(override)
            return
        fault = _FAULT_ROUTE_RE.match(parsed.path)
        if fault:
            self._send_status(int(fault.group(1)))
            return
        listing = _LISTING_ROUTE_RE.match(parsed.path)
        if listing:
            slug = listing.group(1)
            pages = self.server.site.pages.get(slug)
            try:
                page_no = int(parse_qs(parsed.query).get("page", ["1"])[0])
            except ValueError:
                page_no = -1
            if pages is None or not 1 <= page_no <= len(pages):
                self._send_status(404)
                return
            body = pages[page_no - 1].encode("utf-8")
            self.send_response(200)
            self.send_header("Content-Type", "text/html; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
            return
        self._send_status(404)

    def _send_status(self, status: int):
        body = f"status {status}\n".encode()
        self.send_response(status)
        self.send_header("Content-Type", "text/plain; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, fmt, *args):
        pass  # keep test output quiet


class FixtureHTTPServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, site: FixtureSite, faults: dict[str, int]):
        self.site = site
        self.faults = faults
        super().__init__(address, _FixtureHandler)


class FixtureServerHandle:
    """Running fixture server; close() stops it."""

    def __init__(self, server: FixtureHTTPServer):
        self._server = server
        self._thread = threading.Thread(target=server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    @property
    def base_url(self) -> str:
        return f"http://127.0.0.1:{self.port}"

    def close(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def serve_fixture(
    site: FixtureSite, port: int = 0, faults: dict[str, int] | None = None
) -> FixtureServerHandle:
    """Start serving the site on 127.0.0.1:port (0 picks a free port)."""
    try:
        server = FixtureHTTPServer(("127.0.0.1", port), site, faults or {})
    except OSError as exc:
        raise BindError(f"cannot bind port {port}: {exc}") from exc
    return FixtureServerHandle(server)

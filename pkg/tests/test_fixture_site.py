from __future__ import annotations

import json

import pytest
import requests

from reputex.domain import ReviewClassification
from reputex.fixture_site import (
    BindError,
    FixtureCompany,
    FixtureSpec,
    default_spec,
    generate_site,
    load_fixture_spec,
    serve_fixture,
)


def one_company_spec(count=120, praise_fraction=0.5833333, page_size=25, seed=1):
    return FixtureSpec(
        companies=(
            FixtureCompany("empresa-a", "Empresa A", "Bens de Consumo", count, praise_fraction),
        ),
        page_size=page_size,
        seed=seed,
    )


class TestGenerate:
    def test_page_count_ceiling_division(self):
        site = generate_site(one_company_spec(120))
        assert len(site.pages["empresa-a"]) == 5
        assert site.pages["empresa-a"][4].count('class="review-item"') == 20

    def test_praise_split_is_exact(self):
        site = generate_site(one_company_spec(120, praise_fraction=0.5833333))
        truth = site.ground_truth["empresa-a"]
        praise = sum(1 for r in truth if r.classification is ReviewClassification.PRAISE)
        assert praise == 70
        assert len(truth) - praise == 50

    def test_deterministic_pages(self):
        a = generate_site(one_company_spec(seed=9))
        b = generate_site(one_company_spec(seed=9))
        assert a.pages == b.pages

    def test_different_seed_differs(self):
        a = generate_site(one_company_spec(seed=1))
        b = generate_site(one_company_spec(seed=2))
        assert a.pages != b.pages

    def test_dates_descend_by_one_day(self):
        truth = generate_site(one_company_spec(10)).ground_truth["empresa-a"]
        deltas = {
            (truth[i].posted_date - truth[i + 1].posted_date).days
            for i in range(len(truth) - 1)
        }
        assert deltas == {1}

    def test_next_link_chain(self):
        pages = generate_site(one_company_spec(120)).pages["empresa-a"]
        for n, page in enumerate(pages[:-1], start=1):
            assert f'rel="next" href="/company/empresa-a/reviews?page={n + 1}"' in page
        assert 'rel="next"' not in pages[-1]

    def test_company_name_substituted_in_phrases(self):
        truth = generate_site(default_spec(seed=1)).ground_truth["empresa-a"]
        assert not any("{company}" in r.description for r in truth)

    def test_load_spec_file(self, tmp_path):
        spec_file = tmp_path / "fixture.json"
        spec_file.write_text(
            json.dumps(
                {
                    "companies": [
                        {"slug": "loja-x", "review_count": 30, "praise_fraction": 0.5}
                    ],
                    "page_size": 10,
                    "seed": 4,
                }
            ),
            encoding="utf-8",
        )
        spec = load_fixture_spec(spec_file)
        assert spec.companies[0].slug == "loja-x"
        assert spec.page_size == 10
        site = generate_site(spec)
        assert len(site.pages["loja-x"]) == 3


class TestServer:
    def test_listing_page_served(self, fixture_server):
        resp = requests.get(
            f"{fixture_server.base_url}/company/empresa-a/reviews?page=1", timeout=5
        )
        assert resp.status_code == 200
        assert resp.text.count('class="review-item"') == 25

    def test_out_of_range_page_404(self, fixture_server):
        resp = requests.get(
            f"{fixture_server.base_url}/company/empresa-a/reviews?page=6", timeout=5
        )
        assert resp.status_code == 404

    def test_unknown_company_404(self, fixture_server):
        resp = requests.get(
            f"{fixture_server.base_url}/company/nao-existe/reviews?page=1", timeout=5
        )
        assert resp.status_code == 404

    def test_fault_route(self, fixture_server):
        resp = requests.get(f"{fixture_server.base_url}/fault/500", timeout=5)
        assert resp.status_code == 500

    def test_configured_fault_override(self, fixture_site_default):
        faults = {"/company/empresa-a/reviews": 503}
        with serve_fixture(fixture_site_default, faults=faults) as handle:
            resp = requests.get(
                f"{handle.base_url}/company/empresa-a/reviews?page=1", timeout=5
            )
            assert resp.status_code == 503

    def test_bind_error_on_occupied_port(self, fixture_server, fixture_site_default):
        with pytest.raises(BindError):
            serve_fixture(fixture_site_default, port=fixture_server.port)

import { describe, expect, it } from 'vitest';

import type { ReviewPage, StoredReport } from '../src/api.js';
import {
  renderJobStatus,
  renderPagination,
  renderReviewTable,
  renderTopicTable,
} from '../src/render.js';

function page(count: number, total: number, offset = 0): ReviewPage {
  return {
    items: Array.from({ length: count }, (_, i) => ({
      description: `Comentário ${i}`,
      classification: i % 2 === 0 ? ('Praise' as const) : ('Complaint' as const),
      posted_date: '2018-03-05',
      source_url: 'http://x/company/empresa-a/reviews?page=1',
    })),
    total,
    offset,
    limit: 50,
  };
}

describe('renderReviewTable', () => {
  it('renders exactly three data columns', () => {
    const html = renderReviewTable(page(2, 2));
    expect(html).toContain('<th>Description</th><th>Classification</th><th>Date</th>');
    expect((html.match(/<th>/g) ?? []).length).toBe(3);
  });

  it('renders one row per item', () => {
    const html = renderReviewTable(page(50, 120));
    expect((html.match(/<tr>/g) ?? []).length).toBe(51); // header + 50
  });

  it('shows the filtered total in the footer', () => {
    const html = renderReviewTable(page(50, 120));
    expect(html).toContain('showing 1-50 of 120');
  });

  it('renders the empty placeholder', () => {
    expect(renderReviewTable(page(0, 0))).toContain('no reviews');
    expect(renderReviewTable(null)).toContain('no reviews');
  });

  it('emits review values verbatim apart from escaping', () => {
    const p = page(1, 1);
    p.items[0]!.description = 'Bom & <barato>';
    const html = renderReviewTable(p);
    expect(html).toContain('Bom &amp; &lt;barato&gt;');
    expect(html).toContain('2018-03-05');
    expect(html).toContain('Praise');
  });
});

describe('renderTopicTable', () => {
  const report: StoredReport = {
    company_slug: 'empresa-a',
    created_at: '2026-01-01T00:00:00+00:00',
    parameters: { K: 5 },
    topics: [
      [
        { term: 'preço', probability: 0.3123456 },
        { term: 'loja', probability: 0.11 },
      ],
      [{ term: 'frete', probability: 0.42 }],
      [],
      [{ term: 'entrega', probability: 0.2 }],
      [{ term: 'bom', probability: 0.05 }],
    ],
  };

  it('renders one row per topic with its index', () => {
    const html = renderTopicTable(report);
    expect((html.match(/<tr>/g) ?? []).length).toBe(6); // header + 5 topics
    expect(html).toContain('<td class="topic-index">0</td>');
    expect(html).toContain('<td class="topic-index">4</td>');
  });

  it('prints probabilities with four decimals', () => {
    const html = renderTopicTable(report);
    expect(html).toContain('preço <em>0.3123</em>');
  });

  it('renders the placeholder before any report', () => {
    expect(renderTopicTable(null)).toContain('no report yet');
  });
});

describe('renderJobStatus', () => {
  it('summarizes a finished job', () => {
    const html = renderJobStatus({
      job_id: 'j',
      company_slug: 'empresa-a',
      state: 'Done',
      summary: {
        pages_fetched: 5,
        reviews_extracted: 120,
        warnings: [],
        inserted: 120,
        duplicates: 0,
      },
      error: null,
      created_at: '',
      finished_at: '',
    });
    expect(html).toContain('120 reviews over 5 pages');
  });

  it('shows failures with the error text', () => {
    const html = renderJobStatus({
      job_id: 'j',
      company_slug: 'empresa-a',
      state: 'Failed',
      summary: null,
      error: 'HTTP 404',
      created_at: '',
      finished_at: '',
    });
    expect(html).toContain('crawl failed');
    expect(html).toContain('HTTP 404');
  });
});

describe('renderPagination', () => {
  it('disables both controls without data', () => {
    expect(renderPagination(null)).toEqual({ prevDisabled: true, nextDisabled: true });
  });

  it('enables next when more rows exist', () => {
    expect(renderPagination(page(50, 120, 0))).toEqual({
      prevDisabled: true,
      nextDisabled: false,
    });
    expect(renderPagination(page(20, 120, 100))).toEqual({
      prevDisabled: false,
      nextDisabled: true,
    });
  });
});

// Pure HTML renderers. No DOM access and no data mutation: review fields and
// report terms are emitted exactly as the API sent them (only HTML-escaped).

import type { CompanySummary, CrawlJobRecord, ReviewPage, StoredReport } from './api.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function renderReviewTable(page: ReviewPage | null): string {
  if (page === null || page.total === 0) {
    return '<p class="placeholder">no reviews</p>';
  }
  const rows = page.items
    .map(
      (item) =>
        '<tr>' +
        `<td class="col-description">${escapeHtml(item.description)}</td>` +
        `<td class="col-classification">${escapeHtml(item.classification)}</td>` +
        `<td class="col-date">${escapeHtml(item.posted_date)}</td>` +
        '</tr>',
    )
    .join('');
  const upper = Math.min(page.offset + page.items.length, page.total);
  return (
    '<table class="review-table">' +
    '<thead><tr><th>Description</th><th>Classification</th><th>Date</th></tr></thead>' +
    `<tbody>${rows}</tbody>` +
    '</table>' +
    `<p class="table-footer">showing ${page.offset + 1}-${upper} of ${page.total}</p>`
  );
}

export function renderTopicTable(report: StoredReport | null): string {
  if (report === null) {
    return '<p class="placeholder">no report yet</p>';
  }
  const rows = report.topics
    .map((terms, index) => {
      const cells = terms
        .map(
          (t) =>
            `<span class="topic-term">${escapeHtml(t.term)} ` +
            `<em>${t.probability.toFixed(4)}</em></span>`,
        )
        .join(' ');
      return `<tr><td class="topic-index">${index}</td><td class="topic-terms">${cells}</td></tr>`;
    })
    .join('');
  return (
    '<table class="topic-table">' +
    '<thead><tr><th>Topic</th><th>Top terms</th></tr></thead>' +
    `<tbody>${rows}</tbody>` +
    '</table>'
  );
}

export function renderJobStatus(job: CrawlJobRecord | null): string {
  if (job === null) {
    return '';
  }
  if (job.state === 'Failed') {
    return `<p class="job job-failed">crawl failed: ${escapeHtml(job.error ?? 'unknown error')}</p>`;
  }
  if (job.state === 'Done' && job.summary) {
    return (
      `<p class="job job-done">crawl done: ${job.summary.reviews_extracted} reviews over ` +
      `${job.summary.pages_fetched} pages (${job.summary.inserted} new)</p>`
    );
  }
  return `<p class="job job-running">crawl ${job.state.toLowerCase()}…</p>`;
}

export function renderBanner(message: string | null): string {
  return message === null ? '' : `<div class="banner">${escapeHtml(message)}</div>`;
}

export function renderCompanyOptions(companies: CompanySummary[]): string {
  return companies
    .map((c) => `<option value="${escapeHtml(c.slug)}">${escapeHtml(c.name)}</option>`)
    .join('');
}

export function renderPagination(
  page: ReviewPage | null,
): { prevDisabled: boolean; nextDisabled: boolean } {
  if (page === null) {
    return { prevDisabled: true, nextDisabled: true };
  }
  return {
    prevDisabled: page.offset <= 0,
    nextDisabled: page.offset + page.items.length >= page.total,
  };
}

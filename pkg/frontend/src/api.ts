// Typed client for the reputex service. Only the documented endpoints are
// used; every non-2xx response carries the uniform {status, code, message}
// error shape and is surfaced as ApiRequestError.

export type Classification = 'Praise' | 'Complaint';
export type JobState = 'Queued' | 'Running' | 'Done' | 'Failed';
export type ExportFormat = 'delimited-table' | 'structured-records';

export interface ReviewItem {
  description: string;
  classification: Classification;
  posted_date: string;
  source_url: string;
}

export interface ReviewPage {
  items: ReviewItem[];
  total: number;
  offset: number;
  limit: number;
}

export interface CrawlSummary {
  pages_fetched: number;
  reviews_extracted: number;
  warnings: string[];
  inserted: number;
  duplicates: number;
}

export interface CrawlJobRecord {
  job_id: string;
  company_slug: string;
  state: JobState;
  summary: CrawlSummary | null;
  error: string | null;
  created_at: string;
  finished_at: string | null;
}

export interface TopicTerm {
  term: string;
  probability: number;
}

export interface StoredReport {
  company_slug: string;
  created_at: string;
  parameters: Record<string, number>;
  topics: TopicTerm[][];
  report_id?: string;
}

export interface CompanySummary {
  slug: string;
  name: string;
  sector: string;
  praise: number;
  complaint: number;
  total: number;
}

export interface TopicsParams {
  K?: number;
  words?: number;
  min_prob?: number;
  seed?: number;
  iterations?: number;
}

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiRequestError';
  }
}

export class ReputexApi {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await (0, this.fetchFn)(this.baseUrl + path, init);
    if (!response.ok) {
      throw await errorFromResponse(response);
    }
    return (await response.json()) as T;
  }

  startCrawl(slug: string, body: { base_url?: string; max_reviews?: number } = {}): Promise<CrawlJobRecord> {
    return this.request(`/companies/${encodeURIComponent(slug)}/crawl`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  getJob(jobId: string): Promise<CrawlJobRecord> {
    return this.request(`/jobs/${encodeURIComponent(jobId)}`);
  }

  listReviews(
    slug: string,
    opts: { classification?: Classification; offset?: number; limit?: number } = {},
  ): Promise<ReviewPage> {
    const query = new URLSearchParams();
    if (opts.classification) query.set('classification', opts.classification);
    if (opts.offset !== undefined) query.set('offset', String(opts.offset));
    if (opts.limit !== undefined) query.set('limit', String(opts.limit));
    const suffix = query.size > 0 ? `?${query.toString()}` : '';
    return this.request(`/companies/${encodeURIComponent(slug)}/reviews${suffix}`);
  }

  runTopics(slug: string, params: TopicsParams = {}): Promise<StoredReport> {
    return this.request(`/companies/${encodeURIComponent(slug)}/topics`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(params),
    });
  }

  latestReport(slug: string): Promise<StoredReport> {
    return this.request(`/companies/${encodeURIComponent(slug)}/topics/latest`);
  }

  listCompanies(): Promise<CompanySummary[]> {
    return this.request('/companies');
  }

  exportUrl(slug: string, format: ExportFormat): string {
    return `${this.baseUrl}/companies/${encodeURIComponent(slug)}/export?format=${format}`;
  }

  // The export stream is passed through unmodified.
  async fetchExport(slug: string, format: ExportFormat): Promise<{ filename: string; content: string }> {
    const response = await (0, this.fetchFn)(this.exportUrl(slug, format));
    if (!response.ok) {
      throw await errorFromResponse(response);
    }
    const disposition = response.headers.get('content-disposition') ?? '';
    const match = /filename="([^"]+)"/.exec(disposition);
    const fallback = `${slug}-reviews.${format === 'delimited-table' ? 'csv' : 'jsonl'}`;
    return { filename: match?.[1] ?? fallback, content: await response.text() };
  }
}

async function errorFromResponse(response: Response): Promise<ApiRequestError> {
  try {
    const body = (await response.json()) as { status?: number; code?: string; message?: string };
    return new ApiRequestError(
      body.status ?? response.status,
      body.code ?? 'internal',
      body.message ?? response.statusText,
    );
  } catch {
    return new ApiRequestError(response.status, 'internal', response.statusText);
  }
}

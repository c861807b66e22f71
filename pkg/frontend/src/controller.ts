// DOM-free workflow state machine: search -> crawl -> poll -> table -> topics
// -> export. The view layer subscribes via onChange and re-renders snapshots.

import {
  ApiRequestError,
  type Classification,
  type CrawlJobRecord,
  type ExportFormat,
  type ReputexApi,
  type ReviewPage,
  type StoredReport,
  type TopicsParams,
} from './api.js';

export interface UiState {
  company: string | null;
  job: CrawlJobRecord | null;
  reviews: ReviewPage | null;
  filter: Classification | null;
  offset: number;
  pageSize: number;
  report: StoredReport | null;
  banner: string | null;
  busy: boolean;
}

const SLUG_PATTERN = /^[a-z0-9-]+$/;

function initialState(): UiState {
  return {
    company: null,
    job: null,
    reviews: null,
    filter: null,
    offset: 0,
    pageSize: 50,
    report: null,
    banner: null,
    busy: false,
  };
}

export class AppController {
  state: UiState = initialState();

  // Serializes user actions: each queued behind the previous request.
  private queue: Promise<unknown> = Promise.resolve();

  constructor(
    private readonly api: ReputexApi,
    private readonly pollIntervalMs: number = 1000,
    private readonly onChange: (state: UiState) => void = () => {},
  ) {}

  private emit(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    this.onChange(this.state);
  }

  private enqueue<T>(task: () => Promise<T>): Promise<T> {
    const next = this.queue.then(task, task);
    this.queue = next.catch(() => undefined);
    return next;
  }

  private showError(error: unknown): void {
    if (error instanceof ApiRequestError) {
      this.emit({ banner: `${error.code}: ${error.message}`, busy: false });
    } else {
      this.emit({ banner: String(error), busy: false });
    }
  }

  /** Map free-text input to a slug, via GET /companies when not slug-shaped. */
  async resolveCompany(input: string): Promise<string> {
    const trimmed = input.trim();
    if (SLUG_PATTERN.test(trimmed)) {
      return trimmed;
    }
    const companies = await this.api.listCompanies();
    const hit = companies.find((c) => c.name.toLowerCase() === trimmed.toLowerCase());
    if (!hit) {
      throw new ApiRequestError(404, 'unknown_company', `no company named ${trimmed}`);
    }
    return hit.slug;
  }

  /** Start a crawl and poll it to a terminal state, refreshing the table. */
  searchAndCrawl(input: string): Promise<void> {
    return this.enqueue(async () => {
      if (!input.trim()) {
        return; // the submit control is disabled on empty input anyway
      }
      try {
        const slug = await this.resolveCompany(input);
        this.emit({ company: slug, banner: null, busy: true, offset: 0, report: null });
        const job = await this.api.startCrawl(slug);
        this.emit({ job });
        await this.pollUntilTerminal(job.job_id);
      } catch (error) {
        this.showError(error);
      }
    });
  }

  private async pollUntilTerminal(jobId: string): Promise<void> {
    // One in-flight poll at a time; the table refreshes progressively on each.
    for (;;) {
      const job = await this.api.getJob(jobId);
      await this.refreshReviewsNow();
      this.emit({ job });
      if (job.state === 'Done' || job.state === 'Failed') {
        this.emit({ busy: false, banner: job.state === 'Failed' ? job.error : null });
        return;
      }
      await sleep(this.pollIntervalMs);
    }
  }

  private async refreshReviewsNow(): Promise<void> {
    if (this.state.company === null) {
      return;
    }
    const reviews = await this.api.listReviews(this.state.company, {
      classification: this.state.filter ?? undefined,
      offset: this.state.offset,
      limit: this.state.pageSize,
    });
    this.emit({ reviews });
  }

  refreshReviews(): Promise<void> {
    return this.enqueue(async () => {
      try {
        await this.refreshReviewsNow();
      } catch (error) {
        this.showError(error);
      }
    });
  }

  setFilter(filter: Classification | null): Promise<void> {
    this.emit({ filter, offset: 0 });
    return this.refreshReviews();
  }

  turnPage(direction: 1 | -1): Promise<void> {
    const total = this.state.reviews?.total ?? 0;
    const next = this.state.offset + direction * this.state.pageSize;
    this.emit({ offset: Math.max(0, Math.min(next, Math.max(total - 1, 0))) });
    return this.refreshReviews();
  }

  runTopicModeling(params: TopicsParams = {}): Promise<void> {
    return this.enqueue(async () => {
      if (this.state.company === null) {
        return;
      }
      this.emit({ busy: true, banner: null });
      try {
        const report = await this.api.runTopics(this.state.company, params);
        this.emit({ report, busy: false });
      } catch (error) {
        this.showError(error);
      }
    });
  }

  exportFile(format: ExportFormat): Promise<{ filename: string; content: string } | null> {
    return this.enqueue(async () => {
      if (this.state.company === null) {
        return null;
      }
      try {
        return await this.api.fetchExport(this.state.company, format);
      } catch (error) {
        this.showError(error);
        return null;
      }
    });
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

// Browser entry point: wires the controller to the static page.

import { ReputexApi, type Classification, type ExportFormat } from './api.js';
import { AppController, type UiState } from './controller.js';
import {
  renderBanner,
  renderJobStatus,
  renderPagination,
  renderReviewTable,
  renderTopicTable,
} from './render.js';

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

const searchForm = byId<HTMLFormElement>('search-form');
const searchInput = byId<HTMLInputElement>('search-input');
const searchButton = byId<HTMLButtonElement>('search-button');
const bannerHost = byId<HTMLDivElement>('banner');
const jobHost = byId<HTMLDivElement>('job-status');
const tableHost = byId<HTMLDivElement>('review-table');
const topicsHost = byId<HTMLDivElement>('topic-table');
const filterSelect = byId<HTMLSelectElement>('filter-select');
const prevButton = byId<HTMLButtonElement>('prev-page');
const nextButton = byId<HTMLButtonElement>('next-page');
const topicsButton = byId<HTMLButtonElement>('topics-button');
const exportCsvButton = byId<HTMLButtonElement>('export-csv');
const exportJsonlButton = byId<HTMLButtonElement>('export-jsonl');

function applyState(state: UiState): void {
  bannerHost.innerHTML = renderBanner(state.banner);
  jobHost.innerHTML = renderJobStatus(state.job);
  tableHost.innerHTML = renderReviewTable(state.reviews);
  topicsHost.innerHTML = renderTopicTable(state.report);
  const paging = renderPagination(state.reviews);
  prevButton.disabled = paging.prevDisabled;
  nextButton.disabled = paging.nextDisabled;
  const hasCompany = state.company !== null;
  topicsButton.disabled = !hasCompany || state.busy;
  exportCsvButton.disabled = !hasCompany;
  exportJsonlButton.disabled = !hasCompany;
  searchButton.disabled = state.busy || searchInput.value.trim() === '';
}

const api = new ReputexApi('');
const controller = new AppController(api, 1000, applyState);

searchInput.addEventListener('input', () => {
  searchButton.disabled = controller.state.busy || searchInput.value.trim() === '';
});

searchForm.addEventListener('submit', (event) => {
  event.preventDefault();
  void controller.searchAndCrawl(searchInput.value);
});

filterSelect.addEventListener('change', () => {
  const value = filterSelect.value;
  void controller.setFilter(value === '' ? null : (value as Classification));
});

prevButton.addEventListener('click', () => void controller.turnPage(-1));
nextButton.addEventListener('click', () => void controller.turnPage(1));
topicsButton.addEventListener('click', () => void controller.runTopicModeling());

async function download(format: ExportFormat): Promise<void> {
  const file = await controller.exportFile(format);
  if (!file) {
    return;
  }
  const blob = new Blob([file.content], { type: 'application/octet-stream' });
  const blobUrl = URL.createObjectURL(blob);
  const link = document.createElement('a');
  link.href = blobUrl;
  link.download = file.filename;
  document.body.append(link);
  link.click();
  link.remove();
  URL.revokeObjectURL(blobUrl);
}

exportCsvButton.addEventListener('click', () => void download('delimited-table'));
exportJsonlButton.addEventListener('click', () => void download('structured-records'));

applyState(controller.state);

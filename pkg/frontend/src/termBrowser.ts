// Term archive screen: filter the archive, pick terms into the basket,
// show supporting sentences. The server owns the selection; the basket in
// the store is a mirror that gets rebuilt from every server response.

import { ApiError, WorkbenchApi } from "./api.js";
import type { SentenceRow, TermListing, TermRow } from "./api.js";
import { t } from "./i18n.js";
import type { Store, TermFilter } from "./state.js";

interface PendingToggle {
  id: string;
  on: boolean;
}

export class TermBrowser {
  private listing: TermListing | null = null;
  private picked: string | null = null;
  private banner: string | null = null;
  private pending: PendingToggle | null = null;
  private sentenceView: { term: TermRow; rows: SentenceRow[] } | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: WorkbenchApi,
    private readonly store: Store,
    private readonly projectId: string,
  ) {}

  async mount(): Promise<void> {
    await this.refresh();
  }

  // Pull the archive from the server and rebuild the basket mirror.
  async refresh(): Promise<void> {
    const { filter } = this.store.get();
    try {
      this.listing = await this.api.terms(this.projectId, {
        kind: filter.kind,
        query: filter.query,
      });
      this.banner = null;
    } catch (err) {
      if (err instanceof ApiError) {
        this.banner = err.message;
      } else {
        throw err;
      }
    }
    this.render();
  }

  // Periodic reconciliation: once the server is idle again, drop the banner
  // and re-read the archive.
  async poll(): Promise<void> {
    if (this.banner === null) return;
    const status = await this.api.status(this.projectId);
    if (status.running === null) await this.refresh();
  }

  private rows(): TermRow[] {
    if (this.listing === null) return [];
    return this.listing.terms.map((term) => {
      if (this.pending && this.pending.id === term.id) {
        return { ...term, selected: this.pending.on };
      }
      return term;
    });
  }

  private selectedRows(): TermRow[] {
    return this.rows().filter((term) => term.selected);
  }

  private syncBasket(): void {
    this.store.patch({ basket: this.selectedRows().map((term) => term.id) });
  }

  private async setSelected(id: string, on: boolean): Promise<void> {
    this.pending = { id, on };
    this.syncBasket();
    this.render();
    try {
      await this.api.setSelected(this.projectId, id, on);
      this.pending = null;
      await this.refresh();
    } catch (err) {
      this.pending = null;
      if (err instanceof ApiError) {
        this.banner = err.message;
        this.syncBasket();
        this.render();
      } else {
        throw err;
      }
    }
  }

  async selectPicked(): Promise<void> {
    if (this.picked !== null) await this.setSelected(this.picked, true);
  }

  async removePicked(): Promise<void> {
    if (this.picked !== null) await this.setSelected(this.picked, false);
  }

  // The selection is already persisted toggle by toggle; saving is an
  // explicit sync point that re-reads the server truth.
  async saveBasket(): Promise<void> {
    await this.refresh();
  }

  async showSentences(): Promise<void> {
    if (this.picked === null) {
      this.banner = t("noTermPicked");
      this.render();
      return;
    }
    const term = this.rows().find((row) => row.id === this.picked);
    if (!term) return;
    try {
      const rows = await this.api.sentences(this.projectId, term.id);
      this.sentenceView = { term, rows };
      this.render();
    } catch (err) {
      if (err instanceof ApiError) {
        this.banner = err.message;
        this.render();
      } else {
        throw err;
      }
    }
  }

  private async applyFilter(update: Partial<TermFilter>): Promise<void> {
    const { filter } = this.store.get();
    this.store.patch({ filter: { ...filter, ...update } });
    await this.refresh();
  }

  pick(id: string): void {
    this.picked = id;
    this.render();
  }

  render(): void {
    const disabled = this.banner !== null;
    const { filter } = this.store.get();
    const total = this.listing ? this.listing.total : 0;
    const rows = this.rows();
    const basket = this.selectedRows();
    this.syncBasket();

    const rowItem = (term: TermRow) => {
      const picked = term.id === this.picked ? " picked" : "";
      return `<li class="term-row${picked}" data-id="${term.id}">${esc(term.label)} (${term.frequency})</li>`;
    };

    const sentenceBlock = this.sentenceView
      ? `<section class="sentence-pane">
          <h4>${esc(t("sentencesFor", { label: this.sentenceView.term.label }))}</h4>
          <ol>${this.sentenceView.rows
            .map((row) => `<li><span class="ref">${esc(row.doc)}:${row.index + 1}</span> ${esc(row.text)}</li>`)
            .join("")}</ol>
        </section>`
      : "";

    this.root.innerHTML = `
      <div class="okb-analysis">
        <h2>${esc(t("openAnalysis"))}</h2>
        ${this.banner !== null ? `<div class="conflict-banner">${esc(this.banner)}</div>` : ""}
        <div class="filter-bar">
          <label>${esc(t("chooseKind"))}
            <select class="kind-filter" ${disabled ? "disabled" : ""}>
              <option value="" ${filter.kind === "" ? "selected" : ""}>${esc(t("allTerms", { n: total }))}</option>
              <option value="single" ${filter.kind === "single" ? "selected" : ""}>${esc(t("kindSingle"))}</option>
              <option value="multi" ${filter.kind === "multi" ? "selected" : ""}>${esc(t("kindMulti"))}</option>
              <option value="abbr" ${filter.kind === "abbr" ? "selected" : ""}>${esc(t("kindAbbr"))}</option>
            </select>
          </label>
          <input class="term-search" type="search" placeholder="${esc(t("searchTerms"))}"
                 value="${esc(filter.query)}" ${disabled ? "disabled" : ""}>
        </div>
        <div class="panes">
          <section class="archive-pane">
            <h3>${esc(t("chooseTerm"))}</h3>
            <ul class="term-list">${rows.map(rowItem).join("")}</ul>
            <div class="found-count">${esc(t("found", { n: rows.length }))}</div>
            <button class="btn-select" ${disabled ? "disabled" : ""}>${esc(t("selectTerm"))}</button>
            <button class="btn-sentences" ${disabled ? "disabled" : ""}>${esc(t("showSentences"))}</button>
          </section>
          <section class="basket-pane">
            <h3>${esc(t("basket"))}</h3>
            <ul class="basket-list">${basket.map(rowItem).join("")}</ul>
            <button class="btn-remove" ${disabled ? "disabled" : ""}>${esc(t("removeTerm"))}</button>
            <button class="btn-save" ${disabled ? "disabled" : ""}>${esc(t("saveBasket"))}</button>
          </section>
        </div>
        ${sentenceBlock}
      </div>`;

    this.wire();
  }

  private wire(): void {
    for (const item of this.root.querySelectorAll<HTMLElement>("li.term-row")) {
      item.addEventListener("click", () => this.pick(item.dataset.id ?? ""));
    }
    const kind = this.root.querySelector<HTMLSelectElement>("select.kind-filter");
    kind?.addEventListener("change", () => {
      void this.applyFilter({ kind: kind.value as TermFilter["kind"] });
    });
    const search = this.root.querySelector<HTMLInputElement>("input.term-search");
    search?.addEventListener("change", () => {
      void this.applyFilter({ query: search.value });
    });
    this.on("btn-select", () => void this.selectPicked());
    this.on("btn-remove", () => void this.removePicked());
    this.on("btn-save", () => void this.saveBasket());
    this.on("btn-sentences", () => void this.showSentences());
  }

  private on(cls: string, handler: () => void): void {
    this.root.querySelector(`button.${cls}`)?.addEventListener("click", handler);
  }
}

function esc(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

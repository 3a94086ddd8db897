// Standalone converter screen: paste or load a document, convert between
// the two ontology formats, download the result. Parse problems come back
// from the server with line positions and are shown inline.

import { ApiError, WorkbenchApi } from "./api.js";
import { t } from "./i18n.js";

type Direction = "kvp-owl" | "owl-kvp";

export class ConverterForm {
  direction: Direction = "kvp-owl";
  lastOutput: string | null = null;
  lastWarnings: string[] = [];
  private error: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: WorkbenchApi,
  ) {}

  mount(): void {
    this.render();
  }

  async convert(): Promise<void> {
    const input = this.inputArea()?.value ?? "";
    const from = this.direction === "kvp-owl" ? "kvp" : "owl";
    const to = this.direction === "kvp-owl" ? "owl" : "kvp";
    try {
      const result = await this.api.convert(input, from, to);
      this.lastOutput = result.output;
      this.lastWarnings = result.warnings;
      this.error = null;
    } catch (err) {
      if (err instanceof ApiError) {
        this.error = err.message;
        this.lastOutput = null;
        this.lastWarnings = [];
      } else {
        throw err;
      }
    }
    this.render();
  }

  private inputArea(): HTMLTextAreaElement | null {
    return this.root.querySelector<HTMLTextAreaElement>("textarea.convert-input");
  }

  render(): void {
    const keepInput = this.inputArea()?.value ?? "";
    const warningBlock = this.lastWarnings.length
      ? `<section class="convert-warnings">
          <h4>${esc(t("warningsTitle"))}</h4>
          <ul>${this.lastWarnings.map((w) => `<li>${esc(w)}</li>`).join("")}</ul>
        </section>`
      : "";

    this.root.innerHTML = `
      <div class="okb-converter">
        <h2>${esc(t("openConverter"))}</h2>
        <div class="convert-controls">
          <label>${esc(t("direction"))}
            <select class="convert-direction">
              <option value="kvp-owl" ${this.direction === "kvp-owl" ? "selected" : ""}>${esc(t("kvpToOwl"))}</option>
              <option value="owl-kvp" ${this.direction === "owl-kvp" ? "selected" : ""}>${esc(t("owlToKvp"))}</option>
            </select>
          </label>
          <label class="file-label">${esc(t("chooseFile"))}
            <input class="convert-file" type="file">
          </label>
          <button class="btn-convert">${esc(t("convertRun"))}</button>
        </div>
        <label>${esc(t("sourceText"))}
          <textarea class="convert-input" rows="12"></textarea>
        </label>
        ${this.error !== null ? `<div class="convert-error">${esc(t("errorPrefix", { message: this.error }))}</div>` : ""}
        <label>${esc(t("convertResult"))}
          <textarea class="convert-output" rows="12" readonly>${esc(this.lastOutput ?? "")}</textarea>
        </label>
        <button class="btn-download" ${this.lastOutput === null ? "disabled" : ""}>${esc(t("download"))}</button>
        ${warningBlock}
      </div>`;

    const inputArea = this.inputArea();
    if (inputArea) inputArea.value = keepInput;
    this.wire();
  }

  private wire(): void {
    const direction = this.root.querySelector<HTMLSelectElement>("select.convert-direction");
    direction?.addEventListener("change", () => {
      this.direction = direction.value as Direction;
    });
    const file = this.root.querySelector<HTMLInputElement>("input.convert-file");
    file?.addEventListener("change", () => {
      const picked = file.files?.[0];
      if (!picked) return;
      void picked.text().then((text) => {
        const area = this.inputArea();
        if (area) area.value = text;
      });
    });
    this.root
      .querySelector("button.btn-convert")
      ?.addEventListener("click", () => void this.convert());
    this.root
      .querySelector("button.btn-download")
      ?.addEventListener("click", () => this.download());
  }

  private download(): void {
    if (this.lastOutput === null) return;
    // Headless DOMs may lack createObjectURL; skip the navigation there.
    if (typeof URL.createObjectURL !== "function") return;
    const blob = new Blob([this.lastOutput], { type: "application/xml" });
    const anchor = document.createElement("a");
    anchor.href = URL.createObjectURL(blob);
    anchor.download = this.direction === "kvp-owl" ? "ontology.owl" : "ontology.kvp.xml";
    anchor.click();
    URL.revokeObjectURL(anchor.href);
  }
}

function esc(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

// Visual design screen: the ontology draft as a node-link picture plus a
// small toolbar. Every gesture becomes one edit request; the picture is
// redrawn only from what the server sends back, so a rejected edit simply
// leaves the old graph on screen next to the explanation.

import { ApiError, WorkbenchApi } from "./api.js";
import type { ConceptRow, GraphEdit, OntologyEnvelope } from "./api.js";
import { t } from "./i18n.js";
import type { Store } from "./state.js";

const RELATION_TYPES = ["is-a", "part-of", "object", "attribute", "associated"];

const VIEW_W = 800;
const VIEW_H = 500;

interface Point {
  x: number;
  y: number;
}

export class GraphDesigner {
  private envelope: OntologyEnvelope | null = null;
  private missing: string | null = null;
  private toast: string | null = null;
  pickedNode: string | null = null;
  lastExportText: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: WorkbenchApi,
    private readonly store: Store,
    private readonly projectId: string,
  ) {}

  async mount(): Promise<void> {
    await this.reload();
  }

  async reload(): Promise<void> {
    try {
      this.envelope = await this.api.ontology(this.projectId);
      this.missing = null;
    } catch (err) {
      if (err instanceof ApiError) {
        this.missing = err.message;
      } else {
        throw err;
      }
    }
    this.render();
  }

  async edit(edit: GraphEdit): Promise<void> {
    try {
      this.envelope = await this.api.applyEdit(this.projectId, edit);
      this.toast = null;
    } catch (err) {
      if (err instanceof ApiError) {
        this.toast = err.message;
      } else {
        throw err;
      }
    }
    this.render();
  }

  async exportKvp(): Promise<void> {
    try {
      this.lastExportText = await this.api.exportText(this.projectId, "kvp");
      this.toast = null;
    } catch (err) {
      if (err instanceof ApiError) {
        this.toast = err.message;
      } else {
        throw err;
      }
    }
    this.render();
    if (this.lastExportText !== null && typeof URL.createObjectURL === "function") {
      const blob = new Blob([this.lastExportText], { type: "application/xml" });
      const anchor = document.createElement("a");
      anchor.href = URL.createObjectURL(blob);
      anchor.download = "ontology.kvp.xml";
      anchor.click();
      URL.revokeObjectURL(anchor.href);
    }
  }

  zoom(factor: number): void {
    const { viewport } = this.store.get();
    const zoom = Math.min(4, Math.max(0.25, viewport.zoom * factor));
    this.store.patch({ viewport: { ...viewport, zoom } });
    this.render();
  }

  // Deterministic layout: concepts sit on an ellipse in id order, so the
  // same graph always draws the same picture.
  private positions(): Map<string, Point> {
    const points = new Map<string, Point>();
    if (!this.envelope) return points;
    const concepts = [...this.envelope.ontology.concepts].sort(
      (a, b) => conceptIndex(a) - conceptIndex(b),
    );
    const n = concepts.length;
    concepts.forEach((concept, i) => {
      const angle = (2 * Math.PI * i) / Math.max(n, 1) - Math.PI / 2;
      points.set(concept.id, {
        x: Math.round(VIEW_W / 2 + 300 * Math.cos(angle)),
        y: Math.round(VIEW_H / 2 + 185 * Math.sin(angle)),
      });
    });
    return points;
  }

  render(): void {
    if (this.envelope === null) {
      this.root.innerHTML = `
        <div class="okb-designer">
          <h2>${esc(t("openDesigner"))}</h2>
          <div class="designer-missing">${esc(this.missing ?? t("graphEmpty"))}</div>
        </div>`;
      return;
    }

    const { ontology, version } = this.envelope;
    const { viewport } = this.store.get();
    const points = this.positions();
    const conceptOptions = (picked: string | null) =>
      ontology.concepts
        .map(
          (c) =>
            `<option value="${c.id}" ${c.id === picked ? "selected" : ""}>${esc(c.label)}</option>`,
        )
        .join("");

    const edges = ontology.relations
      .map((rel) => {
        const from = points.get(rel.from);
        const to = points.get(rel.to);
        if (!from || !to) return "";
        const mx = (from.x + to.x) / 2;
        const my = (from.y + to.y) / 2;
        return `<g class="edge" data-id="${rel.id}">
            <line x1="${from.x}" y1="${from.y}" x2="${to.x}" y2="${to.y}" marker-end="url(#arrow)"/>
            <text x="${mx}" y="${my - 6}" text-anchor="middle">${esc(rel.type)}</text>
          </g>`;
      })
      .join("");

    const nodes = ontology.concepts
      .map((concept) => {
        const at = points.get(concept.id);
        if (!at) return "";
        const picked = concept.id === this.pickedNode ? " picked" : "";
        return `<g class="node${picked}" data-id="${concept.id}">
            <ellipse cx="${at.x}" cy="${at.y}" rx="78" ry="26"/>
            <text x="${at.x}" y="${at.y + 5}" text-anchor="middle">${esc(concept.label)}</text>
          </g>`;
      })
      .join("");

    this.root.innerHTML = `
      <div class="okb-designer">
        <h2>${esc(t("openDesigner"))}</h2>
        <div class="designer-version">${esc(t("versionLabel", { n: version }))} — ${esc(ontology.name)}</div>
        ${this.toast !== null ? `<div class="designer-toast">${esc(this.toast)}</div>` : ""}
        <div class="designer-toolbar">
          <input class="concept-name" placeholder="${esc(t("conceptName"))}">
          <button class="btn-add-concept">${esc(t("addConcept"))}</button>
          <button class="btn-rename-concept">${esc(t("renameConcept"))}</button>
          <button class="btn-remove-concept">${esc(t("removeConcept"))}</button>
        </div>
        <div class="designer-toolbar">
          <select class="edge-from">${conceptOptions(this.pickedNode)}</select>
          <select class="edge-type">${RELATION_TYPES.map(
            (type) => `<option value="${type}">${type}</option>`,
          ).join("")}</select>
          <select class="edge-to">${conceptOptions(null)}</select>
          <button class="btn-add-relation">${esc(t("addRelation"))}</button>
          <select class="edge-pick">${ontology.relations
            .map((rel) => `<option value="${rel.id}">${rel.id}: ${esc(label(ontology.concepts, rel.from))} —${rel.type}→ ${esc(label(ontology.concepts, rel.to))}</option>`)
            .join("")}</select>
          <button class="btn-remove-relation">${esc(t("removeRelation"))}</button>
        </div>
        <div class="designer-toolbar">
          <button class="btn-zoom-in">${esc(t("zoomIn"))}</button>
          <button class="btn-zoom-out">${esc(t("zoomOut"))}</button>
          <button class="btn-export">${esc(t("exportGraph"))}</button>
        </div>
        <svg class="graph-canvas" viewBox="0 0 ${VIEW_W} ${VIEW_H}"
             width="${Math.round(VIEW_W * viewport.zoom)}" height="${Math.round(VIEW_H * viewport.zoom)}">
          <defs>
            <marker id="arrow" markerWidth="10" markerHeight="8" refX="9" refY="4" orient="auto">
              <path d="M0,0 L10,4 L0,8 z"/>
            </marker>
          </defs>
          ${edges}
          ${nodes}
        </svg>
      </div>`;

    this.wire();
  }

  private nameInput(): string {
    return this.root.querySelector<HTMLInputElement>("input.concept-name")?.value.trim() ?? "";
  }

  private pickValue(cls: string): string {
    return this.root.querySelector<HTMLSelectElement>(`select.${cls}`)?.value ?? "";
  }

  private wire(): void {
    for (const node of this.root.querySelectorAll<SVGGElement>("g.node")) {
      node.addEventListener("click", () => {
        this.pickedNode = node.dataset.id ?? null;
        this.render();
      });
    }
    this.on("btn-add-concept", () => {
      const name = this.nameInput();
      if (name) void this.edit({ op: "add_concept", label: name });
    });
    this.on("btn-rename-concept", () => {
      const name = this.nameInput();
      if (name && this.pickedNode !== null) {
        void this.edit({ op: "rename_concept", id: this.pickedNode, label: name });
      }
    });
    this.on("btn-remove-concept", () => {
      if (this.pickedNode !== null) {
        const id = this.pickedNode;
        this.pickedNode = null;
        void this.edit({ op: "remove_concept", id });
      }
    });
    this.on("btn-add-relation", () => {
      void this.edit({
        op: "add_relation",
        type: this.pickValue("edge-type"),
        from: this.pickValue("edge-from"),
        to: this.pickValue("edge-to"),
      });
    });
    this.on("btn-remove-relation", () => {
      const id = this.pickValue("edge-pick");
      if (id) void this.edit({ op: "remove_relation", id });
    });
    this.on("btn-zoom-in", () => this.zoom(1.25));
    this.on("btn-zoom-out", () => this.zoom(0.8));
    this.on("btn-export", () => void this.exportKvp());
  }

  private on(cls: string, handler: () => void): void {
    this.root.querySelector(`button.${cls}`)?.addEventListener("click", handler);
  }
}

function conceptIndex(concept: ConceptRow): number {
  const n = Number(concept.id.replace(/^c/, ""));
  return Number.isFinite(n) ? n : 0;
}

function label(concepts: ConceptRow[], id: string): string {
  return concepts.find((c) => c.id === id)?.label ?? id;
}

function esc(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

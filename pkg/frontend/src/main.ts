// App shell: main menu, project picker, language toggle, and routing into
// the three module screens. The server address comes from the page origin,
// or from an ?api= query parameter when the page is served elsewhere.

import { WorkbenchApi } from "./api.js";
import type { ProjectSummary } from "./api.js";
import { ConverterForm } from "./converter.js";
import { GraphDesigner } from "./designer.js";
import { t, toggleLang } from "./i18n.js";
import type { Screen, Store } from "./state.js";
import { Store as StoreImpl } from "./state.js";
import { TermBrowser } from "./termBrowser.js";

const POLL_MS = 1500;

export class App {
  private projects: ProjectSummary[] = [];
  private browser: TermBrowser | null = null;
  private lastScreen: Screen | null = null;
  private pollTimer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: WorkbenchApi,
    private readonly store: Store,
  ) {}

  async mount(): Promise<void> {
    this.store.subscribe((state) => {
      if (state.screen !== this.lastScreen) void this.renderScreen();
    });
    await this.refreshProjects();
    await this.renderScreen();
  }

  async refreshProjects(): Promise<void> {
    this.projects = (await this.api.listProjects()).projects;
  }

  private header(): string {
    return `
      <header class="app-header">
        <h1>${esc(t("appTitle"))}</h1>
        <nav>
          <button class="nav-menu">${esc(t("backToMenu"))}</button>
          <button class="nav-lang">${esc(t("langToggle"))}</button>
        </nav>
      </header>`;
  }

  async renderScreen(): Promise<void> {
    const state = this.store.get();
    this.lastScreen = state.screen;
    this.stopPolling();
    this.browser = null;

    this.root.innerHTML = `${this.header()}<main class="screen"></main>`;
    const screen = this.root.querySelector<HTMLElement>("main.screen");
    if (!screen) return;
    this.wireHeader();

    switch (state.screen) {
      case "MAIN_MENU":
        this.renderMenu(screen);
        break;
      case "ANALYSIS": {
        const browser = new TermBrowser(screen, this.api, this.store, this.requireProject());
        this.browser = browser;
        await browser.mount();
        this.pollTimer = setInterval(() => void browser.poll(), POLL_MS);
        break;
      }
      case "CONVERTER":
        new ConverterForm(screen, this.api).mount();
        break;
      case "DESIGNER": {
        const designer = new GraphDesigner(screen, this.api, this.store, this.requireProject());
        await designer.mount();
        break;
      }
    }
  }

  private requireProject(): string {
    const id = this.store.get().projectId;
    if (id === null) throw new Error("no project chosen");
    return id;
  }

  private renderMenu(screen: HTMLElement): void {
    const state = this.store.get();
    const options = this.projects
      .map(
        (p) =>
          `<option value="${p.id}" ${p.id === state.projectId ? "selected" : ""}>${esc(p.name)}</option>`,
      )
      .join("");
    const needProject = state.projectId === null ? "disabled" : "";

    screen.innerHTML = `
      <div class="okb-menu">
        <h2>${esc(t("mainMenu"))}</h2>
        <div class="project-row">
          <label>${esc(t("projectLabel"))}
            <select class="project-pick">${options || `<option value="">${esc(t("noProjects"))}</option>`}</select>
          </label>
          <input class="project-name" placeholder="${esc(t("projectNamePlaceholder"))}">
          <button class="btn-create-project">${esc(t("createProject"))}</button>
        </div>
        <div class="menu-actions">
          <button class="menu-analysis" ${needProject}>${esc(t("openAnalysis"))}</button>
          <button class="menu-converter">${esc(t("openConverter"))}</button>
          <button class="menu-designer" ${needProject}>${esc(t("openDesigner"))}</button>
        </div>
      </div>`;

    const pick = screen.querySelector<HTMLSelectElement>("select.project-pick");
    if (pick && state.projectId === null && this.projects.length > 0) {
      const first = this.projects[0];
      if (first) this.store.patch({ projectId: first.id });
      void this.renderScreen();
      return;
    }
    pick?.addEventListener("change", () => {
      this.store.patch({ projectId: pick.value || null });
    });
    screen.querySelector("button.btn-create-project")?.addEventListener("click", () => {
      const name = screen.querySelector<HTMLInputElement>("input.project-name")?.value.trim();
      if (name) void this.createProject(name);
    });
    this.onMenu(screen, "menu-analysis", "ANALYSIS");
    this.onMenu(screen, "menu-converter", "CONVERTER");
    this.onMenu(screen, "menu-designer", "DESIGNER");
  }

  private onMenu(screen: HTMLElement, cls: string, target: Screen): void {
    screen.querySelector(`button.${cls}`)?.addEventListener("click", () => {
      this.store.goTo(target);
    });
  }

  private async createProject(name: string): Promise<void> {
    const created = await this.api.createProject(name);
    await this.refreshProjects();
    this.store.patch({ projectId: created.id });
    await this.renderScreen();
  }

  private wireHeader(): void {
    this.root.querySelector("button.nav-menu")?.addEventListener("click", () => {
      this.store.goTo("MAIN_MENU");
    });
    this.root.querySelector("button.nav-lang")?.addEventListener("click", () => {
      toggleLang();
      void this.renderScreen();
    });
  }

  private stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }
}

function esc(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return fromQuery ?? "";
}

const appRoot = typeof document !== "undefined" ? document.getElementById("app") : null;
if (appRoot) {
  const app = new App(appRoot, new WorkbenchApi(apiBase()), new StoreImpl());
  void app.mount();
}

import { beforeEach, describe, expect, it } from "vitest";

import { WorkbenchApi } from "../src/api.js";
import { setLang } from "../src/i18n.js";
import { App } from "../src/main.js";
import { Store } from "../src/state.js";
import { FakeWorkbench, flush } from "./fakes.js";

function setup() {
  document.body.innerHTML = '<div id="app-root"></div>';
  const root = document.getElementById("app-root") as HTMLElement;
  const fake = new FakeWorkbench();
  const store = new Store();
  const app = new App(root, new WorkbenchApi("", fake.fetchFn), store);
  return { root, fake, store, app };
}

function click(el: Element | null): void {
  if (!el) throw new Error("missing element");
  el.dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

beforeEach(() => setLang("uk"));

describe("App", () => {
  it("opens on the main menu and picks the first project", async () => {
    const { root, store, app } = setup();
    await app.mount();
    await flush();
    expect(root.querySelector(".okb-menu h2")?.textContent).toBe("Головне меню");
    expect(store.get().projectId).toBe("p1");
    const actions = [...root.querySelectorAll(".menu-actions button")].map(
      (el) => el.textContent,
    );
    expect(actions).toEqual([
      "Модуль синтактико-семантичного аналізу природно-мовних текстів",
      "Модуль конвертування формату OWL",
      "Модуль візуального проектування",
    ]);
  });

  it("navigates into the analysis screen and back", async () => {
    const { root, store, app } = setup();
    await app.mount();
    await flush();
    click(root.querySelector("button.menu-analysis"));
    await flush();
    expect(store.get().screen).toBe("ANALYSIS");
    expect(root.querySelector(".okb-analysis")).not.toBeNull();
    expect(root.querySelectorAll("ul.term-list li.term-row").length).toBe(7);

    click(root.querySelector("button.nav-menu"));
    await flush();
    expect(store.get().screen).toBe("MAIN_MENU");
    expect(root.querySelector(".okb-menu")).not.toBeNull();
  });

  it("opens the converter without a project", async () => {
    const { root, app } = setup();
    await app.mount();
    await flush();
    click(root.querySelector("button.menu-converter"));
    await flush();
    expect(root.querySelector(".okb-converter")).not.toBeNull();
  });

  it("toggles the caption language", async () => {
    const { root, app } = setup();
    await app.mount();
    await flush();
    expect(root.querySelector(".app-header h1")?.textContent).toBe("Кабінет інженера знань");
    click(root.querySelector("button.nav-lang"));
    await flush();
    expect(root.querySelector(".app-header h1")?.textContent).toBe(
      "Knowledge engineer workbench",
    );
    expect(root.querySelector(".okb-menu h2")?.textContent).toBe("Main menu");
    click(root.querySelector("button.nav-lang"));
    await flush();
    expect(root.querySelector(".app-header h1")?.textContent).toBe("Кабінет інженера знань");
  });

  it("creates a project from the menu", async () => {
    const { root, fake, store, app } = setup();
    await app.mount();
    await flush();
    const name = root.querySelector<HTMLInputElement>("input.project-name");
    if (!name) throw new Error("no project name input");
    name.value = "нова справа";
    click(root.querySelector("button.btn-create-project"));
    await flush();
    const posted = fake.calls.find((c) => c.method === "POST" && c.path === "/projects");
    expect(posted).toBeDefined();
    expect(JSON.parse(posted?.body ?? "")).toEqual({ name: "нова справа" });
    expect(store.get().projectId).toBe("p2");
  });
});

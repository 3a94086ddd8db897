// Single view-state store for the app. Everything here is reconstructible
// from the server: the store only remembers which screen is open, which
// project it points at, the current term filter, the basket mirror, and the
// designer viewport.

export type Screen = "MAIN_MENU" | "ANALYSIS" | "CONVERTER" | "DESIGNER";

export interface TermFilter {
  kind: "" | "single" | "multi" | "abbr";
  query: string;
}

export interface Viewport {
  x: number;
  y: number;
  zoom: number;
}

export interface ViewState {
  screen: Screen;
  projectId: string | null;
  filter: TermFilter;
  basket: string[];
  viewport: Viewport;
}

export type Listener = (state: ViewState) => void;

function initial(): ViewState {
  return {
    screen: "MAIN_MENU",
    projectId: null,
    filter: { kind: "", query: "" },
    basket: [],
    viewport: { x: 0, y: 0, zoom: 1 },
  };
}

export class Store {
  private state: ViewState = initial();
  private listeners = new Set<Listener>();

  get(): ViewState {
    return {
      ...this.state,
      filter: { ...this.state.filter },
      basket: [...this.state.basket],
      viewport: { ...this.state.viewport },
    };
  }

  // Screen changes go through goTo so that navigation stays a menu action,
  // not a side effect buried in a component.
  patch(partial: Partial<Omit<ViewState, "screen">>): void {
    if ("screen" in partial) {
      throw new Error("screen changes must use goTo()");
    }
    this.state = { ...this.state, ...partial };
    this.notify();
  }

  goTo(screen: Screen): void {
    if (this.state.screen === screen) return;
    this.state = { ...this.state, screen };
    this.notify();
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private notify(): void {
    const snapshot = this.get();
    for (const listener of this.listeners) listener(snapshot);
  }
}

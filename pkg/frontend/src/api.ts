// Typed client for the workbench HTTP API. Every screen talks to the server
// through this module; nothing else in the frontend issues requests.

export type StageName =
  | "LOAD_DICTS"
  | "INGEST"
  | "ANALYZE"
  | "BUILD_ONTOLOGY"
  | "EXPORT";

export type StageStatus = "PENDING" | "RUNNING" | "DONE" | "FAILED";

export type TermKind = "single" | "multi" | "abbr";

export interface ProjectCounts {
  dictionaries: number;
  documents: number;
  entries: number;
  sentences: number;
  terms: number;
  selected: number;
}

export interface ProjectStatus {
  id: string;
  name: string;
  created: string;
  stages: Record<StageName, StageStatus>;
  running: StageName | null;
  ontology_version: number;
  counts: ProjectCounts;
}

export interface ProjectSummary {
  id: string;
  name: string;
  created: string;
}

export interface SentenceRef {
  doc: string;
  index: number;
}

export interface TermRow {
  id: string;
  label: string;
  kind: TermKind;
  lemmas: string[];
  frequency: number;
  selected: boolean;
  sentences: SentenceRef[];
}

export interface TermListing {
  total: number;
  terms: TermRow[];
}

export interface SentenceRow {
  doc: string;
  index: number;
  text: string;
}

export interface ConceptRow {
  id: string;
  label: string;
  source: string;
}

export interface RelationRow {
  id: string;
  type: string;
  from: string;
  to: string;
}

export interface OntologyGraph {
  name: string;
  concepts: ConceptRow[];
  relations: RelationRow[];
}

export interface OntologyEnvelope {
  version: number;
  ontology: OntologyGraph;
}

export type GraphEdit =
  | { op: "add_concept"; label: string }
  | { op: "rename_concept"; id: string; label: string }
  | { op: "remove_concept"; id: string }
  | { op: "add_relation"; type: string; from: string; to: string }
  | { op: "remove_relation"; id: string };

export interface EventRow {
  seq: number;
  time: string;
  stage: string;
  message: string;
}

export interface ConvertResult {
  output: string;
  warnings: string[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }

  get isConflict(): boolean {
    return this.code === "CONFLICT";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

function qs(params: Record<string, string | undefined>): string {
  const search = new URLSearchParams();
  for (const [key, value] of Object.entries(params)) {
    if (value !== undefined && value !== "") search.set(key, value);
  }
  const text = search.toString();
  return text ? `?${text}` : "";
}

export class WorkbenchApi {
  constructor(
    readonly base: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async send(
    method: string,
    path: string,
    body?: string,
    contentType = "application/json",
  ): Promise<Response> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = body;
      init.headers = { "Content-Type": contentType };
    }
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      let code = "INTERNAL";
      let message = `HTTP ${response.status}`;
      try {
        const payload = await response.json();
        code = payload.error.code;
        message = payload.error.message;
      } catch {
        // error body was not the usual envelope; keep the generic message
      }
      throw new ApiError(response.status, code, message);
    }
    return response;
  }

  private async json<T>(
    method: string,
    path: string,
    body?: string,
    contentType?: string,
  ): Promise<T> {
    const response = await this.send(method, path, body, contentType);
    return (await response.json()) as T;
  }

  listProjects(): Promise<{ projects: ProjectSummary[] }> {
    return this.json("GET", "/projects");
  }

  createProject(name: string): Promise<ProjectStatus> {
    return this.json("POST", "/projects", JSON.stringify({ name }));
  }

  status(projectId: string): Promise<ProjectStatus> {
    return this.json("GET", `/projects/${projectId}/status`);
  }

  addDictionary(projectId: string, name: string, text: string): Promise<ProjectStatus> {
    const path = `/projects/${projectId}/dictionaries${qs({ name })}`;
    return this.json("POST", path, text, "text/plain; charset=utf-8");
  }

  addDocument(projectId: string, name: string, text: string): Promise<ProjectStatus> {
    const path = `/projects/${projectId}/documents${qs({ name })}`;
    return this.json("POST", path, text, "text/plain; charset=utf-8");
  }

  startStage(projectId: string, stage: StageName): Promise<{ stage: string; status: string }> {
    return this.json("POST", `/projects/${projectId}/stages/${stage}`);
  }

  async waitForIdle(projectId: string, timeoutMs = 15000): Promise<ProjectStatus> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const status = await this.status(projectId);
      if (status.running === null) return status;
      if (Date.now() > deadline) throw new Error(`stage ${status.running} still running`);
      await new Promise((resolve) => setTimeout(resolve, 100));
    }
  }

  async runStage(projectId: string, stage: StageName): Promise<ProjectStatus> {
    await this.startStage(projectId, stage);
    return this.waitForIdle(projectId);
  }

  terms(projectId: string, filter: { kind?: string; query?: string } = {}): Promise<TermListing> {
    const path = `/projects/${projectId}/terms${qs({ kind: filter.kind, q: filter.query })}`;
    return this.json("GET", path);
  }

  sentences(projectId: string, termId: string): Promise<SentenceRow[]> {
    return this.json("GET", `/projects/${projectId}/terms/${termId}/sentences`);
  }

  setSelected(
    projectId: string,
    termId: string,
    on: boolean,
  ): Promise<{ id: string; selected: boolean; selected_count: number }> {
    const path = `/projects/${projectId}/terms/${termId}/selected`;
    return this.json("PUT", path, JSON.stringify({ on }));
  }

  ontology(projectId: string): Promise<OntologyEnvelope> {
    return this.json("GET", `/projects/${projectId}/ontology`);
  }

  applyEdit(projectId: string, edit: GraphEdit): Promise<OntologyEnvelope> {
    return this.json("POST", `/projects/${projectId}/ontology/edits`, JSON.stringify(edit));
  }

  async exportText(projectId: string, format: "kvp" | "owl"): Promise<string> {
    const response = await this.send("GET", `/projects/${projectId}/export${qs({ format })}`);
    return response.text();
  }

  events(projectId: string, since = 0): Promise<{ events: EventRow[]; latest: number }> {
    return this.json("GET", `/projects/${projectId}/events${qs({ since: String(since) })}`);
  }

  convert(text: string, from: string, to: string): Promise<ConvertResult> {
    const path = `/convert${qs({ from, to })}`;
    return this.json("POST", path, text, "application/xml; charset=utf-8");
  }
}

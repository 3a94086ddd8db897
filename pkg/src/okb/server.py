"""HTTP API over the workbench, on the standard library's threading server.

One process serves many projects held in memory. Long stages run on a worker
thread: POST /projects/{id}/stages/{stage} answers 202 immediately and the
client polls /status or /events. While a stage is running every mutation of
that project answers 409; reads stay available. Dictionary and document
uploads are raw text bodies (the file name travels in the ?name= query) and
run their own stage synchronously, since parsing them is cheap.

Errors are JSON: {"error": {"code": ..., "message": ...}} with the code one
of NOT_FOUND, INVALID, CONFLICT, INTERNAL. Every response carries permissive
CORS headers so a browser UI served from anywhere can talk to the API; the
server can also serve such a UI itself from a local directory under /ui/.
"""

from __future__ import annotations

import json
import mimetypes
import os
import re
import threading
import urllib.parse
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import workbench
from .convert import convert, emit_owl, parse_kvp
from .errors import OkbError
from .termstore import filter_terms, sentences_of
from .workbench import ProjectState

_STATUS_OF = {
    "NOT_FOUND": 404,
    "INVALID": 400,
    "CONFLICT": 409,
    "INTERNAL": 500,
}


class ApiError(Exception):
    def __init__(self, code: str, message: str) -> None:
        super().__init__(message)
        self.code = code
        self.status = _STATUS_OF[code]
        self.message = message


class ProjectStore:
    """In-memory projects plus the locking the request handlers rely on."""

    def __init__(self) -> None:
        self._projects: dict[str, ProjectState] = {}
        self._locks: dict[str, threading.RLock] = {}
        self._running: dict[str, str | None] = {}
        self._registry = threading.Lock()

    def add(self, state: ProjectState) -> None:
        with self._registry:
            self._projects[state.id] = state
            self._locks[state.id] = threading.RLock()
            self._running[state.id] = None

    def create(self, name: str) -> ProjectState:
        state = workbench.new_project(name)
        self.add(state)
        return state

    def get(self, project_id: str) -> ProjectState:
        try:
            return self._projects[project_id]
        except KeyError:
            raise ApiError("NOT_FOUND", f"no such project: {project_id}") from None

    def lock(self, project_id: str) -> threading.RLock:
        self.get(project_id)
        return self._locks[project_id]

    def running(self, project_id: str) -> str | None:
        return self._running.get(project_id)

    def set_running(self, project_id: str, stage: str | None) -> None:
        self._running[project_id] = stage

    def all(self) -> list[ProjectState]:
        with self._registry:
            return list(self._projects.values())


def _status_payload(store: ProjectStore, state: ProjectState) -> dict:
    counts = {
        "dictionaries": len(state.dictionaries),
        "documents": len(state.documents),
        "entries": 0 if state.lexicon is None else len(state.lexicon),
        "sentences": sum(len(d.sentences) for d in state.corpus),
        "terms": 0 if state.archive is None else state.archive.total,
        "selected": len(workbench.selection_ids(state)),
    }
    return {
        "id": state.id,
        "name": state.name,
        "created": state.created,
        "stages": dict(state.stages),
        "running": store.running(state.id),
        "ontology_version": state.ontology_version,
        "counts": counts,
    }


def _term_payload(term) -> dict:
    return {
        "id": term.id,
        "label": term.label,
        "kind": term.kind,
        "lemmas": list(term.lemmas),
        "frequency": term.frequency,
        "selected": term.selected,
        "sentences": [{"doc": doc, "index": index} for doc, index in term.sentences],
    }


class ApiHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "okb"

    # (method, pattern, handler name)
    routes = [
        ("POST", re.compile(r"^/projects$"), "create_project"),
        ("GET", re.compile(r"^/projects$"), "list_projects"),
        ("GET", re.compile(r"^/projects/(?P<pid>[^/]+)/status$"), "status"),
        ("POST", re.compile(r"^/projects/(?P<pid>[^/]+)/dictionaries$"), "add_dictionary"),
        ("POST", re.compile(r"^/projects/(?P<pid>[^/]+)/documents$"), "add_document"),
        ("POST", re.compile(r"^/projects/(?P<pid>[^/]+)/stages/(?P<stage>[^/]+)$"), "run_stage"),
        ("GET", re.compile(r"^/projects/(?P<pid>[^/]+)/terms$"), "terms"),
        ("GET", re.compile(r"^/projects/(?P<pid>[^/]+)/terms/(?P<tid>[^/]+)/sentences$"), "term_sentences"),
        ("PUT", re.compile(r"^/projects/(?P<pid>[^/]+)/terms/(?P<tid>[^/]+)/selected$"), "set_selected"),
        ("GET", re.compile(r"^/projects/(?P<pid>[^/]+)/ontology$"), "get_ontology"),
        ("PUT", re.compile(r"^/projects/(?P<pid>[^/]+)/ontology$"), "put_ontology"),
        ("POST", re.compile(r"^/projects/(?P<pid>[^/]+)/ontology/edits$"), "edit_ontology"),
        ("GET", re.compile(r"^/projects/(?P<pid>[^/]+)/export$"), "export"),
        ("GET", re.compile(r"^/projects/(?P<pid>[^/]+)/events$"), "events"),
        ("POST", re.compile(r"^/convert$"), "convert"),
    ]

    @property
    def store(self) -> ProjectStore:
        return self.server.store  # type: ignore[attr-defined]

    def log_message(self, format: str, *args) -> None:  # noqa: A002 - stdlib signature
        pass

    # ------------------------------------------------------------ plumbing

    def _send(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()
        if body:
            self.wfile.write(body)

    def _send_json(self, status: int, payload) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self._send(status, body, "application/json; charset=utf-8")

    def _send_error(self, error: ApiError) -> None:
        self._send_json(error.status, {"error": {"code": error.code, "message": error.message}})

    def _body_bytes(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length else b""

    def _body_text(self) -> str:
        try:
            return self._body_bytes().decode("utf-8")
        except UnicodeDecodeError:
            raise ApiError("INVALID", "request body is not valid UTF-8") from None

    def _body_json(self) -> dict:
        text = self._body_text()
        try:
            payload = json.loads(text or "null")
        except json.JSONDecodeError:
            raise ApiError("INVALID", "request body is not valid JSON") from None
        if not isinstance(payload, dict):
            raise ApiError("INVALID", "request body must be a JSON object")
        return payload

    def _dispatch(self, method: str) -> None:
        split = urllib.parse.urlsplit(self.path)
        path = urllib.parse.unquote(split.path)
        query = {k: v[-1] for k, v in urllib.parse.parse_qs(split.query).items()}
        try:
            if method == "GET" and self._maybe_static(path):
                return
            for route_method, pattern, name in self.routes:
                match = pattern.match(path)
                if match and route_method == method:
                    getattr(self, "h_" + name)(match.groupdict(), query)
                    return
            raise ApiError("NOT_FOUND", f"no route for {method} {path}")
        except ApiError as exc:
            self._send_error(exc)
        except OkbError as exc:
            self._send_error(ApiError("INVALID", str(exc)))
        except Exception as exc:  # noqa: BLE001 - last-resort boundary
            self._send_error(ApiError("INTERNAL", f"{type(exc).__name__}: {exc}"))

    def do_GET(self) -> None:
        self._dispatch("GET")

    def do_POST(self) -> None:
        self._dispatch("POST")

    def do_PUT(self) -> None:
        self._dispatch("PUT")

    def do_OPTIONS(self) -> None:
        self._send(204, b"", "text/plain")

    # ------------------------------------------------------------ static UI

    def _maybe_static(self, path: str) -> bool:
        ui_dir = getattr(self.server, "ui_dir", None)
        if path == "/":
            if ui_dir is None:
                self._send_json(200, {"service": "ontology workbench api", "ui": False})
            else:
                self.send_response(302)
                self.send_header("Location", "/ui/")
                self.send_header("Content-Length", "0")
                self.end_headers()
            return True
        if not path.startswith("/ui/"):
            return False
        if ui_dir is None:
            raise ApiError("NOT_FOUND", "no UI directory configured")
        relative = path[len("/ui/"):] or "index.html"
        base = os.path.realpath(ui_dir)
        target = os.path.realpath(os.path.join(base, relative))
        if not target.startswith(base + os.sep) and target != base:
            raise ApiError("NOT_FOUND", "no such file")
        if os.path.isdir(target):
            target = os.path.join(target, "index.html")
        if not os.path.isfile(target):
            raise ApiError("NOT_FOUND", "no such file")
        content_type = mimetypes.guess_type(target)[0] or "application/octet-stream"
        with open(target, "rb") as handle:
            body = handle.read()
        self._send(200, body, content_type)
        return True

    # ------------------------------------------------------------ guards

    def _project(self, params: dict) -> ProjectState:
        return self.store.get(params["pid"])

    def _require_idle(self, project_id: str) -> None:
        running = self.store.running(project_id)
        if running is not None:
            raise ApiError("CONFLICT", f"stage {running} is running")

    def _archive(self, state: ProjectState):
        if state.archive is None:
            raise ApiError("CONFLICT", "no term archive yet, run ANALYZE first")
        return state.archive

    # ------------------------------------------------------------ handlers

    def h_create_project(self, params: dict, query: dict) -> None:
        payload = self._body_json()
        name = payload.get("name")
        if not isinstance(name, str) or not name.strip():
            raise ApiError("INVALID", "a non-empty name is required")
        state = self.store.create(name)
        self._send_json(201, _status_payload(self.store, state))

    def h_list_projects(self, params: dict, query: dict) -> None:
        projects = [
            {"id": s.id, "name": s.name, "created": s.created}
            for s in self.store.all()
        ]
        self._send_json(200, {"projects": projects})

    def h_status(self, params: dict, query: dict) -> None:
        state = self._project(params)
        with self.store.lock(state.id):
            self._send_json(200, _status_payload(self.store, state))

    def _attach_and_run(self, params: dict, query: dict, kind: str) -> None:
        state = self._project(params)
        text = self._body_text()
        with self.store.lock(state.id):
            self._require_idle(state.id)
            if kind == "dictionary":
                name = query.get("name", "dictionary.tsv")
                workbench.attach_dictionary(state, name, text)
                stage = workbench.LOAD_DICTS
            else:
                name = query.get("name", "document.txt")
                workbench.attach_document(state, name, text)
                stage = workbench.INGEST
            workbench.run_stage(state, stage)
            self._send_json(200, _status_payload(self.store, state))

    def h_add_dictionary(self, params: dict, query: dict) -> None:
        self._attach_and_run(params, query, "dictionary")

    def h_add_document(self, params: dict, query: dict) -> None:
        self._attach_and_run(params, query, "document")

    def h_run_stage(self, params: dict, query: dict) -> None:
        state = self._project(params)
        stage = params["stage"]
        store = self.store
        with store.lock(state.id):
            self._require_idle(state.id)
            blocker = workbench.stage_blocker(state, stage)
            if blocker is not None:
                workbench.fail_stage(state, stage, blocker)
                raise ApiError("INVALID", blocker)
            workbench.add_event(state, stage, "started")
            state.stages[stage] = workbench.RUNNING
            store.set_running(state.id, stage)

        def work() -> None:
            try:
                result = workbench.compute_stage(state, stage)
            except OkbError as exc:
                with store.lock(state.id):
                    workbench.fail_stage(state, stage, str(exc))
                    store.set_running(state.id, None)
            else:
                with store.lock(state.id):
                    workbench.commit_stage(state, stage, result)
                    store.set_running(state.id, None)

        threading.Thread(target=work, daemon=True).start()
        self._send_json(202, {"stage": stage, "status": workbench.RUNNING})

    def h_terms(self, params: dict, query: dict) -> None:
        state = self._project(params)
        with self.store.lock(state.id):
            archive = self._archive(state)
            terms = filter_terms(archive, kind=query.get("kind"), query=query.get("q"))
            self._send_json(
                200,
                {"total": archive.total, "terms": [_term_payload(t) for t in terms]},
            )

    def h_term_sentences(self, params: dict, query: dict) -> None:
        state = self._project(params)
        with self.store.lock(state.id):
            archive = self._archive(state)
            corpus = {doc.id: doc for doc in state.corpus}
            try:
                rows = sentences_of(archive, params["tid"], corpus)
            except OkbError as exc:
                raise ApiError("NOT_FOUND", str(exc)) from None
            self._send_json(
                200,
                [
                    {"doc": doc_id, "index": sentence.index, "text": sentence.text}
                    for doc_id, sentence in rows
                ],
            )

    def h_set_selected(self, params: dict, query: dict) -> None:
        state = self._project(params)
        payload = self._body_json()
        on = payload.get("on")
        if not isinstance(on, bool):
            raise ApiError("INVALID", 'body must be {"on": true|false}')
        with self.store.lock(state.id):
            self._require_idle(state.id)
            archive = self._archive(state)
            try:
                archive.get(params["tid"])
            except OkbError as exc:
                raise ApiError("NOT_FOUND", str(exc)) from None
            workbench.select_term(state, params["tid"], on)
            self._send_json(
                200,
                {
                    "id": params["tid"],
                    "selected": on,
                    "selected_count": len(workbench.selection_ids(state)),
                },
            )

    def h_get_ontology(self, params: dict, query: dict) -> None:
        state = self._project(params)
        with self.store.lock(state.id):
            if state.ontology is None:
                raise ApiError("NOT_FOUND", "no ontology yet, run BUILD_ONTOLOGY first")
            self._send_json(
                200,
                {
                    "version": state.ontology_version,
                    "ontology": workbench.ontology_to_dict(state.ontology),
                },
            )

    def h_put_ontology(self, params: dict, query: dict) -> None:
        state = self._project(params)
        payload = self._body_json()
        graph = workbench.ontology_from_dict(payload)
        with self.store.lock(state.id):
            self._require_idle(state.id)
            workbench.replace_ontology(state, graph)
            self._send_json(200, {"version": state.ontology_version})

    def h_edit_ontology(self, params: dict, query: dict) -> None:
        state = self._project(params)
        edit = self._body_json()
        with self.store.lock(state.id):
            self._require_idle(state.id)
            workbench.edit_ontology(state, edit)
            self._send_json(
                200,
                {
                    "version": state.ontology_version,
                    "ontology": workbench.ontology_to_dict(state.ontology),
                },
            )

    def h_export(self, params: dict, query: dict) -> None:
        state = self._project(params)
        fmt = query.get("format", "kvp")
        if fmt not in ("kvp", "owl"):
            raise ApiError("INVALID", f"unknown export format {fmt!r}")
        with self.store.lock(state.id):
            if state.last_export is None:
                raise ApiError("CONFLICT", "nothing exported yet, run EXPORT first")
            text = state.last_export.text
            if fmt == "owl":
                text = emit_owl(parse_kvp(text))
        self._send(200, text.encode("utf-8"), "application/xml; charset=utf-8")

    def h_events(self, params: dict, query: dict) -> None:
        state = self._project(params)
        try:
            since = int(query.get("since", 0))
        except ValueError:
            raise ApiError("INVALID", "since must be an integer") from None
        with self.store.lock(state.id):
            events = [
                {"seq": e.seq, "time": e.time, "stage": e.stage, "message": e.message}
                for e in state.events
                if e.seq > since
            ]
            latest = state.events[-1].seq if state.events else 0
        self._send_json(200, {"events": events, "latest": latest})

    def h_convert(self, params: dict, query: dict) -> None:
        source = query.get("from", "kvp")
        target = query.get("to", "owl")
        output, warnings = convert(self._body_text(), source, target)
        self._send_json(200, {"output": output, "warnings": warnings})


class WorkbenchServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, store: ProjectStore, ui_dir: str | None = None) -> None:
        super().__init__(address, ApiHandler)
        self.store = store
        self.ui_dir = ui_dir


def create_server(
    host: str = "127.0.0.1",
    port: int = 8765,
    store: ProjectStore | None = None,
    ui_dir: str | None = None,
) -> WorkbenchServer:
    return WorkbenchServer((host, port), store or ProjectStore(), ui_dir=ui_dir)

"""HTTP service: dataset upload, fit jobs, reports, traces, inconsistencies.

Datasets and job records persist in a content-addressed store under the
data directory (env RULELENS_DATA_DIR, default ./rulelens-data). Fit jobs
run one at a time on a single background worker, so results are
deterministic and resubmitting the same (dataset, config) pair is
idempotent.
"""

from __future__ import annotations

import hashlib
import json
import os
import queue
import re
import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse, Response

from . import audit
from .dataset import ColumnKind, DatasetError, infer_kinds, load_csv
from .fitting import FittingError, PipelineConfig, fit_pipeline
from .report import ReportContext, render_report_json
from .rulegen import RuleSyntaxError


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class Store:
    """On-disk content-addressed datasets plus persisted job records."""

    def __init__(self, root: Path):
        self.root = root
        (root / "datasets").mkdir(parents=True, exist_ok=True)
        (root / "jobs").mkdir(parents=True, exist_ok=True)

    def put_dataset(self, data: bytes) -> str:
        digest = hashlib.sha256(data).hexdigest()[:24]
        path = self.root / "datasets" / ("%s.csv" % digest)
        if not path.exists():
            path.write_bytes(data)
        return digest

    def get_dataset(self, dataset_id: str) -> bytes:
        path = self.root / "datasets" / ("%s.csv" % dataset_id)
        if not path.exists():
            raise ApiError(404, "unknown_dataset", "unknown dataset id %r" % dataset_id)
        return path.read_bytes()

    def save_job(self, record: dict):
        path = self.root / "jobs" / ("%s.json" % record["id"])
        path.write_text(json.dumps(record, sort_keys=True), encoding="utf-8")

    def load_jobs(self) -> dict:
        jobs = {}
        for path in (self.root / "jobs").glob("*.json"):
            record = json.loads(path.read_text(encoding="utf-8"))
            if record.get("state") == "running":  # interrupted by restart
                record["state"] = "failed"
                record["error"] = "interrupted by service restart"
            jobs[record["id"]] = record
        return jobs


def _parse_multipart(body: bytes, content_type: str) -> bytes:
    """Extract the first file part of a multipart/form-data body.

    Hand-rolled so the service has no multipart dependency; the format
    here is only ever a single CSV file field.
    """
    m = re.search(r'boundary="?([^";]+)"?', content_type)
    if not m:
        raise ApiError(400, "bad_request", "multipart body without boundary")
    boundary = ("--" + m.group(1)).encode()
    for part in body.split(boundary):
        if b"\r\n\r\n" not in part:
            continue
        headers, _, content = part.partition(b"\r\n\r\n")
        if b"content-disposition" not in headers.lower():
            continue
        # strip exactly the CRLF that precedes the next boundary, nothing
        # belonging to the file itself
        if content.endswith(b"\r\n"):
            content = content[:-2]
        return content
    raise ApiError(400, "bad_request", "no file part in multipart body")


def _dataset_summary(dataset_id: str, raw: bytes) -> dict:
    ds = infer_kinds(load_csv(raw))
    columns = []
    for col in ds.columns:
        if col.kind is ColumnKind.CONTINUOUS:
            columns.append({"name": col.name, "kind": "continuous",
                            "min": col.minimum, "max": col.maximum})
        else:
            columns.append({"name": col.name, "kind": "categorical",
                            "values": list(col.categories)})
    return {"dataset_id": dataset_id, "columns": columns, "n": ds.n}


def create_app(data_dir: str | None = None) -> FastAPI:
    root = Path(data_dir or os.environ.get("RULELENS_DATA_DIR", "./rulelens-data"))
    store = Store(root)
    app = FastAPI(title="rulelens")

    jobs = store.load_jobs()
    jobs_lock = threading.Lock()
    work: queue.Queue = queue.Queue()

    def worker():
        while True:
            job_id = work.get()
            if job_id is None:
                return
            with jobs_lock:
                record = jobs[job_id]
                record["state"] = "running"
                store.save_job(record)
            try:
                raw = store.get_dataset(record["dataset_id"])
                config = PipelineConfig.from_json(record["config"])
                report = fit_pipeline(load_csv(raw), config)
                rendered = render_report_json(report)
                with jobs_lock:
                    record["state"] = "done"
                    record["report"] = json.loads(rendered)
                    record["report_json"] = rendered
                    store.save_job(record)
            except Exception as exc:  # job failure is a result, not a crash
                with jobs_lock:
                    record["state"] = "failed"
                    record["error"] = str(exc)
                    store.save_job(record)

    thread = threading.Thread(target=worker, daemon=True)
    thread.start()
    app.state.worker = thread
    app.state.work_queue = work

    @app.exception_handler(ApiError)
    async def api_error_handler(_request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"error": {"code": exc.code, "message": exc.message}})

    def _bad_request(exc: Exception) -> ApiError:
        return ApiError(400, "validation", str(exc))

    @app.post("/api/datasets")
    async def upload_dataset(request: Request):
        body = await request.body()
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("multipart/form-data"):
            data = _parse_multipart(body, content_type)
        else:
            data = body
        if not data.strip():
            raise ApiError(400, "validation", "empty upload")
        try:
            dataset_id = store.put_dataset(data)
            return _dataset_summary(dataset_id, data)
        except DatasetError as exc:
            raise _bad_request(exc) from exc

    @app.post("/api/jobs")
    async def submit_job(request: Request):
        payload = await request.json()
        dataset_id = payload.get("dataset_id")
        if not dataset_id:
            raise ApiError(400, "validation", "dataset_id is required")
        store.get_dataset(dataset_id)  # 404 on unknown id
        try:
            config = PipelineConfig.from_json(payload.get("config", {}))
        except (TypeError, ValueError) as exc:
            raise _bad_request(exc) from exc
        job_id = hashlib.sha256(
            (dataset_id + json.dumps(config.to_json(), sort_keys=True)).encode()
        ).hexdigest()[:16]
        with jobs_lock:
            existing = jobs.get(job_id)
            if existing is None or existing["state"] == "failed":
                jobs[job_id] = {
                    "id": job_id,
                    "state": "queued",
                    "dataset_id": dataset_id,
                    "config": config.to_json(),
                }
                store.save_job(jobs[job_id])
                work.put(job_id)
        return {"job_id": job_id}

    def _get_job(job_id: str) -> dict:
        with jobs_lock:
            record = jobs.get(job_id)
        if record is None:
            raise ApiError(404, "unknown_job", "unknown job id %r" % job_id)
        return record

    @app.get("/api/jobs/{job_id}")
    async def get_job(job_id: str):
        record = _get_job(job_id)
        out = {k: record[k] for k in ("id", "state", "dataset_id", "config")}
        if record.get("error"):
            out["error"] = record["error"]
        if record.get("report") is not None:
            out["report"] = record["report"]
        return out

    @app.get("/api/jobs/{job_id}/report.json")
    async def get_report_bytes(job_id: str):
        record = _get_job(job_id)
        if record.get("state") != "done":
            raise ApiError(404, "no_report", "job %r has no report yet" % job_id)
        return Response(content=record["report_json"], media_type="application/json")

    def _context(record: dict) -> ReportContext:
        if record.get("state") != "done":
            raise ApiError(400, "not_done", "job %r is not done" % record["id"])
        raw = store.get_dataset(record["dataset_id"])
        try:
            return ReportContext(record["report"], load_csv(raw))
        except (DatasetError, RuleSyntaxError, FittingError, ValueError) as exc:
            raise ApiError(500, "internal", str(exc)) from exc

    @app.get("/api/jobs/{job_id}/trace")
    async def get_trace(job_id: str, rule: str, top: int = 10):
        ctx = _context(_get_job(job_id))
        column = ctx.column_of(rule)
        if column is None:
            raise ApiError(404, "unknown_rule", "rule not found in report: %s" % rule)
        entries = audit.trace_rule(ctx.values, ctx.beta, column, ctx.dataset, top_k=top)
        return [{"record_index": e.record_index, "rho": e.rho, "record": e.record}
                for e in entries]

    @app.get("/api/jobs/{job_id}/inconsistencies")
    async def get_inconsistencies(job_id: str, beta_threshold: float = 0.0,
                                  only_significant: bool = False):
        ctx = _context(_get_job(job_id))
        found = audit.find_inconsistencies(
            ctx.fitted_triples(), beta_threshold=beta_threshold,
            alpha=ctx.config.alpha, require_significant=only_significant)
        return [{"kind": f.kind, "rule_a": f.rule_a, "rule_b": f.rule_b, "detail": f.detail}
                for f in found]

    static_dir = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if not static_dir.is_dir():
        static_dir = Path("frontend/dist")

    @app.get("/")
    async def index():
        index_file = static_dir / "index.html"
        if index_file.is_file():
            return FileResponse(index_file)
        return Response("rulelens API is running; no UI assets built", media_type="text/plain")

    @app.get("/assets/{name}")
    async def assets(name: str):
        path = static_dir / "assets" / name
        if not path.is_file() or ".." in name:
            raise ApiError(404, "not_found", "no such asset")
        return FileResponse(path)

    return app

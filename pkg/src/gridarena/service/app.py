"""HTTP face of the platform. XML in, XML out; events stream as SSE."""

from __future__ import annotations

import time
import xml.etree.ElementTree as ET

from fastapi import FastAPI, Request, Response
from fastapi.responses import StreamingResponse
from fastapi.staticfiles import StaticFiles

from gridarena import xmlio
from gridarena.grid.jobs import JobRecord, JobState
from gridarena.orchestrator import OrchestratorError, report_to_xml
from gridarena.service.platform import Platform
from gridarena.statusmap import status_to_xml
from gridarena.tournament import manifest_from_xml

XML = "application/xml"


def xml_response(root: ET.Element, status_code: int = 200) -> Response:
    return Response(content=xmlio.to_text(root), media_type=XML, status_code=status_code)


def error_response(code: str, message: str, status_code: int, detail: str | None = None) -> Response:
    root = ET.Element("error", {"code": code, "message": message})
    if detail:
        ET.SubElement(root, "detail").text = detail
    return xml_response(root, status_code)


def job_to_xml(record: JobRecord, experiment_id: str, log_tail: int = 0) -> ET.Element:
    terminal_time = record.timestamps[-1][1] if record.terminal else None
    el = ET.Element(
        "job",
        {
            "job_id": record.job_id,
            "experiment": experiment_id,
            "match_id": record.spec.match_id,
            "state": record.state.value,
            "attempt": str(record.attempt),
            "cluster": record.placement[0] if record.placement else "",
            "submitted_at": xmlio.fmt_float(record.timestamps[0][1]),
            "finished_at": "" if terminal_time is None else xmlio.fmt_float(terminal_time),
            "failure_reason": record.failure_reason or "",
        },
    )
    for state, t, seq in record.timestamps:
        ET.SubElement(
            el, "transition", {"state": state.value, "time": xmlio.fmt_float(t), "seq": str(seq)}
        )
    if log_tail:
        log = ET.SubElement(el, "log")
        log.text = "\n".join(record.log_lines[-log_tail:])
    return el


def create_app(platform: Platform, api_token: str | None = None, ui_dir=None) -> FastAPI:
    app = FastAPI(title="gridarena", docs_url=None, redoc_url=None)

    @app.middleware("http")
    async def check_token(request: Request, call_next):
        if api_token is not None and request.url.path != "/healthz":
            if request.headers.get("x-api-token") != api_token:
                return error_response("unauthorized", "missing or wrong x-api-token", 401)
        return await call_next(request)

    @app.get("/healthz")
    def healthz() -> Response:
        return xml_response(ET.Element("ok"))

    @app.post("/experiments")
    async def create_experiment(request: Request) -> Response:
        body = await request.body()
        try:
            manifest = manifest_from_xml(xmlio.parse_text(body))
        except ET.ParseError as exc:
            return error_response("bad_xml", f"unparseable manifest: {exc}", 422)
        except (ValueError, KeyError) as exc:
            return error_response("invalid_manifest", str(exc), 422)
        try:
            experiment_id = platform.create(manifest)
        except OrchestratorError as exc:
            return error_response("conflict", str(exc), 409)
        return xml_response(ET.Element("created", {"id": experiment_id}), 201)

    @app.get("/experiments")
    def list_experiments() -> Response:
        root = ET.Element("experiments")
        for experiment_id in platform.experiment_ids():
            status = platform.status(experiment_id)
            ET.SubElement(
                root, "experiment", {"id": experiment_id, "state": status.state.value}
            )
        return xml_response(root)

    @app.get("/experiments/{experiment_id}")
    def get_experiment(experiment_id: str) -> Response:
        try:
            return xml_response(status_to_xml(platform.status(experiment_id)))
        except KeyError:
            return error_response("not_found", f"no experiment {experiment_id!r}", 404)

    @app.post("/experiments/{experiment_id}/start")
    def start_experiment(experiment_id: str) -> Response:
        try:
            state = platform.start(experiment_id)
        except KeyError:
            return error_response("not_found", f"no experiment {experiment_id!r}", 404)
        except OrchestratorError as exc:
            return error_response("conflict", str(exc), 409)
        return xml_response(ET.Element("ok", {"id": experiment_id, "state": state.value}))

    @app.post("/experiments/{experiment_id}/pause")
    def pause_experiment(experiment_id: str) -> Response:
        try:
            state = platform.pause(experiment_id)
        except KeyError:
            return error_response("not_found", f"no experiment {experiment_id!r}", 404)
        except OrchestratorError as exc:
            return error_response("conflict", str(exc), 409)
        return xml_response(ET.Element("ok", {"id": experiment_id, "state": state.value}))

    @app.get("/experiments/{experiment_id}/jobs")
    def list_jobs(experiment_id: str, state: str | None = None) -> Response:
        if state is not None and state not in JobState.__members__:
            return error_response("bad_state", f"unknown job state {state!r}", 422)
        try:
            records = platform.jobs(experiment_id, state)
        except KeyError:
            return error_response("not_found", f"no experiment {experiment_id!r}", 404)
        root = ET.Element("jobs", {"experiment": experiment_id})
        for record in records:
            root.append(job_to_xml(record, experiment_id))
        return xml_response(root)

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str) -> Response:
        try:
            experiment_id, record = platform.find_job(job_id)
        except KeyError:
            return error_response("not_found", f"no job {job_id!r}", 404)
        return xml_response(job_to_xml(record, experiment_id, log_tail=50))

    @app.post("/jobs/{job_id}/resubmit")
    def resubmit_job(job_id: str) -> Response:
        try:
            new_id = platform.resubmit_job(job_id)
        except KeyError:
            return error_response("not_found", f"no job {job_id!r}", 404)
        except OrchestratorError as exc:
            return error_response("conflict", str(exc), 409)
        return xml_response(ET.Element("ok", {"job_id": job_id, "new_job_id": new_id}))

    @app.get("/grid/usage")
    def grid_usage() -> Response:
        root = ET.Element("usage")
        for experiment_id, stats in sorted(platform.usage().items()):
            exp_el = ET.SubElement(
                root,
                "experiment",
                {"id": experiment_id, "makespan": xmlio.fmt_float(stats.makespan)},
            )
            for cluster_id in sorted(stats.per_cluster):
                u = stats.per_cluster[cluster_id]
                ET.SubElement(
                    exp_el,
                    "cluster",
                    {
                        "id": cluster_id,
                        "jobs_run": str(u.jobs_run),
                        "busy": xmlio.fmt_float(u.busy_time),
                        "idle": xmlio.fmt_float(u.idle_time),
                        "bytes_in": str(u.bytes_staged_in),
                        "bytes_out": str(u.bytes_staged_out),
                        "failures": str(u.failures),
                    },
                )
        return xml_response(root)

    @app.get("/experiments/{experiment_id}/report")
    def get_report(experiment_id: str) -> Response:
        try:
            report = platform.report(experiment_id)
        except KeyError:
            return error_response("not_found", f"no experiment {experiment_id!r}", 404)
        except OrchestratorError as exc:
            return error_response("conflict", str(exc), 409)
        return xml_response(report_to_xml(report))

    @app.get("/events")
    def stream_events(since: int = 0, follow: bool = True) -> StreamingResponse:
        def generate():
            cursor = since
            idle_rounds = 0
            while True:
                events = platform.events(cursor)
                for event in events:
                    cursor = event.seq
                    yield f"data: {event.line()}\n\n"
                if not follow:
                    break
                if events:
                    idle_rounds = 0
                    continue
                if not platform.busy():
                    idle_rounds += 1
                    if idle_rounds > 3:
                        break
                time.sleep(0.02)

        return StreamingResponse(generate(), media_type="text/event-stream")

    if ui_dir is not None:
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app

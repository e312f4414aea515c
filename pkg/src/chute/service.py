"""HTTP navigation service: sessions, background navigations, shell reuse.

Each session owns an instance, a reference point, accumulated lower/upper
shells and an append-only JSONL event log; state is rebuilt by replay on
restart.  Navigations are long-running, so POST returns a job id and the
result is polled.  Per-session jobs run on a single worker thread, which
serializes shell mutation; requests on distinct sessions proceed
concurrently.  Stored upper-shell members are screened against each fresh
lower-bound vector and can tighten the new upper bounds beyond the fresh
probes.
"""

from __future__ import annotations

import json
import queue
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .engine import CHUTE1, ChuteConfig, chute
from .errors import ChuteError
from .instances import MomipInstance, WeightVector, parse_instance, serialize_instance
from .scalarize import (
    BEST_BOUND,
    DEFAULT_EPSILON,
    DEFAULT_RHO,
    ReferencePoint,
    estimate_reference_point,
)
from .shells import (
    LOWER,
    UPPER,
    BoundVector,
    Shell,
    eligible_for_upper,
    interval_representation,
    merge_lower,
    merge_upper,
    shell_from_dict,
    shell_to_dict,
    upper_bounds,
)

MAX_UPLOAD_BYTES = 2_000_000
MAX_TL_SECONDS = 30.0
MAX_TS_SECONDS = 30.0
JOB_QUEUE_LIMIT = 4

JOB_QUEUED = "queued"
JOB_RUNNING = "running"
JOB_DONE = "done"
JOB_ERROR = "error"


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class Job:
    id: str
    session_id: str
    status: str = JOB_QUEUED
    result: dict | None = None
    error: str | None = None


@dataclass
class Session:
    id: str
    instance_id: str
    inst: MomipInstance
    y_star: ReferencePoint
    defaults: dict
    acc_lower: Shell = field(default_factory=lambda: Shell(LOWER, ()))
    acc_upper: Shell = field(default_factory=lambda: Shell(UPPER, ()))
    history: list[dict] = field(default_factory=list)
    jobs: "queue.Queue" = field(default_factory=lambda: queue.Queue(maxsize=JOB_QUEUE_LIMIT))
    worker: threading.Thread | None = None


def _new_id() -> str:
    return uuid.uuid4().hex[:12]


def _clamp_budgets(cfg: dict) -> dict:
    out = dict(cfg)
    out["tl"] = min(float(out.get("tl", 5.0)), MAX_TL_SECONDS)
    out["ts"] = min(float(out.get("ts", 2.0)), MAX_TS_SECONDS)
    return out


class NavigationService:
    """State shared by all endpoints; safe for FastAPI's request threadpool."""

    def __init__(self, data_dir: str, queue_limit: int = JOB_QUEUE_LIMIT):
        self.data_dir = Path(data_dir)
        self.instances_dir = self.data_dir / "instances"
        self.sessions_dir = self.data_dir / "sessions"
        self.instances_dir.mkdir(parents=True, exist_ok=True)
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self.queue_limit = queue_limit
        self.instances: dict[str, MomipInstance] = {}
        self.sessions: dict[str, Session] = {}
        self.jobs: dict[str, Job] = {}
        self.lock = threading.Lock()
        self._recover()

    # -- persistence ---------------------------------------------------

    def _recover(self) -> None:
        for path in sorted(self.instances_dir.glob("*.json")):
            self.instances[path.stem] = parse_instance(path.read_text())
        for path in sorted(self.sessions_dir.glob("*.jsonl")):
            session = self._replay(path)
            if session is not None:
                self.sessions[session.id] = session
                self._start_worker(session)

    def _replay(self, path: Path) -> Session | None:
        session = None
        for line in path.read_text().splitlines():
            if not line.strip():
                continue
            event = json.loads(line)
            if event["event"] == "created":
                if event["instance_id"] not in self.instances:
                    return None  # orphaned log; instance file is gone
                inst = self.instances[event["instance_id"]]
                session = Session(
                    id=path.stem,
                    instance_id=event["instance_id"],
                    inst=inst,
                    y_star=ReferencePoint(tuple(event["y_star"]["values"]),
                                          tuple(event["y_star"]["provenance"])),
                    defaults=event["config"],
                    jobs=queue.Queue(maxsize=self.queue_limit),
                )
            elif event["event"] == "navigated" and session is not None:
                session.history.append(event["entry"])
                session.acc_lower = merge_lower(
                    [session.acc_lower, shell_from_dict(event["lower_delta"])])
                session.acc_upper = merge_upper(
                    [session.acc_upper, shell_from_dict(event["upper_delta"])])
        return session

    def _append_event(self, session: Session, event: dict) -> None:
        path = self.sessions_dir / f"{session.id}.jsonl"
        with path.open("a") as fh:
            fh.write(json.dumps(event) + "\n")

    # -- instances and sessions -----------------------------------------

    def add_instance(self, text: str) -> str:
        if len(text.encode()) > MAX_UPLOAD_BYTES:
            raise ApiError(413, "too_large", f"instance exceeds {MAX_UPLOAD_BYTES} bytes")
        try:
            inst = parse_instance(text)
        except ChuteError as e:
            raise ApiError(400, "invalid_instance", str(e))
        instance_id = _new_id()
        (self.instances_dir / f"{instance_id}.json").write_text(serialize_instance(inst))
        with self.lock:
            self.instances[instance_id] = inst
        return instance_id

    def create_session(self, body: dict) -> Session:
        if "instance" in body:
            instance_id = self.add_instance(json.dumps(body["instance"]))
        elif "instance_id" in body:
            instance_id = body["instance_id"]
            if instance_id not in self.instances:
                raise ApiError(400, "invalid_instance", f"unknown instance {instance_id!r}")
        else:
            raise ApiError(400, "invalid_instance", "need 'instance' or 'instance_id'")
        inst = self.instances[instance_id]
        if inst.k not in (2, 3):
            raise ApiError(400, "invalid_instance", f"service supports k in {{2, 3}}, got {inst.k}")
        config = _clamp_budgets(body.get("config", {}))
        config.setdefault("gamma", 10.0)
        config.setdefault("variant", CHUTE1)
        config.setdefault("rho", DEFAULT_RHO)
        config.setdefault("n_stall", 20)
        if "y_star" in body:
            values = tuple(float(v) for v in body["y_star"]["values"])
            prov = tuple(body["y_star"].get("provenance", [BEST_BOUND] * len(values)))
            y_star = ReferencePoint(values, prov)
            if y_star.k != inst.k:
                raise ApiError(400, "invalid_instance", "y* length does not match k")
        else:
            y_star = estimate_reference_point(
                inst, per_objective_deadline=config["ts"],
                epsilon=float(body.get("epsilon", DEFAULT_EPSILON)))
        session = Session(
            id=_new_id(),
            instance_id=instance_id,
            inst=inst,
            y_star=y_star,
            defaults=config,
            jobs=queue.Queue(maxsize=self.queue_limit),
        )
        with self.lock:
            self.sessions[session.id] = session
        self._append_event(session, {
            "event": "created",
            "instance_id": instance_id,
            "y_star": {"values": list(y_star.values), "provenance": list(y_star.provenance)},
            "config": config,
        })
        self._start_worker(session)
        return session

    def _start_worker(self, session: Session) -> None:
        worker = threading.Thread(target=self._worker_loop, args=(session,),
                                  name=f"nav-{session.id}", daemon=True)
        session.worker = worker
        worker.start()

    # -- navigation ------------------------------------------------------

    def get_session(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise ApiError(404, "unknown_session", f"no session {session_id!r}")
        return session

    def submit_navigation(self, session_id: str, body: dict) -> Job:
        session = self.get_session(session_id)
        lam_raw = body.get("lambda")
        if not isinstance(lam_raw, list):
            raise ApiError(422, "invalid_lambda", "body must carry 'lambda' as a list")
        try:
            lam = WeightVector(tuple(float(v) for v in lam_raw))
        except ChuteError as e:
            raise ApiError(422, "invalid_lambda", str(e))
        if lam.k != session.inst.k:
            raise ApiError(422, "invalid_lambda",
                           f"lambda has k={lam.k}, session instance has k={session.inst.k}")
        overrides = _clamp_budgets({**session.defaults,
                                    **{k: v for k, v in body.items()
                                       if k in ("gamma", "variant", "tl", "ts", "n_stall", "rho")}})
        job = Job(id=_new_id(), session_id=session_id)
        with self.lock:
            self.jobs[job.id] = job
        try:
            session.jobs.put_nowait((job, lam, overrides))
        except queue.Full:
            with self.lock:
                del self.jobs[job.id]
            raise ApiError(503, "queue_full", "session job queue is full")
        return job

    def _worker_loop(self, session: Session) -> None:
        while True:
            job, lam, overrides = session.jobs.get()
            job.status = JOB_RUNNING
            try:
                job.result = self._navigate(session, lam, overrides)
                job.status = JOB_DONE
            except Exception as e:  # job errors surface through polling
                job.error = str(e)
                job.status = JOB_ERROR
            finally:
                session.jobs.task_done()

    def _navigate(self, session: Session, lam: WeightVector, overrides: dict) -> dict:
        requested_at = time.time()
        cfg = ChuteConfig(
            variant=overrides.get("variant", CHUTE1),
            tl=float(overrides["tl"]),
            gamma=float(overrides.get("gamma", 10.0)),
            rho=float(overrides.get("rho", DEFAULT_RHO)),
            n_stall=int(overrides.get("n_stall", 20)),
            ts=float(overrides["ts"]),
        )
        result = chute(session.inst, lam, session.y_star, cfg)

        # screen stored members against the fresh lower bounds
        stored = session.acc_upper
        reused = sum(
            1 for m in stored.members
            if any(eligible_for_upper(m.outcome, l, result.lower)
                   for l in range(session.inst.k))
        )
        hist_upper = upper_bounds(stored, result.lower, session.y_star)
        final_upper = tuple(min(a, b) for a, b in zip(result.upper.values, hist_upper.values))
        final_vec = BoundVector(UPPER, final_upper,
                                tuple(hs if hv < fv else fs
                                      for hv, fv, hs, fs in zip(hist_upper.values,
                                                                result.upper.values,
                                                                hist_upper.sources,
                                                                result.upper.sources)))
        rep = interval_representation(result.lower, final_vec, lam)

        before_lower = len(session.acc_lower)
        before_upper = len(session.acc_upper)
        session.acc_lower = merge_lower([session.acc_lower, result.s_l])
        session.acc_upper = merge_upper([session.acc_upper, result.s_u])

        entry = {
            "lambda": list(lam.weights),
            "variant": cfg.variant,
            "gamma": cfg.gamma,
            "intervals": [list(pair) for pair in rep.intervals],
            "gap": list(rep.gap),
            "L": list(result.lower.values),
            "U": list(final_upper),
            "U_fresh": list(result.upper.values),
            "reused_members": reused,
            "timings": {"incumbent_s": result.timings.incumbent_s,
                        "dual_s": result.timings.dual_s,
                        "shells_s": list(result.timings.shells_s)},
            "shell_delta": {"lower": len(session.acc_lower) - before_lower,
                            "upper": len(session.acc_upper) - before_upper},
            "requested_at": requested_at,
            "completed_at": time.time(),
        }
        session.history.append(entry)
        self._append_event(session, {
            "event": "navigated",
            "entry": entry,
            "lower_delta": _shell_doc(result.s_l),
            "upper_delta": _shell_doc(result.s_u),
        })
        return entry

    # -- reads -----------------------------------------------------------

    def front(self, session_id: str) -> dict:
        session = self.get_session(session_id)
        return {
            "instance": session.inst.name,
            "k": session.inst.k,
            "y_star": list(session.y_star.values),
            "lower": [list(m.outcome.values) for m in session.acc_lower.members],
            "upper": [list(m.outcome.values) for m in session.acc_upper.members],
            "history": [{"lambda": e["lambda"], "intervals": e["intervals"], "gap": e["gap"]}
                        for e in session.history],
        }

    def history(self, session_id: str) -> dict:
        session = self.get_session(session_id)
        return {"entries": session.history}


def _shell_doc(shell: Shell) -> dict:
    return shell_to_dict(shell)


def create_app(data_dir: str, queue_limit: int = JOB_QUEUE_LIMIT) -> FastAPI:
    service = NavigationService(data_dir, queue_limit=queue_limit)
    app = FastAPI(title="chute navigation service")
    app.state.service = service
    # the browser client may be served from another origin (static files)
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(ApiError)
    async def api_error_handler(_request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message})

    @app.post("/instances", status_code=201)
    async def post_instance(request: Request):
        body = await request.body()
        if len(body) > MAX_UPLOAD_BYTES:
            raise ApiError(413, "too_large", f"instance exceeds {MAX_UPLOAD_BYTES} bytes")
        return {"instance_id": service.add_instance(body.decode("utf-8", "replace"))}

    @app.post("/sessions", status_code=201)
    async def post_session(request: Request):
        try:
            body = json.loads(await request.body() or b"{}")
        except json.JSONDecodeError as e:
            raise ApiError(400, "invalid_instance", f"invalid JSON body: {e}")
        session = service.create_session(body)
        return {"session_id": session.id,
                "instance_id": session.instance_id,
                "k": session.inst.k,
                "y_star": list(session.y_star.values),
                "config": session.defaults}

    @app.post("/sessions/{session_id}/navigate", status_code=202)
    async def post_navigate(session_id: str, request: Request):
        try:
            body = json.loads(await request.body() or b"{}")
        except json.JSONDecodeError as e:
            raise ApiError(422, "invalid_lambda", f"invalid JSON body: {e}")
        job = service.submit_navigation(session_id, body)
        return {"job_id": job.id, "status": job.status}

    @app.get("/jobs/{job_id}")
    async def get_job(job_id: str):
        job = service.jobs.get(job_id)
        if job is None:
            raise ApiError(404, "unknown_job", f"no job {job_id!r}")
        doc = {"job_id": job.id, "session_id": job.session_id, "status": job.status}
        if job.status == JOB_DONE:
            doc["result"] = job.result
        elif job.status == JOB_ERROR:
            doc["error"] = job.error
        return doc

    @app.get("/sessions/{session_id}/front")
    async def get_front(session_id: str):
        return service.front(session_id)

    @app.get("/sessions/{session_id}/history")
    async def get_history(session_id: str):
        return service.history(session_id)

    return app

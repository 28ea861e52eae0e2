"""Stateful HTTP session service for interactive steering.

One session per uploaded dataset. Mutations go through a per-session
lock (single writer); reads take the last published immutable snapshot
without locking, so concurrent renders never see torn state. The
revision counter moves only when a mutation actually changes state:
no-ops return the same revision.

Sessions idle longer than the eviction timeout are dropped on the next
request; everything is reconstructible from the dataset and the
parameter log the client keeps.
"""

from __future__ import annotations

import io as _io
import secrets
import threading
import time
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from PIL import Image as PILImage
from pydantic import BaseModel

from . import pipeline
from .config import PipelineConfig
from .io import ParseError, parse_timeseries, parse_trajectories
from .model import LineSet
from .pipeline import (
    PipelineState,
    SingletonClusterError,
    StaleSampleError,
    UnknownClusterError,
)
from .render import render_density
from .synthetic import gen_continuation, gen_disconnected, gen_illusory

_DEFAULT_LIMIT = 64 * 1024 * 1024  # request payload cap, bytes
_DEFAULT_TTL = 30 * 60.0  # idle eviction, seconds


@dataclass
class _Session:
    state: PipelineState
    revision: int = 0
    last_access: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)


class UploadBody(BaseModel):
    csv: str | None = None
    kind: str = "auto"  # auto | trajectory | timeseries
    synth: dict | None = None
    config: dict | None = None


class ParamsBody(BaseModel):
    min_density: int | None = None
    k: int | None = None
    metric: str | None = None
    log_scale: bool | None = None


class PreprocessBody(BaseModel):
    min_density: int | None = None


class HueBody(BaseModel):
    cluster: int
    degrees: float
    pinned: bool = True


class TemplateBody(BaseModel):
    name: str


def _parse_upload(body: UploadBody) -> LineSet:
    if (body.csv is None) == (body.synth is None):
        raise ParseError("provide exactly one of 'csv' or 'synth'")
    if body.csv is not None:
        text = body.csv
        if body.kind == "trajectory":
            return parse_trajectories(text)[0]
        if body.kind == "timeseries":
            return parse_timeseries(text)[0]
        if body.kind != "auto":
            raise ParseError(f"unknown input kind {body.kind!r}")
        stripped = text.lstrip()
        if stripped.startswith("{") or stripped.startswith("["):
            return parse_trajectories(text)[0]
        first = stripped.splitlines()[0] if stripped else ""
        if first.count(",") == 2:
            return parse_trajectories(text)[0]
        return parse_timeseries(text)[0]

    spec = dict(body.synth)
    kind = spec.pop("kind", None)
    gens = {
        "illusory": gen_illusory,
        "continuation": gen_continuation,
        "disconnected": gen_disconnected,
    }
    if kind not in gens:
        raise ParseError(f"unknown synth kind {kind!r}")
    try:
        return gens[kind](**spec).lineset
    except TypeError as exc:
        raise ParseError(f"bad synth parameters: {exc}") from None


def _state_summary(session_id: str, sess: _Session) -> dict:
    state = sess.state
    cl = state.clustering
    degrees = state.hue_degrees()
    pinned_nodes = {n for n, _ in state.params.pins}
    line_counts = np.bincount(
        state.la.labels[state.la.labels >= 0], minlength=cl.k)
    bin_counts = np.bincount(
        state.cmap.labels[state.cmap.labels >= 0], minlength=cl.k)
    p = state.params
    return {
        "session": session_id,
        "revision": sess.revision,
        "params": {
            "min_density": p.min_density,
            "k": p.k,
            "metric": p.metric,
            "log_scale": p.log_scale,
            "template": p.template,
        },
        "grid": {"width": state.pre.spec.width, "height": state.pre.spec.height},
        "n_lines": len(state.pre.ls),
        "n_unassigned": int((state.la.labels < 0).sum()),
        "clusters": [
            {
                "id": i,
                "node": int(cl.nodes[i]),
                "hue_deg": float(degrees[i]),
                "pinned": cl.nodes[i] in pinned_nodes,
                "line_count": int(line_counts[i]),
                "bin_count": int(bin_counts[i]),
            }
            for i in range(cl.k)
        ],
        "dendrogram": state.pre.dendro.to_json_dict(),
    }


def create_app(
    *, max_bytes: int = _DEFAULT_LIMIT, ttl_seconds: float = _DEFAULT_TTL
) -> FastAPI:
    app = FastAPI(title="huelines session service", openapi_url="/spec")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"])

    store: dict[str, _Session] = {}
    store_lock = threading.Lock()

    def _sweep() -> None:
        now = time.monotonic()
        with store_lock:
            stale = [sid for sid, s in store.items()
                     if now - s.last_access > ttl_seconds]
            for sid in stale:
                del store[sid]

    def _get(session_id: str) -> _Session:
        _sweep()
        with store_lock:
            sess = store.get(session_id)
            if sess is None:
                raise HTTPException(404, f"no session {session_id}")
            sess.last_access = time.monotonic()
            return sess

    def _mutate(session_id: str, op) -> dict:
        """Apply op(state) -> state under the session's writer lock."""
        sess = _get(session_id)
        with sess.lock:
            try:
                new_state = op(sess.state)
            except UnknownClusterError as exc:
                raise HTTPException(404, f"no cluster {exc.args[0]}") from exc
            except SingletonClusterError as exc:
                raise HTTPException(409, str(exc)) from exc
            except StaleSampleError as exc:
                raise HTTPException(409, {
                    "message": str(exc),
                    "action": f"POST /sessions/{session_id}/preprocess",
                }) from exc
            except ValueError as exc:
                raise HTTPException(422, str(exc)) from exc
            if new_state is not sess.state:
                sess.state = new_state
                sess.revision += 1
            return _state_summary(session_id, sess)

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request, body: UploadBody):
        if int(request.headers.get("content-length") or 0) > max_bytes:
            raise HTTPException(413, f"payload exceeds {max_bytes} bytes")
        _sweep()
        try:
            ls = _parse_upload(body)
            config = PipelineConfig.from_json_dict(body.config or {})
            state = pipeline.run_pipeline(ls, config)
        except ParseError as exc:
            detail = {"message": str(exc)}
            if exc.row is not None:
                detail["row"] = exc.row
            raise HTTPException(422, detail) from exc
        except ValueError as exc:
            raise HTTPException(422, str(exc)) from exc
        session_id = secrets.token_hex(8)
        with store_lock:
            store[session_id] = _Session(state=state)
        return _state_summary(session_id, store[session_id])

    @app.post("/sessions/{session_id}/params")
    def set_params(session_id: str, body: ParamsBody):
        return _mutate(session_id, lambda s: pipeline.set_params(
            s, min_density=body.min_density, k=body.k, metric=body.metric,
            log_scale=body.log_scale))

    @app.post("/sessions/{session_id}/preprocess")
    def reprocess(session_id: str, body: PreprocessBody):
        def op(s: PipelineState) -> PipelineState:
            md = body.min_density if body.min_density is not None else s.params.min_density
            return pipeline.repreprocess(s, md)
        return _mutate(session_id, op)

    @app.post("/sessions/{session_id}/clusters/{cluster_id}/split")
    def split(session_id: str, cluster_id: int):
        return _mutate(session_id, lambda s: pipeline.split(s, cluster_id))

    @app.post("/sessions/{session_id}/hues")
    def set_hue(session_id: str, body: HueBody):
        return _mutate(session_id, lambda s: pipeline.set_hue(
            s, body.cluster, body.degrees, body.pinned))

    @app.post("/sessions/{session_id}/template")
    def set_template(session_id: str, body: TemplateBody):
        return _mutate(session_id, lambda s: pipeline.set_template(s, body.name))

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        return _state_summary(session_id, _get(session_id))

    @app.get("/sessions/{session_id}/render")
    def get_render(session_id: str, scale: int = Query(1, ge=1, le=16)):
        sess = _get(session_id)
        state = sess.state
        image = render_density(
            state.pre.dg, state.cmap, state.hues, scale=scale,
            log_scale=state.params.log_scale, ramp=state.ramp)
        buf = _io.BytesIO()
        PILImage.fromarray(image.pixels, mode="RGB").save(buf, format="PNG")
        return Response(content=buf.getvalue(), media_type="image/png",
                        headers={"X-Revision": str(sess.revision)})

    @app.get("/sessions/{session_id}/lines")
    def get_lines(session_id: str, cluster: str = Query(...)):
        sess = _get(session_id)
        state = sess.state
        if cluster == "unassigned":
            wanted = np.flatnonzero(state.la.labels < 0)
            label: int | str = "unassigned"
        else:
            try:
                cid = int(cluster)
            except ValueError:
                raise HTTPException(422, "cluster must be an index or 'unassigned'")
            if not 0 <= cid < state.clustering.k:
                raise HTTPException(404, f"no cluster {cid}")
            wanted = state.la.lines_of(cid)
            label = cid
        lines = [
            {"id": int(i), "points": state.pre.ls.lines[i].vertices.tolist()}
            for i in wanted
        ]
        return {"cluster": label, "count": len(lines), "lines": lines}

    return app

"""HTTP API serving annotation tasks to human annotators.

Thin JSON layer over :class:`~quadscorer.store.EventStore`: sessions are
identified by annotator id and role, votes go through the same workflow
rules as the library calls, and export writes the comparison dataset
files. When the ``QUADSCORER_TOKEN`` environment variable is set, every
request must carry it as a bearer token.
"""

from __future__ import annotations

import os
import time

from fastapi import Depends, FastAPI, HTTPException, Request
from pydantic import BaseModel

from .comparison import AnnotationTask, ResolvedTask, Vote
from .quads import LabelSequence, parse_label_sequence
from .store import EventStore, VoteRejected

TOKEN_ENV = "QUADSCORER_TOKEN"


class VotePayload(BaseModel):
    task_id: str
    annotator_id: str
    option: int
    write_in: str | None = None


class AdjudicationPayload(VotePayload):
    override: bool = False


class ExportPayload(BaseModel):
    dev_reserve: int
    out_dir: str
    seed: int = 0


def _task_payload(task: AnnotationTask, include_votes=None) -> dict:
    payload = {
        "task_id": task.task_id,
        "batch_id": task.batch_id,
        "review": {"id": task.review.id, "text": task.review.text,
                   "domain": task.review.domain},
        "candidates": [
            {
                "option": i,
                "text": c.label.text,
                "confidence": c.confidence,
                "quads": [
                    {"aspect": q.aspect_term, "category": q.aspect_category,
                     "opinion": q.opinion_term, "sentiment": q.sentiment}
                    for q in c.label.quads
                ],
            }
            for i, c in enumerate(task.candidates, start=1)
        ],
        "option_count": task.option_count(),
    }
    if include_votes is not None:
        payload["votes"] = [
            {"annotator_id": v.annotator_id, "option": v.option,
             "write_in": v.write_in.text if v.write_in else None}
            for _, v in include_votes
        ]
    return payload


def _resolution_payload(res: ResolvedTask) -> dict:
    return {
        "task_id": res.task_id,
        "resolution": res.resolution,
        "option": res.option,
        "resolved_by": res.resolved_by,
        "positive": res.positive.text if res.positive else None,
    }


def _build_vote(payload: VotePayload) -> Vote:
    write_in = None
    if payload.write_in is not None:
        quads, dropped = parse_label_sequence(payload.write_in)
        if dropped > 0 or not quads:
            raise HTTPException(
                status_code=422,
                detail=f"write-in does not parse cleanly ({dropped} malformed segments)")
        write_in = LabelSequence(text=payload.write_in, quads=tuple(quads))
    try:
        return Vote(task_id=payload.task_id, annotator_id=payload.annotator_id,
                    option=payload.option, write_in=write_in, timestamp=time.time())
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


def create_app(store: EventStore) -> FastAPI:
    app = FastAPI(title="quadscorer annotation service")

    def authorized(request: Request) -> None:
        token = os.environ.get(TOKEN_ENV)
        if not token:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="invalid bearer token")

    @app.get("/tasks/next", dependencies=[Depends(authorized)])
    def next_task(annotator_id: str, role: str = "annotator",
                  batch_id: str | None = None):
        if role not in ("annotator", "adjudicator"):
            raise HTTPException(status_code=422, detail=f"unknown role {role!r}")
        task = store.next_task(annotator_id, role=role, batch_id=batch_id)
        if task is None:
            return {"task": None, "batch_complete": True,
                    "progress": store.progress()}
        votes = store.votes.get(task.task_id) if role == "adjudicator" else None
        return {"task": _task_payload(task, include_votes=votes),
                "batch_complete": False}

    @app.get("/tasks/{task_id}", dependencies=[Depends(authorized)])
    def get_task(task_id: str, role: str = "annotator"):
        task = store.tasks.get(task_id)
        if task is None:
            raise HTTPException(status_code=404, detail=f"unknown task {task_id!r}")
        votes = store.votes.get(task_id) if role == "adjudicator" else None
        payload = _task_payload(task, include_votes=votes)
        resolution = store.resolutions.get(task_id)
        payload["resolution"] = _resolution_payload(resolution) if resolution else None
        return payload

    @app.post("/votes", dependencies=[Depends(authorized)])
    def submit_vote(payload: VotePayload):
        vote = _build_vote(payload)
        try:
            resolution = store.submit_vote(vote)
        except VoteRejected as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {"accepted": True,
                "resolution": _resolution_payload(resolution) if resolution else None}

    @app.post("/adjudications", dependencies=[Depends(authorized)])
    def submit_adjudication(payload: AdjudicationPayload):
        vote = _build_vote(payload)
        try:
            resolution = store.submit_adjudication(vote, override=payload.override)
        except VoteRejected as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {"accepted": True, "resolution": _resolution_payload(resolution)}

    @app.get("/progress", dependencies=[Depends(authorized)])
    def progress():
        return store.progress()

    @app.post("/export", dependencies=[Depends(authorized)])
    def export(payload: ExportPayload):
        try:
            return store.export_dataset(payload.dev_reserve, payload.out_dir,
                                        seed=payload.seed)
        except ValueError as exc:
            raise HTTPException(status_code=409, detail=str(exc))

    return app


def serve(store_dir, port: int = 8400, host: str = "127.0.0.1") -> None:
    import uvicorn

    app = create_app(EventStore(store_dir))
    uvicorn.run(app, host=host, port=port, log_level="warning")

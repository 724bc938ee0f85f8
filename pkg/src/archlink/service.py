"""HTTP review service.

A thin layer over the Engine: reads are free-threaded, writes (decisions,
retraining) serialize through the engine's writer lock, and every mutation
requires a client request identifier so retries are idempotent.
"""

import time

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .engine import Engine
from .errors import ArchlinkError, NotFoundError, ParameterError
from .evaluation import select_model
from .models import model_to_json
from .recommend import Decision

_STATUS_BY_CODE = {
    "not_found": 404,
    "conflict": 409,
    "schema": 422,
    "parameter": 400,
    "internal": 500,
}


class DecisionBody(BaseModel):
    rec_id: str
    verdict: str
    reviewer: str
    request_id: str
    pair: list[str] | None = None
    predicate: str | None = None


class TrainBody(BaseModel):
    spec: str
    model: str = "auto"
    unit: str = "historian_pair"
    request_id: str


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="archlink review service", version="0.1.0")
    state = {"train_requests": {}}

    @app.exception_handler(ArchlinkError)
    async def archlink_error_handler(request: Request, exc: ArchlinkError):
        return JSONResponse(
            status_code=_STATUS_BY_CODE.get(exc.code, 500),
            content={"code": exc.code, "message": exc.message, "detail": exc.detail},
        )

    def rec_index() -> dict:
        return {rec.id: rec for rec in engine.recommendations(include_decided=True)}

    def rec_status(rec_id: str, labels: dict, rec) -> str:
        label = labels.get((rec.pair, rec.predicate))
        if label is None:
            return "pending"
        return "accepted" if label == 1 else "rejected"

    @app.get("/health")
    def health():
        return {"status": "ok", "store": engine.store.counts()}

    @app.get("/entities/{entity_id}")
    def entity(entity_id: str):
        ent = engine.store.entity(entity_id)
        statements = [
            {
                "subject": s.subject,
                "predicate": s.predicate,
                "object": s.object,
                "graph": s.graph,
                "source": s.source,
            }
            for s in engine.store.statements_about(entity_id)
        ]
        texts = {
            field: rec.text
            for field in ("biography", "description")
            if (rec := engine.store.text(entity_id, field)) is not None
        }
        return {
            "id": ent.id,
            "kind": ent.kind,
            "label": ent.label,
            "aliases": list(ent.aliases),
            "external_id": ent.external_id,
            "statements": statements,
            "texts": texts,
        }

    @app.get("/recommendations")
    def recommendations(
        entity: str | None = Query(default=None),
        limit: int | None = Query(default=None, ge=1),
        include_decided: bool = Query(default=True),
    ):
        recs = engine.recommendations(entity, limit=limit, include_decided=include_decided)
        labels = engine.decision_log.labels()
        items = []
        for rec in recs:
            doc = rec.as_dict()
            doc["status"] = rec_status(rec.id, labels, rec)
            doc["pair_labels"] = [
                engine.store.entity(e).label if engine.store.has_entity(e) else e
                for e in rec.pair
            ]
            items.append(doc)
        return {"items": items, "count": len(items)}

    @app.post("/decisions", status_code=201)
    def post_decision(body: DecisionBody):
        if body.verdict not in ("accept", "reject"):
            raise ParameterError(f"unknown verdict {body.verdict!r}")
        index = rec_index()
        rec = index.get(body.rec_id)
        if rec is None:
            raise NotFoundError(
                f"unknown recommendation {body.rec_id!r}", {"rec_id": body.rec_id}
            )
        decision = Decision(
            rec_id=body.rec_id,
            pair=rec.pair,
            predicate=rec.predicate,
            verdict=body.verdict,
            reviewer=body.reviewer,
            timestamp=time.time(),
            request_id=body.request_id,
        )
        recorded = engine.record(decision, known_recs=index)
        labels = engine.decision_log.labels()
        return {
            "recorded": recorded,
            "rec_id": body.rec_id,
            "status": rec_status(body.rec_id, labels, rec),
        }

    @app.get("/decisions")
    def decisions():
        return {
            "items": [
                {
                    "rec_id": d.rec_id,
                    "pair": list(d.pair),
                    "predicate": d.predicate,
                    "verdict": d.verdict,
                    "reviewer": d.reviewer,
                    "timestamp": d.timestamp,
                    "request_id": d.request_id,
                }
                for d in engine.decision_log.decisions()
            ]
        }

    @app.get("/eda/report")
    def eda_report():
        report = engine.eda_report()
        return {"counts": report.counts(), "text": report.text()}

    @app.get("/models/grid")
    def models_grid(unit: str = Query(default="historian_pair")):
        report = engine.grid(unit)
        doc = report.to_json()
        doc["selected"] = {
            spec: select_model(report.column(spec))
            for spec in report.spec_names()
            if report.column(spec)
        }
        return doc

    @app.post("/train")
    def train(body: TrainBody):
        cached = state["train_requests"].get(body.request_id)
        if cached is not None:
            return cached
        model = engine.train_model(body.spec, body.model, body.unit)
        response = {
            "spec": body.spec,
            "unit": body.unit,
            "model": model_to_json(model),
        }
        state["train_requests"][body.request_id] = response
        return response

    return app

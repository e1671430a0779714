"""HTTP layer: versioned JSON API over the service core.

    GET  /api/v1/prioritize?user=<id>   ranked open requests for the user
    POST /api/v1/retrain                train on the stored dataset, swap atomically
    GET  /api/v1/model/info             served-model metadata
    GET  /api/v1/health                 liveness and job freshness

Error bodies are `{"error": <message>}` plus a `retry` flag where a retry
can help (502 from an unreachable review server).
"""
from __future__ import annotations

import logging

from fastapi import FastAPI, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .errors import EmptyDatasetError, NoModelError, TransientServerError
from .service import ReviewService

logger = logging.getLogger(__name__)


def create_app(service: ReviewService) -> FastAPI:
    app = FastAPI(title="reviewrank", docs_url=None, redoc_url=None)
    # the dashboard may be served from any static host
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["GET", "POST"])

    @app.get("/api/v1/prioritize")
    def prioritize_endpoint(user: str = Query(...)):
        if not user.strip():
            return JSONResponse(status_code=400, content={"error": "user id must be non-empty"})
        try:
            return service.prioritize_for_user(user)
        except NoModelError as exc:
            return JSONResponse(status_code=503, content={"error": str(exc)})
        except TransientServerError as exc:
            return JSONResponse(
                status_code=502,
                content={"error": f"review server unreachable: {exc}", "retry": True},
            )

    @app.post("/api/v1/retrain")
    def retrain_endpoint():
        try:
            summary = service.retrain()
        except EmptyDatasetError as exc:
            return JSONResponse(status_code=409, content={"error": str(exc)})
        except Exception as exc:  # old model stays in place on any training failure
            logger.exception("retrain failed")
            return JSONResponse(status_code=500, content={"error": f"training failed: {exc}"})
        return {"trained_at": summary.trained_at, "training_rows": summary.training_rows}

    @app.get("/api/v1/model/info")
    def model_info_endpoint():
        return service.model_info()

    @app.get("/api/v1/health")
    def health_endpoint():
        return service.health()

    return app

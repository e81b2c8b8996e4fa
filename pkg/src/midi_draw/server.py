"""HTTP service: contour analysis and melody generation for the webapp.

Stateless; the model checkpoint is loaded once and shared read-only.  Bodies
are parsed by hand so that malformed JSON yields 400 and invalid fields 422,
always with an {"error": ...} JSON body.
"""

from __future__ import annotations

import base64
import json
import secrets
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .checkpoint import load_checkpoint
from .contour import (
    DrawnStroke,
    components_to_curve,
    extract_components,
    fit_vs_k,
    resample_stroke,
)
from .dataset import PitchVocabulary
from .generate import GenerationRequest, generate
from .midi import write_midi


@dataclass(frozen=True)
class ServiceConfig:
    port: int = 8080
    checkpoint_path: str | None = None
    static_dir: str | None = None
    max_candidates: int = 256

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port out of range: {self.port}")
        if self.max_candidates < 1:
            raise ValueError(f"max_candidates must be >= 1, got {self.max_candidates}")


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


async def _parse_body(request: Request):
    """Returns (payload, None) or (None, error response)."""
    raw = await request.body()
    try:
        payload = json.loads(raw)
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        return None, _error(400, f"malformed JSON: {e}")
    if not isinstance(payload, dict):
        return None, _error(422, "body must be a JSON object")
    return payload, None


def _parse_stroke(payload: dict):
    """Returns (stroke, None) or (None, error response)."""
    points = payload.get("points")
    width = payload.get("width")
    height = payload.get("height")
    if not isinstance(points, list) or not all(
        isinstance(p, (list, tuple)) and len(p) == 2 for p in points
    ):
        return None, _error(422, "points must be a list of [x, y] pairs")
    if not isinstance(width, (int, float)) or not isinstance(height, (int, float)):
        return None, _error(422, "width and height must be numbers")
    try:
        stroke = DrawnStroke(
            points=tuple((float(x), float(y)) for x, y in points),
            canvas_width=float(width),
            canvas_height=float(height),
        )
    except (TypeError, ValueError) as e:
        return None, _error(422, str(e))
    return stroke, None


def create_app(config: ServiceConfig = ServiceConfig()) -> FastAPI:
    params = None
    if config.checkpoint_path is not None:
        params = load_checkpoint(config.checkpoint_path)

    app = FastAPI(title="midi-draw", docs_url=None, redoc_url=None)

    @app.exception_handler(Exception)
    async def unhandled(request: Request, exc: Exception):  # pragma: no cover - safety net
        return _error(500, f"internal error: {exc}")

    @app.get("/api/health")
    async def health():
        return {"status": "ok", "model_version": None if params is None else params.version}

    @app.post("/api/contour")
    async def contour(request: Request):
        payload, err = await _parse_body(request)
        if err is not None:
            return err
        stroke, err = _parse_stroke(payload)
        if err is not None:
            return err
        series = resample_stroke(stroke)
        comps = extract_components(series)
        curve = components_to_curve(comps)
        fit = fit_vs_k(series, 8)
        return JSONResponse(
            content={
                "series": [float(v) for v in series],
                "components": [comps.c1, comps.c2, comps.c3],
                "curve": [float(v) for v in curve],
                "fit": [{"k": k, "rmse": float(r)} for k, r in fit],
            }
        )

    @app.post("/api/generate")
    async def gen(request: Request):
        payload, err = await _parse_body(request)
        if err is not None:
            return err
        if params is None:
            return _error(503, "no model loaded")
        stroke, err = _parse_stroke(payload)
        if err is not None:
            return err
        candidates = payload.get("candidates", 64)
        temperature = payload.get("temperature", 1.0)
        seed = payload.get("seed")
        if not isinstance(candidates, int) or isinstance(candidates, bool):
            return _error(422, "candidates must be an integer")
        if not 1 <= candidates <= config.max_candidates:
            return _error(422, f"candidates must be in 1..{config.max_candidates}")
        if not isinstance(temperature, (int, float)) or temperature < 0:
            return _error(422, "temperature must be a number >= 0")
        if seed is None:
            seed = secrets.randbits(62)  # echoed below so the response stays reproducible
        elif not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            return _error(422, "seed must be a non-negative integer")

        series = resample_stroke(stroke)
        target = extract_components(series)
        result = generate(
            params,
            GenerationRequest(
                target=target, n_candidates=candidates, temperature=float(temperature), seed=seed
            ),
        )
        vocab = PitchVocabulary(midi_low=params.hyper.vocab_low, size=params.hyper.vocab_size)
        pitches = vocab.tokens_to_midi(result.best)
        notes = [{"pitch": int(p), "start": i, "dur": 1} for i, p in enumerate(pitches)]
        midi = write_midi(result.best, vocab)
        return JSONResponse(
            content={
                "seed": seed,
                "notes": notes,
                "curve": [float(v) for v in result.curve],
                "components": [target.c1, target.c2, target.c3],
                "fit_mse": result.fit_mse,
                "candidate_mses": [float(v) for v in result.candidate_mses],
                "midi_base64": base64.b64encode(midi).decode("ascii"),
            }
        )

    if config.static_dir is not None and Path(config.static_dir).is_dir():
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="static")

    return app

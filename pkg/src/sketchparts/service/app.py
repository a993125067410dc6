"""HTTP suggestion service: stroke sampling, next-part suggestion, completion.

Stateless by design: the partial sketch travels in every request, models
load once into a read-only registry, and each request seeds its own RNG
(from the request seed or fresh entropy), so concurrent handlers never
share mutable state.
"""

from __future__ import annotations

import base64
import logging
import os
import time
import uuid

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .. import datasets as ds
from ..errors import DuplicatePart, ModelNotLoaded, SketchPartsError
from ..inference import InferenceConfig, complete_sketch, generate_eye, perturbed_generate
from ..raster_io import raster_to_png_bytes
from ..registry import ModelRegistry
from ..sampler import sample_initial_stroke
from ..selector import STOP, select_next
from ..sketch import Part, Sketch, Stroke, encode_part_channels
from ..vectorize import TraceConfig, vectorize_raster
from . import schemas

log = logging.getLogger("sketchparts.service")

DEFAULT_VARIANT_CAP = 8
ENV_MODEL_DIR = "SKETCHPARTS_MODELS"
ENV_VARIANT_CAP = "SKETCHPARTS_VARIANT_CAP"


def _b64_png(raster: np.ndarray) -> str:
    return base64.b64encode(raster_to_png_bytes(raster)).decode("ascii")


def _svg_path_strings(raster: np.ndarray) -> list[str]:
    svg, paths, _ = vectorize_raster(raster, TraceConfig())
    del svg
    from ..vectorize import _path_d, group_with_holes

    return [_path_d(group) for group in group_with_holes(paths)]


def _stroke_model(stroke: Stroke) -> schemas.StrokeModel:
    return schemas.StrokeModel(
        points=[(float(x), float(y)) for x, y in stroke.points], width_px=stroke.width_px
    )


def _request_sketch(req: schemas.SuggestRequest) -> Sketch:
    initial = Stroke(np.asarray(req.initial_stroke, dtype=np.float64))
    parts = tuple(
        Part(p.label, tuple(Stroke(np.asarray(s, dtype=np.float64)) for s in p.strokes))
        for p in req.parts
    )
    return Sketch(id="request", dataset=req.dataset, initial_stroke=initial, parts=parts)


def _rng(seed: int | None) -> np.random.Generator:
    return np.random.default_rng(seed) if seed is not None else np.random.default_rng()


def create_app(model_dir=None, variant_cap: int | None = None,
               static_dir=None) -> FastAPI:
    """Build the service; config falls back to environment overrides."""
    model_dir = model_dir or os.environ.get(ENV_MODEL_DIR)
    if variant_cap is None:
        variant_cap = int(os.environ.get(ENV_VARIANT_CAP, DEFAULT_VARIANT_CAP))
    registry = ModelRegistry(model_dir) if model_dir else None

    app = FastAPI(title="sketchparts suggestion service")
    app.state.registry = registry
    app.state.variant_cap = variant_cap

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.middleware("http")
    async def request_log(request: Request, call_next):
        started = time.monotonic()
        response = await call_next(request)
        log.info(
            "method=%s path=%s status=%s duration_ms=%.1f",
            request.method, request.url.path, response.status_code,
            (time.monotonic() - started) * 1000.0,
        )
        return response

    def _registry() -> ModelRegistry:
        if registry is None:
            raise HTTPException(status_code=503, detail="no models loaded")
        return registry

    def _require_models(dataset: str):
        reg = _registry()
        if not reg.has_dataset(dataset):
            raise HTTPException(status_code=503, detail=f"models for {dataset!r} not loaded")
        return reg

    @app.get("/healthz", response_model=schemas.HealthResponse)
    def healthz():
        loaded = {d: registry.has_dataset(d) if registry else False for d in ds.DATASETS}
        return schemas.HealthResponse(status="ok", models_loaded=loaded)

    @app.get("/v1/parts/{dataset}", response_model=schemas.PartsResponse)
    def parts(dataset: str):
        if dataset not in ds.DATASETS:
            raise HTTPException(status_code=404, detail=f"unknown dataset {dataset!r}")
        return schemas.PartsResponse(dataset=dataset, labels=list(ds.vocabulary(dataset)))

    @app.post("/v1/strokes/initial", response_model=schemas.InitialStrokeResponse)
    def initial_stroke(req: schemas.InitialStrokeRequest):
        if req.dataset not in ds.DATASETS:
            raise HTTPException(status_code=400, detail=f"unknown dataset {req.dataset!r}")
        stroke = sample_initial_stroke(req.dataset, _rng(req.seed))
        return schemas.InitialStrokeResponse(stroke=_stroke_model(stroke))

    @app.post("/v1/suggest", response_model=schemas.SuggestResponse)
    def suggest(req: schemas.SuggestRequest):
        if req.dataset not in ds.DATASETS:
            raise HTTPException(status_code=400, detail=f"unknown dataset {req.dataset!r}")
        reg = _require_models(req.dataset)
        try:
            sketch = _request_sketch(req)
        except DuplicatePart as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except SketchPartsError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

        rng = _rng(req.seed)
        n = min(req.n_variants, app.state.variant_cap)
        cfg = InferenceConfig(n_variants=n)
        try:
            channels = encode_part_channels(sketch, cfg.size)
            drawn = set(sketch.drawn_labels())
            if ds.EYE not in drawn:
                # Pre-eye partial: the eye always comes first.
                eye_bundle = reg.generator(req.dataset, ds.EYE)
                variants = [
                    generate_eye(sketch.initial_stroke, eye_bundle, cfg, rng) for _ in range(n)
                ]
                label = ds.EYE
                probabilities = {ds.EYE: 1.0}
            else:
                selector = reg.selector(req.dataset)
                logits = selector.predict_logits(channels)
                exp = np.exp(logits - logits.max())
                probs = exp / exp.sum()
                from ..selector import class_labels

                probabilities = {
                    lab: float(p) for lab, p in zip(class_labels(req.dataset), probs)
                }
                label = select_next(
                    logits, drawn, parts_so_far=len(drawn) - 1, dataset=req.dataset
                )
                if label == STOP:
                    return schemas.SuggestResponse(label=STOP, variants=[],
                                                   probabilities=probabilities)
                variants = perturbed_generate(
                    channels, reg.generator(req.dataset, label), n, cfg, rng, label
                )
        except ModelNotLoaded as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        except DuplicatePart as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except SketchPartsError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

        return schemas.SuggestResponse(
            label=label,
            variants=[
                schemas.VariantModel(raster_png_b64=_b64_png(v), paths=_svg_path_strings(v))
                for v in variants
            ],
            probabilities=probabilities,
        )

    @app.post("/v1/complete", response_model=schemas.CompleteResponse)
    def complete(req: schemas.CompleteRequest):
        if req.dataset not in ds.DATASETS:
            raise HTTPException(status_code=400, detail=f"unknown dataset {req.dataset!r}")
        reg = _require_models(req.dataset)
        rng = _rng(req.seed)
        try:
            if req.initial_stroke is not None:
                initial = Stroke(np.asarray(req.initial_stroke, dtype=np.float64))
            else:
                initial = sample_initial_stroke(req.dataset, rng)
            cfg = InferenceConfig()
            trace = complete_sketch(
                initial, reg.generators[req.dataset], reg.selector(req.dataset), cfg, rng
            )
            svg, _, _ = vectorize_raster(trace.raster, TraceConfig())
        except ModelNotLoaded as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        except SketchPartsError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except Exception as exc:  # pragma: no cover - defensive
            trace_id = uuid.uuid4().hex
            log.exception("completion failed trace_id=%s", trace_id)
            raise HTTPException(status_code=500, detail={"trace_id": trace_id}) from exc
        return schemas.CompleteResponse(
            raster_png_b64=_b64_png(trace.raster),
            svg=svg,
            initial_stroke=_stroke_model(initial),
            trace=schemas.TraceModel(
                part_order=trace.part_order,
                part_rasters_png_b64={k: _b64_png(v) for k, v in trace.part_rasters.items()},
            ),
        )

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app

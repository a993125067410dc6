"""Wire schemas for the suggestion service (pydantic models)."""

from __future__ import annotations

from pydantic import BaseModel, Field

Point = tuple[float, float]


class StrokeModel(BaseModel):
    points: list[Point] = Field(min_length=2)
    width_px: float = 2.0


class PartModel(BaseModel):
    label: str
    strokes: list[list[Point]] = Field(min_length=1)


class InitialStrokeRequest(BaseModel):
    dataset: str
    seed: int | None = None


class InitialStrokeResponse(BaseModel):
    stroke: StrokeModel


class SuggestRequest(BaseModel):
    dataset: str
    initial_stroke: list[Point] = Field(min_length=2)
    parts: list[PartModel] = Field(default_factory=list)
    n_variants: int = Field(default=1, ge=1)
    seed: int | None = None


class VariantModel(BaseModel):
    raster_png_b64: str
    paths: list[str]


class SuggestResponse(BaseModel):
    label: str
    variants: list[VariantModel]
    probabilities: dict[str, float]


class CompleteRequest(BaseModel):
    dataset: str
    initial_stroke: list[Point] | None = None
    seed: int | None = None


class TraceModel(BaseModel):
    part_order: list[str]
    part_rasters_png_b64: dict[str, str]


class CompleteResponse(BaseModel):
    raster_png_b64: str
    svg: str
    initial_stroke: StrokeModel
    trace: TraceModel


class PartsResponse(BaseModel):
    dataset: str
    labels: list[str]


class HealthResponse(BaseModel):
    status: str
    models_loaded: dict[str, bool]

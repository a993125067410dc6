"""Exception hierarchy shared across the package."""


class SketchPartsError(Exception):
    """Base class for all package errors."""


class InvalidStroke(SketchPartsError):
    """Stroke violates its structural invariants (too few points, bad width)."""


class DuplicatePart(SketchPartsError):
    """A non-details part label would appear twice in one sketch."""


class ShapeError(SketchPartsError):
    """Array arguments have incompatible shapes or channel counts."""


class ParseError(SketchPartsError):
    """Corpus record is not parseable JSON."""


class ValidationError(SketchPartsError):
    """Corpus record parsed but violates a data-model invariant."""

    def __init__(self, message: str, record_id: str | None = None):
        super().__init__(message)
        self.record_id = record_id


class SamplingExhausted(SketchPartsError):
    """Rejection sampling hit its attempt bound without a valid draw."""


class NumericError(SketchPartsError):
    """NaN/Inf or a numerically invalid intermediate result."""


class EmptyPartCorpus(SketchPartsError):
    """No sketch in the corpus contains the requested part."""


class EmptyCorpus(SketchPartsError):
    """Corpus has too few sketches for the requested operation."""


class ModelNotLoaded(SketchPartsError):
    """An operation needs a trained bundle that is not available."""


class NoSelectablePart(SketchPartsError):
    """Every selector class is masked out; nothing can be drawn."""


class InsufficientSamples(SketchPartsError):
    """Metric needs more samples than were provided."""


class EmptyGeometry(SketchPartsError):
    """Point set or raster region required to be nonempty is empty."""


class NoMatch(SketchPartsError):
    """Retrieval found no corpus sketch compatible with the query."""

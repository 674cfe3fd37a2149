"""Exception hierarchy shared by all glyphforge modules."""


class GlyphforgeError(Exception):
    """Base class for all errors raised by this package."""


# --- trajectory file / format errors ---

class MalformedLine(GlyphforgeError):
    """A trajectory line has the wrong field count or a non-numeric field."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class InvalidControl(GlyphforgeError):
    """Control label is not one-hot."""


class OutOfRange(GlyphforgeError):
    """Coordinate outside the [-1, 1] domain."""


class BadTermination(GlyphforgeError):
    """Missing or misplaced end-of-writing point."""


class LengthMismatch(GlyphforgeError):
    """Two index-aligned sequences have inconsistent lengths."""


class StrokeBoundaryMismatch(GlyphforgeError):
    """Stroke-end positions differ between a trajectory and its reference."""


# --- numeric / shape errors ---

class DimensionMismatch(GlyphforgeError):
    """Array operands have incompatible dimensions."""


class ShapeMismatch(GlyphforgeError):
    """Feature matrices are inconsistent with the supplied weights."""


class NonFinite(GlyphforgeError):
    """An input or intermediate value is NaN or infinite where finiteness is required."""


class ZeroDensity(GlyphforgeError):
    """Mixture density underflowed below the log floor at some step."""

    def __init__(self, step: int, density: float):
        self.step = step
        self.density = density
        super().__init__(f"density {density!r} below floor at step {step}")


class BatchMismatch(GlyphforgeError):
    """Positive-pair batches are not index-aligned."""


class LabelOutOfRange(GlyphforgeError):
    """Class label exceeds the classifier output dimension."""


class ZeroVector(GlyphforgeError):
    """Vector has (near-)zero norm where a direction is required."""


class EmptySequence(GlyphforgeError):
    """Sequence operation received an empty input."""

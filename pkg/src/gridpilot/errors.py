"""Exception hierarchy shared across the package."""


class GridPilotError(Exception):
    """Base class for all package errors."""


class ConfigError(GridPilotError):
    """Invalid configuration (bad grid interval, angle step, ...)."""


class ColorspaceError(GridPilotError):
    """Operation applied to an image in the wrong colorspace."""


class ShapeError(GridPilotError):
    """Mismatched or empty array dimensions."""


class DecodeError(GridPilotError):
    """Malformed image stream.

    ``offset`` is the byte position where parsing failed, when known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class UnsupportedFormatError(GridPilotError):
    """Recognized container but unsupported pixel format or bit depth."""


class DomainError(GridPilotError):
    """Argument outside the mathematical domain of an operation."""


class DegenerateLatticeError(DomainError):
    """Detected grid directions too close to parallel to invert."""


class DetectionFailureError(GridPilotError):
    """Pilot signal could not be found or analyzed in the image."""

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage

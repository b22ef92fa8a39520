"""Exception types shared across the package."""


class ShaptourError(Exception):
    """Base class for all package-specific errors."""


class DataValidationError(ShaptourError):
    """Input data violates the ingestion contract (missing cell, bad type, ...)."""


class DegenerateBasisError(ShaptourError):
    """A projection basis cannot be built or manipulated (zero vector, lone axis)."""


class ArityMismatchError(ShaptourError):
    """A vector or matrix has the wrong number of features."""


class BundleError(ShaptourError):
    """Base class for bundle serialization problems."""


class BundleParseError(BundleError):
    """The file is not parseable as a bundle document."""


class BundleVersionError(BundleError):
    """The bundle declares a format version this code does not understand."""


class BundleInvariantError(BundleError):
    """The bundle parsed but its payload violates a structural invariant."""


class PipelineStageError(ShaptourError):
    """A precompute stage failed; carries the stage name for diagnostics."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause

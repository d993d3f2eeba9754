"""Exception types shared across the toolkit."""


class MatteKitError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(MatteKitError):
    """Inputs that must share dimensions do not, or a dimension is invalid."""


class ImageFormatError(MatteKitError):
    """Unsupported image file format (16-bit, paletted, or wrong mode)."""


class InvalidSeedError(MatteKitError):
    """A seed point does not lie on a semi-transparent pixel."""


class EmptyForegroundError(MatteKitError):
    """Refinement was asked to extract a subject from an all-zero matte."""


class EmptyMaskError(MatteKitError):
    """A metric was evaluated over a mask that selects no pixels."""


class ConnUndefinedError(MatteKitError):
    """Connectivity loss has no source region: no pixel is fully opaque
    in both mattes."""


class PromptTemplateError(MatteKitError):
    """A prompt template names a slot with no matching attribute list."""


class ManifestError(MatteKitError):
    """Manifest-level failure (missing sample, bad version, unreadable file)."""


class ManifestLockError(ManifestError):
    """Another writer holds the manifest lock file."""


class StateTransitionError(ManifestError):
    """A sample record was asked to make an illegal status transition."""


class ConfigError(MatteKitError):
    """Configuration file could not be parsed or contains bad values."""

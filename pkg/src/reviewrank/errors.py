"""Exception hierarchy shared across the package."""


class ReviewRankError(Exception):
    """Base class for all domain errors raised by this package."""


class StructureError(ReviewRankError):
    """Invalid network structure: cycles, undeclared endpoints, bad domains."""


class DatasetError(ReviewRankError):
    """Rejected training input: unknown states, missing variables, empty factor lists."""


class EvidenceError(ReviewRankError):
    """Evidence or assignment names an unknown variable or state."""


class DegenerateEvidenceError(ReviewRankError):
    """The evidence has zero probability under the model; no posterior exists."""


class ModelFormatError(ReviewRankError):
    """A model document is malformed, has an unknown version, or violates invariants."""


class ClockSkewError(ReviewRankError):
    """A change appears to be created in the future relative to the reference time."""


class ProtocolError(ReviewRankError):
    """The review server answered with a payload we cannot interpret."""


class TransientServerError(ReviewRankError):
    """The review server is unreachable or failing; retrying later may succeed."""


class ConfigError(ReviewRankError):
    """Bad configuration, including rejected credentials."""


class StorageError(ReviewRankError):
    """The dataset store cannot be read or written."""


class EmptyDatasetError(ReviewRankError):
    """Training was requested but the store holds no usable rows."""


class NoModelError(ReviewRankError):
    """A request needs a trained model and none is available."""

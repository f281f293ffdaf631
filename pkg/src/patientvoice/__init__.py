"""Dataset vocabulary similarity, annotator agreement and patient-voice
classification toolkit."""

from patientvoice.corpus import (
    DatasetKey,
    Label,
    LabeledPost,
    Post,
    SplitBundle,
    validate_bundle,
)

__version__ = "0.1.0"

__all__ = [
    "DatasetKey",
    "Label",
    "LabeledPost",
    "Post",
    "SplitBundle",
    "validate_bundle",
    "__version__",
]

"""Exception hierarchy.

Every error carries a short machine-greppable ``code`` used by the CLI.
"""


class PipelearnError(Exception):
    code = "E_GENERIC"


class ImageIOError(PipelearnError, OSError):
    code = "E_IMAGE_IO"


class OperatorError(PipelearnError, ValueError):
    code = "E_OPERATOR"


class KindMismatchError(OperatorError):
    code = "E_KIND"


class MetricError(PipelearnError, ValueError):
    code = "E_METRIC"


class PipelineError(PipelearnError, ValueError):
    code = "E_PIPELINE"


class DatasetError(PipelearnError, ValueError):
    code = "E_DATASET"


class ConfigError(PipelearnError, ValueError):
    code = "E_CONFIG"


class ModelFormatError(PipelearnError, ValueError):
    code = "E_MODEL"

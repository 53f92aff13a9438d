"""Exception hierarchy shared across hetfuse."""


class HetfuseError(Exception):
    """Base class for all hetfuse errors."""


class ConfigError(HetfuseError):
    """Invalid run configuration. The message names the offending key."""


class DataError(HetfuseError, ValueError):
    """A dataset or split violates an operation's contract."""


class MethodUnavailableError(DataError):
    """An estimator cannot run on the given split (e.g. an empty OS arm)."""


class ModelError(HetfuseError, ValueError):
    """A fit or predict call violates the model contract."""


class ReportError(HetfuseError):
    """An output file could not be written."""

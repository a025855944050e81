"""Exception hierarchy shared by the library, the service and the CLI.

Every error maps onto one of three failure classes so the CLI can translate
it into an exit code and the service into an error payload:

* validation  (exit 1): bad input data or parameters
* resource    (exit 2): a size cap or enumeration budget was exceeded
* io          (exit 3): filesystem problems, including corrupt shard data
"""

from __future__ import annotations


class HittimesError(Exception):
    """Base class for all errors raised by this package."""

    failure_class = "validation"


class ValidationError(HittimesError, ValueError):
    """Invalid input: bad parameters, malformed graphs, infeasible specs."""

    failure_class = "validation"


class EdgeListParseError(ValidationError):
    """A malformed line in an edge-list file; carries the line number."""

    def __init__(self, path, line_number: int, message: str):
        super().__init__(f"{path}:{line_number}: {message}")
        self.path = path
        self.line_number = line_number


class UnsupportedBackendError(ValidationError):
    """Operation not available for the given matrix storage backend."""


class ResourceLimitError(HittimesError, RuntimeError):
    """A dense-oracle cap or path-enumeration budget would be exceeded."""

    failure_class = "resource"


class NumericalError(HittimesError, RuntimeError):
    """Floating-point results inconsistent beyond documented tolerances."""

    failure_class = "resource"


class GraphIOError(HittimesError, OSError):
    """Filesystem-level failure while reading or writing artifacts."""

    failure_class = "io"


class ShardCorruptionError(GraphIOError):
    """Shard bytes do not match the manifest (checksum or size mismatch)."""


def failure_class_of(exc: BaseException) -> str:
    """Failure class for an arbitrary exception, defaulting sensibly."""
    if isinstance(exc, HittimesError):
        return exc.failure_class
    if isinstance(exc, OSError):
        return "io"
    if isinstance(exc, (ValueError, TypeError)):
        return "validation"
    return "resource"


EXIT_CODES = {"validation": 1, "resource": 2, "io": 3}


def exit_code_of(exc: BaseException) -> int:
    return EXIT_CODES[failure_class_of(exc)]

"""Exception types shared across the package."""


class KernelError(Exception):
    """Base class for all package errors."""


class InputError(KernelError, ValueError):
    """Malformed graph, labeling, or argument."""


class ResourceError(KernelError):
    """A configured size or step budget was exceeded."""

    def __init__(self, message: str, partial: bool = False):
        super().__init__(message)
        self.partial = partial


class ConfigError(KernelError, ValueError):
    """An encoder or pipeline was configured with unsupported parameters."""


class FormatError(KernelError):
    """A persisted file is corrupt, truncated, or of the wrong version."""


class UsageError(KernelError):
    """Incompatible options or a mismatched artifact was requested."""


class WidthBoundError(KernelError):
    """No decomposition within the requested width exists.

    ``certificate`` holds the exact minimum width that was found, which
    exceeds ``bound``.
    """

    def __init__(self, bound: int, certificate: int):
        super().__init__(f"width bound {bound} unattainable: minimum is {certificate}")
        self.bound = bound
        self.certificate = certificate


class RepositoryTooSmall(KernelError):
    """The repository has no usable representative for a subgraph.

    ``subgraph`` is the offending boundaried graph so that the size bound
    can be raised and the repository rebuilt.
    """

    def __init__(self, message: str, subgraph=None):
        super().__init__(message)
        self.subgraph = subgraph

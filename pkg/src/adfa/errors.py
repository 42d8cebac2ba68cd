"""Exception hierarchy shared by every adfa module."""


class AdfaError(Exception):
    pass


class InvalidArgument(AdfaError, ValueError):
    """A parameter violates a documented precondition.

    ``param`` names the offending argument so the CLI can point at the flag.
    """

    def __init__(self, message, param=None):
        super().__init__(message)
        self.param = param


class UnsupportedFormat(AdfaError):
    def __init__(self, message, format_code=None):
        super().__init__(message)
        self.format_code = format_code


class CorruptFile(AdfaError):
    pass


class NotAdfaFile(AdfaError):
    pass


class UnsupportedVersion(AdfaError):
    pass


class WriteError(AdfaError, OSError):
    pass


class VerificationError(AdfaError):
    """Two evaluation paths that must agree did not."""

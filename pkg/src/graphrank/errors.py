"""Exception types shared by the library and the CLI exit-code mapping."""


class InputError(ValueError):
    """Malformed or out-of-range user input."""


class ResourceError(RuntimeError):
    """Request exceeds a documented size ceiling."""


class VerificationError(AssertionError):
    """An exact verification did not match."""

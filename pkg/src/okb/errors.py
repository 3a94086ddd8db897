"""Shared exception base so callers can catch user-level errors in one place."""


class OkbError(Exception):
    """A user-facing error: bad input, bad request, bad state. Not a bug."""

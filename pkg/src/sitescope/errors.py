"""Error types shared across the package.

Both exception classes subclass ValueError so callers that only know
standard exceptions still behave sensibly. The CLI maps ValidationError
to exit code 1 and FormatError (plus I/O errors) to exit code 2.
"""


class SiteScopeError(ValueError):
    """Base class for all errors raised by this package."""


class FormatError(SiteScopeError):
    """A document is syntactically malformed (bad JSON, bad header, bad record)."""


class ValidationError(SiteScopeError):
    """A document parsed but violates a domain invariant.

    ``diagnostics`` carries one message per violation so callers such as
    ``sitescope validate`` can report every problem, not just the first.
    """

    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))

class ExtractorError(ValueError):
    """Base error for this package."""


class ManifestError(ExtractorError):
    """The job manifest is structurally unusable (not valid JSON, wrong shape)."""


class JobValidationError(ExtractorError):
    """The manifest parsed but its content is wrong; carries every problem found."""

    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))

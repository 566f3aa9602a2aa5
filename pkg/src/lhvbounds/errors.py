"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a data-model invariant.

    ``path`` names the offending field using the 1-based file notation,
    e.g. ``"outcomes.1.2"`` or ``"functionals[0].terms[3]"``.
    """

    def __init__(self, message, path=None):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class CapExceeded(RuntimeError):
    """Enumeration or matrix size exceeds the configured cap."""

    def __init__(self, what, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(
            f"{what}: estimated {count} exceeds cap {cap} (override with --cap)")


class SignalingError(ValueError):
    """Behavior is signaling, so LHV membership is not attempted."""

    def __init__(self, report):
        self.report = report
        super().__init__(
            f"behavior violates no-signaling (max deviation "
            f"{report.max_deviation:.3g})")

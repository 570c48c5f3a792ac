"""Exception types shared across the toolkit."""


class ConfigError(ValueError):
    """Invalid configuration or parameter value (CLI exit code 2)."""


class InfeasibleDesignError(RuntimeError):
    """A requested design cannot be met by any parameter choice (CLI exit code 3)."""


class VerificationError(RuntimeError):
    """A cross-check between independent computations exceeded tolerance (CLI exit code 4)."""


class ResolutionError(RuntimeError):
    """Numerical resolution self-check failed; results would be untrustworthy."""

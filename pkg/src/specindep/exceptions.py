"""Exception types raised by specindep."""


class InvalidInputError(ValueError):
    """Input data are empty, ragged, non-finite or too short."""


class DegenerateInputError(InvalidInputError):
    """A series carries no variation at the non-zero Fourier frequencies."""


class ConfigurationError(ValueError):
    """Incompatible settings, e.g. a bandwidth not smaller than the sample size."""


class SingularModelError(ValueError):
    """A spectral model is undefined at a requested frequency."""


class InvalidSpecError(ValueError):
    """Innovation specification cannot be realised (cross-correlations too large)."""

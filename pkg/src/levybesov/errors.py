"""Exception hierarchy shared by all modules."""


class LevyBesovError(Exception):
    """Base class for every error raised by the package."""


class InvalidParameter(LevyBesovError, ValueError):
    pass


class NonConvergentQuadrature(LevyBesovError, ArithmeticError):
    pass


# same failure mode, named as the moment routine reports it
QuadratureFailure = NonConvergentQuadrature


class NoClosedForm(LevyBesovError):
    pass


class DegenerateExponent(LevyBesovError, ArithmeticError):
    pass


class NonFiniteTailMass(LevyBesovError, ArithmeticError):
    pass


class MomentInfinite(LevyBesovError, ValueError):
    pass


class InfiniteMomentRequested(MomentInfinite):
    pass


class UnsupportedOrder(LevyBesovError, ValueError):
    pass


class NonConvergence(LevyBesovError, ArithmeticError):
    pass


class ShapeMismatch(LevyBesovError, ValueError):
    pass


class UnsampleableFamily(LevyBesovError, ValueError):
    pass


class BackendFamilyMismatch(LevyBesovError, ValueError):
    pass


class WindowTooSmall(LevyBesovError, ValueError):
    pass


class TooFewSamples(LevyBesovError, ValueError):
    pass


class ConfigError(LevyBesovError, ValueError):
    """Raised for unreadable or inconsistent experiment configurations."""

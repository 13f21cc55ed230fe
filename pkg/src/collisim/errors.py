"""Exception types shared across the package."""


class CollisimError(Exception):
    """Base class for package-specific failures."""


class InvalidDensityMatrixError(CollisimError):
    """A matrix violated the density-matrix tolerances (Hermiticity / trace / PSD)."""


class DegenerateSteadyStateError(CollisimError):
    """Liouvillian null space is not one-dimensional within tolerance."""


class DomainOfValidityError(CollisimError):
    """A perturbative closed form was evaluated outside its regime."""


class PureStateError(CollisimError):
    """Determinant-based QFI formula needs a mixed state."""


class SingularPointError(CollisimError):
    """Analytic QFI expression evaluated at a singular parameter point."""


class DivergenceError(CollisimError):
    """Gradient descent diverged (cost grew well above its initial value)."""


class ConfigError(CollisimError):
    """Invalid experiment configuration."""

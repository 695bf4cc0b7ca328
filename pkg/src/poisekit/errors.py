"""Exception types shared across the package."""


class PoisekitError(Exception):
    """Base class for poisekit-specific failures."""


class InfeasibleGuessError(PoisekitError):
    """A (degree, height) budget guess cannot cover the required terminals.

    Raised by pruning (too few terminals inside the radius), by the coverage
    loop when an iteration makes no progress toward its target, and by the
    solvers when a sub-procedure certifies the guess hopeless.
    """


class InfeasibleInstanceError(PoisekitError):
    """No tree rooted at the root covers k terminals at all, any budget."""


class GenerationError(PoisekitError):
    """A random-instance model could not satisfy the requested parameters."""

"""Exception and warning types shared across the package."""


class VulnPropError(Exception):
    """Base class for every error this package raises deliberately."""


class OutOfRangeError(VulnPropError, ValueError):
    """A probability, factor, or parameter lies outside its valid range."""


class SelfLoopError(VulnPropError, ValueError):
    """An edge connects a node to itself."""


class DuplicateEdgeError(VulnPropError, ValueError):
    """The same directed edge appears more than once."""


class DanglingIndexError(VulnPropError, IndexError):
    """An edge endpoint references a node index that does not exist."""


class NotTwoNodeError(VulnPropError, ValueError):
    """An operation restricted to two-node networks got something else."""


class DegenerateDenominatorError(VulnPropError, ArithmeticError):
    """The closed-form denominator is too close to zero to evaluate."""

    def __init__(self, denominator: float):
        self.denominator = denominator
        super().__init__(
            f"closed-form denominator {denominator!r} is within 1e-12 of zero"
        )


class NoConvergenceError(VulnPropError, RuntimeError):
    """An iterative solver hit its iteration cap before meeting tolerance."""

    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"no convergence after {iterations} iterations "
            f"(sup-norm residual {residual:.3e})"
        )


class TooManyNodesError(VulnPropError, ValueError):
    """The exhaustive oracle only handles very small networks."""


class TooFewRowsError(VulnPropError, ValueError):
    """A trend check needs at least three usable sweep rows."""


class ParseError(VulnPropError, ValueError):
    """A network file or CSV document is malformed."""


class SchemaVersionError(ParseError):
    """A network file declares a schema version this build does not speak."""


class SingularJacobianWarning(RuntimeWarning):
    """Newton hit a singular or useless Jacobian and fell back to damped
    fixed-point iteration."""

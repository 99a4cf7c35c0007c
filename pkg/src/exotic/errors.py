"""Exception types shared across the package."""


class ExoticError(ValueError):
    """Base class for all errors raised by this package."""


class BudgetTooSmallError(ExoticError):
    """Iteration budget too small to derive a tree depth of at least 1."""

    def __init__(self, n: int, arity: int, minimal_n: int):
        self.n = n
        self.arity = arity
        self.minimal_n = minimal_n
        super().__init__(
            f"budget n={n} with arity K={arity} yields maximum depth 0; "
            f"smallest admissible budget is n={minimal_n}"
        )


class GridTooLargeError(ExoticError):
    """Requested brute-force grid exceeds the evaluation cap."""


class DegenerateCellError(ExoticError):
    """Cell cannot be split because its longest edge has zero width."""


class UnsupportedProblemError(ExoticError):
    """Problem lacks a component the requested method needs (e.g. grad_y)."""


class OutOfBranchError(ExoticError):
    """Argument outside the principal branch of the Lambert W function."""

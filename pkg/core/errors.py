"""
Error hierarchy. InputError subclasses are bad user data (CLI exit 1);
ConvergenceError is a numerical kernel running out of budget (CLI exit 2).
"""


class VNEError(Exception):
    """Base class for every error raised by this package."""


class InputError(VNEError, ValueError):
    """Invalid input data or parameters."""


class ConvergenceError(VNEError, ArithmeticError):
    """An iterative kernel exhausted its iteration budget."""

    def __init__(self, kernel, budget, detail=''):
        self.kernel = kernel
        self.budget = budget
        msg = f"{kernel} did not converge within {budget} iterations"
        if detail:
            msg = f"{msg} ({detail})"
        super().__init__(msg)


# graph
class SelfLoopError(InputError):
    def __init__(self, u):
        self.node = u
        super().__init__(f"Self-loop on node {u}")


class DuplicateEdgeError(InputError):
    def __init__(self, u, v):
        self.edge = (u, v)
        super().__init__(f"Duplicate edge ({u}, {v})")


class NodeOutOfRangeError(InputError):
    pass


class EmptySubsetError(InputError):
    pass


# spectral / entropy
class NonSymmetricError(InputError):
    pass


class EdgelessGraphError(InputError):
    pass


class SizeMismatchError(InputError):
    pass


# synth
class BadSpecError(InputError):
    pass


class OverfullError(InputError):
    pass


class SaturatedError(InputError):
    pass


# evalkit
class DegenerateInputError(InputError):
    pass


class LengthMismatchError(InputError):
    pass


class SingleClusterError(InputError):
    pass


class DegenerateClassError(InputError):
    pass


# readout
class RowMismatchError(InputError):
    pass


class ShapeMismatchError(InputError):
    pass


class TooFewGraphsError(InputError):
    pass


# loaders
class ParseError(InputError):
    def __init__(self, line_no, reason):
        self.line_no = line_no
        super().__init__(f"Line {line_no}: {reason}")


class EmptyInputError(InputError):
    pass


class MissingFileError(InputError):
    pass


class InconsistentIndicatorError(InputError):
    pass

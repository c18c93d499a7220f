class CayleyCIError(Exception):
    """Base class for errors raised by this package."""


class SpecMismatchError(CayleyCIError):
    """Operands live in different groups."""


class CapacityError(CayleyCIError):
    """A group or search space is larger than we are willing to enumerate."""


class DegenerateFamilyError(CayleyCIError):
    """An affine family's parameterization is not injective."""


class PresetError(CayleyCIError):
    """A preset file is malformed or fails validation."""


class ExpressionError(CayleyCIError):
    """A vertex expression such as ``v2+v3-v4`` could not be parsed."""


class CheckpointError(CayleyCIError):
    """A checkpoint file does not match the search being resumed."""


class TableDeviationError(CayleyCIError):
    """Computed mutual-neighbour counts disagree with the expected table."""

    def __init__(self, deviations):
        self.deviations = deviations
        lines = ", ".join(f"{v}: expected {e}, got {g}" for v, e, g in deviations)
        super().__init__(f"mutual-neighbour table deviates: {lines}")

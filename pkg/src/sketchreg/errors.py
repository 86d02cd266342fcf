"""Exception hierarchy shared by all sketchreg modules."""


class SketchRegError(Exception):
    """Base class for every error raised by this package."""


class InvalidMatrix(SketchRegError, ValueError):
    pass


class NumericalFailure(SketchRegError, ArithmeticError):
    pass


class NotPSD(SketchRegError, ValueError):
    pass


class ShapeMismatch(SketchRegError, ValueError):
    pass


class DomainError(SketchRegError, ValueError):
    pass


class InvalidRegularization(SketchRegError, ValueError):
    pass


class InvalidGrid(SketchRegError, ValueError):
    pass


class InvalidLength(SketchRegError, ValueError):
    pass


class InvalidInput(SketchRegError, ValueError):
    pass


class InvalidDimension(SketchRegError, ValueError):
    pass


class DegenerateScores(SketchRegError, ValueError):
    pass


class UnsupportedKernel(SketchRegError, ValueError):
    pass


class InvalidModel(SketchRegError, ValueError):
    pass


class InvalidNormSpec(SketchRegError, ValueError):
    pass


class UnsupportedSize(SketchRegError, ValueError):
    pass


class InvalidProjection(SketchRegError, ValueError):
    pass


class InvalidPoints(SketchRegError, ValueError):
    pass


class ConfigError(SketchRegError, ValueError):
    """Configuration rejected; ``path`` names the offending field."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ParseError(SketchRegError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class InvalidValue(SketchRegError, ValueError):
    pass


class IoError(SketchRegError, OSError):
    pass

"""Exception hierarchy shared by every module of the package."""


class CechDolbeaultError(Exception):
    """Base class for all errors raised by this package."""


class ScalarParseError(CechDolbeaultError, ValueError):
    pass


class ShapeError(CechDolbeaultError, ValueError):
    pass


class InvalidQuotientError(CechDolbeaultError):
    """Requested quotient where the numerator is not contained in the total."""


class InvalidComplexError(CechDolbeaultError):
    def __init__(self, name, issues):
        self.name = name
        self.issues = list(issues)
        super().__init__(f"complex {name!r} is not valid: " + "; ".join(map(str, self.issues)))


class NotAChainMapError(CechDolbeaultError):
    def __init__(self, name, issues):
        self.name = name
        self.issues = list(issues)
        super().__init__(f"{name} is not a chain map: " + "; ".join(map(str, self.issues)))


class DiagramError(CechDolbeaultError):
    pass


class UnsupportedRelativeError(CechDolbeaultError):
    pass


class ZigzagError(CechDolbeaultError):
    """The connecting homomorphism zigzag could not be completed."""


class StokesError(CechDolbeaultError):
    pass


class PairingSquareError(CechDolbeaultError):
    pass


class DegreeError(CechDolbeaultError):
    pass


class HypothesisError(CechDolbeaultError):
    """A hypothesis of an injectivity or decomposition check failed."""

    def __init__(self, hypothesis, detail):
        self.hypothesis = hypothesis
        self.detail = detail
        super().__init__(f"{hypothesis}: {detail}")


class InfeasibleParamsError(CechDolbeaultError, ValueError):
    pass


class FormatError(CechDolbeaultError):
    def __init__(self, path, location, message):
        self.path = str(path)
        self.location = location
        self.message = message
        super().__init__(f"{self.path}: {location}: {message}")

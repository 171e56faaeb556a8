"""Exception types shared across the library."""


class DaffineError(Exception):
    """Base class for all errors raised by this package."""


class DimMismatch(DaffineError):
    """Operands have incompatible dimensions."""


class SingularMatrix(DaffineError):
    """A matrix that must be invertible is singular."""


class MissingSubstitute(DaffineError):
    """A polynomial substitution omits a variable that occurs."""


class SpaceMismatch(DaffineError):
    """Points belong to different spaces."""


class ZeroFunctional(DaffineError):
    """A level-set functional is identically zero."""


class NotSpecial(DaffineError):
    """A distinguished vector/section is required but absent or invalid."""


class FiberMismatch(DaffineError):
    """Points do not lie in a common fiber of the relevant projection."""


class BaseMismatch(DaffineError):
    """Charts or transitions do not share the expected base data."""


class MalformedConstraint(DaffineError):
    """A level-set constraint row has the wrong shape."""


class ConstraintViolated(DaffineError):
    """A point fails a defining constraint of the target set."""


class ZeroForm(DaffineError):
    """A reference one-form that must be nonzero is zero."""


class NotInvertible(DaffineError):
    """Transition blocks admit no polynomial formal inverse."""


class UnknownSuite(DaffineError):
    """The verification suite name is not recognised."""


class UnknownOp(DaffineError):
    """The build operation name is not recognised."""


class ParseError(DaffineError):
    """Source text failed to parse; carries location and expectations."""

    def __init__(self, line: int, col: int, expected, found: str = ""):
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        self.found = found
        want = " or ".join(self.expected)
        tail = f", found {found}" if found else ""
        super().__init__(f"line {line}, col {col}: expected {want}{tail}")


class DuplicateName(DaffineError):
    """Two document blocks share a name."""


class UnresolvedReference(DaffineError):
    """A document field refers to a name that is not defined."""

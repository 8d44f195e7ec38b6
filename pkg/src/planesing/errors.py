"""Exception hierarchy shared by all planesing modules."""


class PlanesingError(Exception):
    """Base class for all library errors."""

    code = "error"


class NotPrime(PlanesingError):
    code = "not_prime"


class ExtensionOfCharZero(PlanesingError):
    code = "extension_of_char_zero"


class DivisionByZero(PlanesingError):
    code = "division_by_zero"


class FieldMismatch(PlanesingError):
    code = "field_mismatch"


class IncompatibleFields(PlanesingError):
    code = "incompatible_fields"


class InsufficientPrecision(PlanesingError):
    code = "insufficient_precision"


class NotAUnit(PlanesingError):
    code = "not_a_unit"


class PrecisionUnderflow(PlanesingError):
    code = "precision_underflow"


class NotCoprime(PlanesingError):
    code = "not_coprime"


class NonPolynomialInput(PlanesingError):
    code = "non_polynomial_input"


class DegenerateParametrization(PlanesingError):
    code = "degenerate_parametrization"


class NotZeroDimensionalWithinBound(PlanesingError):
    code = "not_zero_dimensional_within_bound"


class UnstableTruncation(PlanesingError):
    code = "unstable_truncation"


class WrongDirection(PlanesingError):
    code = "wrong_direction"


class NotReduced(PlanesingError):
    code = "not_reduced"


class FieldExtensionLimit(PlanesingError):
    code = "field_extension_limit"


class TruncationTooCoarse(PlanesingError):
    code = "truncation_too_coarse"


class NonSolvableAuxiliary(PlanesingError):
    code = "non_solvable_auxiliary"


class ParseError(PlanesingError):
    code = "parse_error"

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class UnsupportedCharacteristic(PlanesingError):
    code = "unsupported_characteristic"

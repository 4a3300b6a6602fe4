"""
Custom exceptions for kdvfactor
"""


class KdvFactorError(Exception):
    """Base exception class for kdvfactor"""

    def __init__(self, message: str, error_code: str = None, original_error: Exception = None):
        """
        Initialize kdvfactor exception

        Args:
            message: Error message
            error_code: Optional error code for categorization
            original_error: Original exception that caused this error
        """
        super().__init__(message)
        self.message = message
        self.error_code = error_code
        self.original_error = original_error

    def __str__(self):
        error_str = self.message
        if self.error_code:
            error_str = f"[{self.error_code}] {error_str}"
        if self.original_error:
            error_str = f"{error_str} (caused by: {self.original_error})"
        return error_str


# Exact arithmetic

class AlgebraError(KdvFactorError):
    """Exception raised by the exact arithmetic substrate"""


class ZeroDenominatorError(AlgebraError):
    def __init__(self, message: str = "denominator is zero", **kwargs):
        kwargs.setdefault("error_code", "ZERO_DENOMINATOR")
        super().__init__(message, **kwargs)


class NonSquareError(AlgebraError):
    def __init__(self, message: str, shape: tuple = None, **kwargs):
        kwargs.setdefault("error_code", "NON_SQUARE")
        super().__init__(message, **kwargs)
        self.shape = shape


class ZeroPolynomialError(AlgebraError):
    def __init__(self, message: str = "polynomial is zero", **kwargs):
        kwargs.setdefault("error_code", "ZERO_POLYNOMIAL")
        super().__init__(message, **kwargs)


class DivisionByZeroError(AlgebraError):
    def __init__(self, message: str = "division by zero", **kwargs):
        kwargs.setdefault("error_code", "DIVISION_BY_ZERO")
        super().__init__(message, **kwargs)


# Differential algebra

class DifferentialAlgebraError(KdvFactorError):
    """Exception raised for differential fields and differential polynomials"""


class NotTotalDerivativeError(DifferentialAlgebraError):
    def __init__(self, message: str, remainder: str = None, **kwargs):
        kwargs.setdefault("error_code", "NOT_TOTAL_DERIVATIVE")
        super().__init__(message, **kwargs)
        self.remainder = remainder


class BasisMismatchError(DifferentialAlgebraError):
    def __init__(self, message: str, **kwargs):
        kwargs.setdefault("error_code", "BASIS_MISMATCH")
        super().__init__(message, **kwargs)


class JetOrderExceededError(DifferentialAlgebraError):
    def __init__(self, message: str, order: int = None, **kwargs):
        kwargs.setdefault("error_code", "JET_ORDER_EXCEEDED")
        super().__init__(message, **kwargs)
        self.order = order


class ConstantsMismatchError(DifferentialAlgebraError):
    def __init__(self, message: str, symbol: str = None, **kwargs):
        kwargs.setdefault("error_code", "CONSTANTS_MISMATCH")
        super().__init__(message, **kwargs)
        self.symbol = symbol


# Operators

class OperatorError(KdvFactorError):
    """Exception raised by the differential operator ring"""


class ModeMismatchError(OperatorError):
    def __init__(self, message: str = "operators live over different coefficient domains", **kwargs):
        kwargs.setdefault("error_code", "MODE_MISMATCH")
        super().__init__(message, **kwargs)


class DivisionByZeroOperatorError(OperatorError):
    def __init__(self, message: str = "division by the zero operator", **kwargs):
        kwargs.setdefault("error_code", "DIVISION_BY_ZERO_OPERATOR")
        super().__init__(message, **kwargs)


class IndexOutOfRangeError(OperatorError):
    def __init__(self, message: str, index: int = None, **kwargs):
        kwargs.setdefault("error_code", "INDEX_OUT_OF_RANGE")
        super().__init__(message, **kwargs)
        self.index = index


class OrderTooLowError(OperatorError):
    def __init__(self, message: str, **kwargs):
        kwargs.setdefault("error_code", "ORDER_TOO_LOW")
        super().__init__(message, **kwargs)


# Spectral data

class SpectralError(KdvFactorError):
    """Exception raised while computing levels, curves and factors"""

    def __init__(self, message: str, stage: str = None, **kwargs):
        super().__init__(message, **kwargs)
        self.stage = stage


class DegeneratePotentialError(SpectralError):
    def __init__(self, message: str = "constant potentials are not accepted", **kwargs):
        kwargs.setdefault("error_code", "DEGENERATE_POTENTIAL")
        super().__init__(message, **kwargs)


class LevelNotFoundError(SpectralError):
    def __init__(self, message: str, s_max: int = None, **kwargs):
        kwargs.setdefault("error_code", "LEVEL_NOT_FOUND")
        super().__init__(message, **kwargs)
        self.s_max = s_max


class UnderdeterminedLevelError(SpectralError):
    def __init__(self, message: str, **kwargs):
        kwargs.setdefault("error_code", "UNDERDETERMINED_LEVEL")
        super().__init__(message, **kwargs)


class IndexBelowLevelError(SpectralError):
    def __init__(self, message: str, **kwargs):
        kwargs.setdefault("error_code", "INDEX_BELOW_LEVEL")
        super().__init__(message, **kwargs)


class NonConstantCoefficientError(SpectralError):
    def __init__(self, message: str, **kwargs):
        kwargs.setdefault("error_code", "NON_CONSTANT_COEFFICIENT")
        super().__init__(message, **kwargs)


class ShapeMismatchError(SpectralError):
    def __init__(self, message: str, **kwargs):
        kwargs.setdefault("error_code", "SHAPE_MISMATCH")
        super().__init__(message, **kwargs)


class ZeroOnCurveError(SpectralError):
    def __init__(self, message: str = "element vanishes on the spectral curve", **kwargs):
        kwargs.setdefault("error_code", "ZERO_ON_CURVE")
        super().__init__(message, **kwargs)


class ZeroSubresultantError(SpectralError):
    def __init__(self, message: str, **kwargs):
        kwargs.setdefault("error_code", "ZERO_SUBRESULTANT")
        super().__init__(message, **kwargs)


class NotOnCurveError(SpectralError):
    def __init__(self, message: str, point: tuple = None, **kwargs):
        kwargs.setdefault("error_code", "NOT_ON_CURVE")
        super().__init__(message, **kwargs)
        self.point = point


class VanishingPhi2Error(SpectralError):
    def __init__(self, message: str, **kwargs):
        kwargs.setdefault("error_code", "VANISHING_PHI2")
        super().__init__(message, **kwargs)


# Parametrization and solving

class ParametrizationError(KdvFactorError):
    """Exception raised by curve parametrization and hyperexponential solving"""

    def __init__(self, message: str, stage: str = None, **kwargs):
        super().__init__(message, **kwargs)
        self.stage = stage


class UnsupportedShapeError(ParametrizationError):
    def __init__(self, message: str, genus: int = None, **kwargs):
        kwargs.setdefault("error_code", "UNSUPPORTED_SHAPE")
        super().__init__(message, **kwargs)
        self.genus = genus


class NoHyperexponentialSolutionError(ParametrizationError):
    def __init__(self, message: str, diagnostics: list = None, **kwargs):
        kwargs.setdefault("error_code", "NO_HYPEREXPONENTIAL_SOLUTION")
        super().__init__(message, **kwargs)
        self.diagnostics = diagnostics or []


class UnsupportedTowerError(ParametrizationError):
    def __init__(self, message: str, tower_kind: str = None, **kwargs):
        kwargs.setdefault("error_code", "UNSUPPORTED_TOWER")
        super().__init__(message, **kwargs)
        self.tower_kind = tower_kind


# Input

class ParseError(KdvFactorError):
    """Exception raised while reading expressions"""

    def __init__(self, message: str, text: str = None, position: int = None, **kwargs):
        super().__init__(message, **kwargs)
        self.text = text
        self.position = position

    def __str__(self):
        base = super().__str__()
        if self.position is not None:
            base = f"{base} at position {self.position}"
        return base


class ExpressionSyntaxError(ParseError):
    def __init__(self, message: str, **kwargs):
        kwargs.setdefault("error_code", "SYNTAX")
        super().__init__(message, **kwargs)


class UnknownSymbolError(ParseError):
    def __init__(self, message: str, symbol: str = None, **kwargs):
        kwargs.setdefault("error_code", "UNKNOWN_SYMBOL")
        super().__init__(message, **kwargs)
        self.symbol = symbol


class ConfigurationError(KdvFactorError):
    """Exception raised for configuration-related errors"""

    def __init__(self, message: str, config_key: str = None, **kwargs):
        super().__init__(message, **kwargs)
        self.config_key = config_key


class ValidationError(KdvFactorError):
    """Exception raised for invalid job descriptions"""

    def __init__(self, message: str, field_name: str = None, field_value=None, **kwargs):
        super().__init__(message, **kwargs)
        self.field_name = field_name
        self.field_value = field_value


# Utility functions for exception handling

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CHECK_FAILED = 2
EXIT_UNSUPPORTED = 3
EXIT_PARSE_ERROR = 4
EXIT_INVALID_INPUT = 5
# 128 + SIGINT
EXIT_INTERRUPTED = 130


def handle_and_log_exception(logger, exception: Exception, context: str = "") -> KdvFactorError:
    """
    Handle and log an exception, converting it to a KdvFactorError if necessary

    Args:
        logger: Logger instance
        exception: The exception to handle
        context: Additional context information

    Returns:
        KdvFactorError instance
    """
    context_msg = f" in {context}" if context else ""

    if isinstance(exception, KdvFactorError):
        logger.error(f"kdvfactor error{context_msg}: {exception}")
        return exception
    else:
        error_msg = f"Unexpected error{context_msg}: {exception}"
        logger.error(error_msg, exc_info=True)
        return KdvFactorError(error_msg, original_error=exception)


def exit_code_for(exception: Exception) -> int:
    """Map an exception to the process exit code of the CLI"""
    if isinstance(exception, ParseError):
        return EXIT_PARSE_ERROR
    if isinstance(exception, (UnsupportedShapeError, UnsupportedTowerError,
                              NoHyperexponentialSolutionError)):
        return EXIT_UNSUPPORTED
    # Inputs outside the domain of the request
    if isinstance(exception, (ValidationError, ConfigurationError, NotOnCurveError, VanishingPhi2Error,
                              IndexBelowLevelError, DegeneratePotentialError)):
        return EXIT_INVALID_INPUT
    return EXIT_FAILURE


def create_user_friendly_message(exception: KdvFactorError) -> str:
    """
    Create a user-friendly error message from a KdvFactorError

    Args:
        exception: KdvFactorError instance

    Returns:
        User-friendly error message
    """
    if isinstance(exception, ParseError):
        where = f" (position {exception.position})" if exception.position is not None else ""
        return f"Could not read expression{where}: {exception.message}"
    elif isinstance(exception, LevelNotFoundError):
        return f"No KdV level up to {exception.s_max}: {exception.message}"
    elif isinstance(exception, UnsupportedShapeError):
        return f"Spectral curve not supported: {exception.message}"
    elif isinstance(exception, UnsupportedTowerError):
        return f"Solving is not available for this field: {exception.message}"
    elif isinstance(exception, NoHyperexponentialSolutionError):
        return f"No hyperexponential solution: {exception.message}"
    elif isinstance(exception, SpectralError):
        stage = f" during {exception.stage}" if exception.stage else ""
        return f"Spectral computation failed{stage}: {exception.message}"
    elif isinstance(exception, ValidationError):
        return f"Invalid request: {exception.message}"
    else:
        return f"An error occurred: {str(exception)}"

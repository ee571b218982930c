"""
Exception hierarchy and process exit codes.

Library code raises these; tools/casimir_cli.py maps them to exit codes.
"""

from typing import Optional

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_VERIFICATION = 4


class LifshitzError(Exception):
    """Base class for all package errors"""


class DomainError(LifshitzError, ValueError):
    """Argument outside the domain of an operation"""


class ZeroFrequency(DomainError):
    """Permittivity requested at zero frequency, where it has a pole"""


class ConvergenceFailure(LifshitzError):
    """Numerical result did not reach the requested tolerance"""

    def __init__(self, message: str, value: Optional[float] = None, err_est: Optional[float] = None):
        super().__init__(message)
        self.value = value
        self.err_est = err_est


class StepUnderflow(ConvergenceFailure):
    """Finite-difference temperature step rounds to zero"""


class DegenerateModel(LifshitzError):
    """Closed-form law is undefined for the given material"""


class InsufficientData(LifshitzError):
    """Too few samples for a fit"""


class SignMixture(LifshitzError):
    """Fit samples change sign, so ln|value| is meaningless"""


class ConfigError(LifshitzError):
    """Configuration could not be parsed or validated"""

    def __init__(self, message: str, path: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None):
        self.path = path
        self.line = line
        self.column = column
        super().__init__(message)

    def __str__(self) -> str:
        where = self.path or "<config>"
        if self.line is not None:
            where = f"{where}:{self.line}:{self.column or 1}"
        return f"{where}: {self.args[0]}"


class SeriesDomainWarning(UserWarning):
    """Truncated series evaluated outside its reliable range"""

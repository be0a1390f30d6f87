from typing import Optional, Tuple


class ToolkitException(Exception):
    """
    Base error of the toolkit.

    Every error carries the process exit code the command line maps it to and a
    human readable detail, the same way a web handler carries a status code.
    """

    exit_code = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code

    def __str__(self):
        return self.detail


class ConfigError(ToolkitException):
    """Malformed run configuration or unknown command."""


class ModelError(ToolkitException):
    """Unknown catalog entry or parameters outside the admissible family."""


class InputError(ToolkitException):
    """Bad arguments to a numerical operation."""


class QuadratureError(ToolkitException):
    def __init__(self, detail: str, error_estimate: float):
        super().__init__(f"{detail} (achieved error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


class BracketError(ToolkitException):
    def __init__(self, detail: str, bracket: Tuple[float, float]):
        super().__init__(f"{detail} (last bracket [{bracket[0]:.6e}, {bracket[1]:.6e}])")
        self.bracket = bracket


class VerdictFailure(ToolkitException):
    """A computation finished but its verdict is negative."""

    exit_code = 2

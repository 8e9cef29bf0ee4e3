"""
Exception hierarchy for PyRunShaper.

Every error raised on purpose by the library derives from
:class:`PyRunShaperError`. The command-line adapter maps each family to an
exit code through :func:`exit_code_for`: validation problems exit with 2,
runtime failures with 1.
"""

from __future__ import annotations

EXIT_OK = 0
EXIT_RUNTIME_FAILURE = 1
EXIT_VALIDATION_ERROR = 2


class PyRunShaperError(Exception):
    """Base class for all PyRunShaper errors."""
    exit_code = EXIT_RUNTIME_FAILURE


class ConfigurationError(PyRunShaperError, ValueError):
    """Raised when an environment, agent or experiment configuration is invalid."""
    exit_code = EXIT_VALIDATION_ERROR


class IntegrationError(PyRunShaperError, ArithmeticError):
    """Raised when the simulator is handed a non-finite state or action."""
    pass


class DemoError(PyRunShaperError, ValueError):
    """Base class for demonstration-track problems."""
    exit_code = EXIT_VALIDATION_ERROR


class DemoSchemaError(DemoError):
    """Raised when a demo file lacks a required column or has bad part names."""

    def __init__(self, message: str, column: str | None = None):
        super().__init__(message)
        self.column = column


class DemoDataError(DemoError):
    """Raised when a demo file holds invalid values."""

    def __init__(self, message: str, row: int | None = None,
                 column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class InsufficientDemoError(DemoError):
    """Raised when a demo track is shorter than one gait cycle."""
    pass


class ShapingContractError(PyRunShaperError, ValueError):
    """Raised when a potential function receives signed distances."""
    exit_code = EXIT_VALIDATION_ERROR


class ShapeError(PyRunShaperError, ValueError):
    """Raised on network/array shape mismatches."""
    pass


class NonFiniteGradientError(PyRunShaperError, ArithmeticError):
    """Raised when an optimizer step is asked to apply NaN/Inf gradients."""
    pass


class CheckpointError(PyRunShaperError):
    """Raised when a checkpoint cannot be read or does not fit the environment."""
    exit_code = EXIT_VALIDATION_ERROR


class PresetNotFoundError(ConfigurationError):
    """Raised for an unknown experiment preset name."""

    def __init__(self, name: str, available: list[str]):
        super().__init__(
            f"Unknown preset {name!r}. Available presets: {', '.join(available)}")
        self.name = name
        self.available = available


class OutputConflictError(PyRunShaperError):
    """Raised when an output file was written under a different config hash."""
    pass


class RunFailedError(PyRunShaperError):
    """Raised when one or more seeds of an experiment failed."""

    def __init__(self, message: str, failed: dict[str, str] | None = None):
        super().__init__(message)
        self.failed = failed or {}


def exit_code_for(error: BaseException) -> int:
    """
    Map an exception to the CLI exit code.

    Args:
        error: Exception raised by a command

    Returns:
        2 for validation errors, 1 for everything else
    """
    if isinstance(error, PyRunShaperError):
        return error.exit_code
    return EXIT_RUNTIME_FAILURE

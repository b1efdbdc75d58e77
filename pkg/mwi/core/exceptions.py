"""
MWI Exception Hierarchy
=======================

Exceptions raised by model handling, the Helmholtz engine, the inversion
loop and the command-line layer.
"""

import logging
from typing import Optional, Any, Dict, List
from datetime import datetime


logger = logging.getLogger('mwi')


class MwiError(Exception):
    """Base exception for all mwi errors."""

    def __init__(self, message: str, details: Optional[Any] = None, context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details
        self.context = context or {}
        self.timestamp = datetime.now()

        logger.error(f"{self.__class__.__name__}: {message}",
                     extra={'details': details, 'context': context})

    def __str__(self) -> str:
        parts = [self.message]
        if self.details:
            parts.append(f"Details: {self.details}")
        if self.context:
            parts.append(f"Context: {self.context}")
        return " | ".join(parts)

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to dictionary for structured logging."""
        return {
            'error_type': self.__class__.__name__,
            'message': self.message,
            'details': self.details,
            'context': self.context,
            'timestamp': self.timestamp.isoformat()
        }


class ValidationError(MwiError):
    """Raised when an input array, position or shape is invalid."""

    def __init__(self, message: str, field: Optional[str] = None, value: Optional[Any] = None):
        context = {}
        if field:
            context['field'] = field
        if value is not None:
            context['invalid_value'] = str(value)

        super().__init__(message, context=context)
        self.field = field
        self.value = value

    def __str__(self) -> str:
        if self.field:
            return f"for field '{self.field}': {self.message}"
        return self.message


class ConfigurationError(MwiError):
    """Raised when run configuration is invalid."""

    def __init__(self, message: str, config_key: Optional[str] = None,
                 config_value: Optional[Any] = None):
        context = {}
        if config_key:
            context['config_key'] = config_key
        if config_value is not None:
            context['config_value'] = str(config_value)

        super().__init__(message, context=context)
        self.config_key = config_key
        self.config_value = config_value

    def __str__(self) -> str:
        return self.message


class ManifestError(ConfigurationError):
    """Raised when a run manifest cannot be parsed; carries the offending line."""

    def __init__(self, message: str, line: Optional[int] = None, section: Optional[str] = None,
                 key: Optional[str] = None, value: Optional[Any] = None):
        config_key = f"{section}.{key}" if section and key else (section or key)
        super().__init__(message, config_key=config_key, config_value=value)
        self.line = line
        self.section = section
        self.key = key

    def __str__(self) -> str:
        if self.line is not None:
            return f"line {self.line}: {self.message}"
        return self.message


class NumericalError(MwiError):
    """Base class for numerical failures (singular systems, aborted runs)."""


class SolverError(NumericalError):
    """Raised when a factorization or dense Hermitian solve fails."""

    def __init__(self, message: str, frequency: Optional[float] = None,
                 source: Optional[int] = None, diagnostics: Optional[Dict[str, Any]] = None):
        context: Dict[str, Any] = dict(diagnostics or {})
        if frequency is not None:
            context['frequency_hz'] = frequency
        if source is not None:
            context['source'] = source

        super().__init__(message, context=context)
        self.frequency = frequency
        self.source = source

    def with_source(self, source: int) -> 'SolverError':
        """Copy of this error tagged with the source index being solved."""
        return SolverError(self.message, frequency=self.frequency, source=source,
                           diagnostics={k: v for k, v in self.context.items()
                                        if k not in ('frequency_hz', 'source')})


class InversionAborted(NumericalError):
    """Raised when the outer loop stops on a numerical failure."""

    def __init__(self, message: str, iteration: int, state: Any = None,
                 checkpoint: Optional[str] = None, cause: Optional[Exception] = None):
        context: Dict[str, Any] = {'iteration': iteration}
        if checkpoint:
            context['checkpoint'] = checkpoint

        super().__init__(message, details=str(cause) if cause else None, context=context)
        self.iteration = iteration
        self.state = state
        self.checkpoint = checkpoint
        self.cause = cause


class ErrorCollector:
    """Collects manifest errors so one parse reports every problem."""

    def __init__(self):
        self.errors: List[MwiError] = []

    def add_error(self, error: MwiError) -> None:
        self.errors.append(error)

    def has_errors(self) -> bool:
        return bool(self.errors)

    def raise_if_errors(self, summary_message: str = "Multiple errors occurred") -> None:
        """Raise a single ManifestError listing every collected error."""
        if not self.has_errors():
            return
        if len(self.errors) == 1:
            raise self.errors[0]
        lines = [error.line for error in self.errors if isinstance(error, ManifestError)]
        listing = "; ".join(str(error) for error in self.errors)
        raise ManifestError(
            f"{summary_message}: {len(self.errors)} error(s): {listing}",
            line=min((line for line in lines if line is not None), default=None),
        )


def configure_mwi_logging(level: str = 'WARNING',
                          format_string: Optional[str] = None) -> None:
    """Configure logging for mwi with structured format."""
    if format_string is None:
        format_string = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format=format_string,
        handlers=[logging.StreamHandler()]
    )

    logger.setLevel(getattr(logging, level.upper()))

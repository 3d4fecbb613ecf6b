"""Infrastructure components for error handling and performance timing."""

from .error_handling import (
    EXIT_DATA,
    EXIT_INTERNAL,
    EXIT_OK,
    EXIT_USAGE,
    ErrorHandler,
    TypeflowError,
    UsageError,
    exit_code_for,
)
from .performance import OperationTimer, PerformanceMonitor

__all__ = [
    "EXIT_DATA",
    "EXIT_INTERNAL",
    "EXIT_OK",
    "EXIT_USAGE",
    "ErrorHandler",
    "OperationTimer",
    "PerformanceMonitor",
    "TypeflowError",
    "UsageError",
    "exit_code_for",
]

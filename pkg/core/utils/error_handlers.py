"""
Error Handling Utilities
------------------------
Centralized error handling mechanisms for the application.

This module provides:
- The root exception hierarchy with stable CLI exit codes
- An exception handling decorator for Celery self-test suites
- Standardized error formatting and logging
"""

import logging
import functools
import traceback
import json
from typing import Any, Callable, Dict, Optional

from celery import Task

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAILURE = 1
EXIT_INPUT_ERROR = 2
EXIT_BUDGET = 3


class DuomagmaError(Exception):
    """Base exception for all library errors with additional context."""

    exit_code = EXIT_FAILURE

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.context = context or {}

    def __str__(self) -> str:
        error_details = {
            'message': self.message,
            'error_type': self.__class__.__name__,
        }
        if self.context:
            error_details['context'] = {k: str(v) for k, v in self.context.items()}
        return json.dumps(error_details, sort_keys=True)


class InputError(DuomagmaError):
    """Malformed or incompatible input (schema, shape, parameters)."""

    exit_code = EXIT_INPUT_ERROR


class SemanticFailure(DuomagmaError):
    """The input was well-formed but the requested object does not exist."""

    exit_code = EXIT_FAILURE


class BudgetError(DuomagmaError):
    """A bounded search ran out of budget."""

    exit_code = EXIT_BUDGET


def exit_code_for(error: Exception) -> int:
    """Map an exception onto the stable CLI exit codes."""
    if isinstance(error, DuomagmaError):
        return error.exit_code
    if isinstance(error, (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError)):
        return EXIT_INPUT_ERROR
    return EXIT_FAILURE


def suite_error_handler(suite_name: Optional[str] = None):
    """
    Decorator for Celery self-test suites to standardize error handling.

    An unexpected exception inside a suite becomes a failed suite result
    instead of propagating, so one broken suite never hides the others.

    Example:
        @shared_task(bind=True)
        @suite_error_handler('membership')
        def suite_membership(self, seed, cases):
            ...
    """
    def decorator(func: Callable) -> Callable:
        name = suite_name or func.__name__

        @functools.wraps(func)
        def wrapper(task_self: Task, *args, **kwargs) -> Any:
            task_id = getattr(task_self.request, 'id', None) or 'local'
            try:
                return func(task_self, *args, **kwargs)
            except Exception as exc:
                logger.error("Suite %s (%s) failed with unhandled exception: %s",
                             name, task_id, str(exc))
                if exc.__traceback__:
                    logger.debug("Traceback for suite %s:\n%s", name, traceback.format_exc())
                return {
                    'suite': name,
                    'status': 'failed',
                    'cases': 0,
                    'skipped': 0,
                    'failures': 1,
                    'error': str(exc),
                    'error_type': exc.__class__.__name__,
                }

        return wrapper
    return decorator


def format_error_for_user(error: Exception) -> Dict[str, Any]:
    """
    Format an exception into the JSON payload printed by the CLI.

    Args:
        error: The exception to format

    Returns:
        Dictionary with type, message and exit code
    """
    if isinstance(error, DuomagmaError):
        payload = {
            'error_type': error.__class__.__name__,
            'message': error.message,
            'exit_code': error.exit_code,
        }
        if error.context:
            payload['context'] = {k: str(v) for k, v in error.context.items()}
        return payload

    error_type = error.__class__.__name__
    if isinstance(error, json.JSONDecodeError):
        message = f"Input is not valid JSON: {error.msg} (line {error.lineno}, column {error.colno})"
    elif isinstance(error, OSError):
        message = f"Could not read input: {error}"
    else:
        message = str(error) or repr(error)
    return {
        'error_type': error_type,
        'message': message,
        'exit_code': exit_code_for(error),
    }


def log_suite_start(suite_name: str, seed: int, cases: int) -> None:
    """Log the start of a self-test suite."""
    logger.info("Starting suite %s (seed=%s, cases=%s)", suite_name, seed, cases)


def log_suite_success(suite_name: str, result: Dict[str, Any]) -> None:
    """Log the completion of a self-test suite."""
    logger.info("Suite %s finished: %s cases, %s failures",
                suite_name, result.get('cases'), result.get('failures'))


def log_suite_skip(suite_name: str, case: int, error: Exception) -> None:
    """
    Log a case a suite could not check.

    Args:
        suite_name: Name of the suite.
        case: Index of the skipped case.
        error: The exception that made the case uncheckable.
    """
    logger.warning("Suite %s skipped case %s: %s: %s",
                   suite_name, case, error.__class__.__name__, getattr(error, 'message', error))

#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Custom errors and warning for uqkit.
"""

class UQKitError(Exception):
    """Class for errors in uqkit."""

class InvalidArgumentError(UQKitError, ValueError):
    """A scalar argument is outside its allowed range (e.g. a probability
    outside (0, 1), or a non-positive standard deviation)."""

class ShapeError(UQKitError, ValueError):
    """Paired inputs do not have matching lengths."""

class ValidationError(UQKitError, ValueError):
    """An invariant of the input data is violated.

    The optional `index` (0-based array position), `row` (1-based data row
    of a file) and `column` attributes locate the offending value."""

    def __init__(self, message, index=None, row=None, column=None):
        super().__init__(message)
        self.index = index
        self.row = row
        self.column = column

class EmptyInputError(UQKitError, ValueError):
    """A metric was requested on zero points."""

class ConfigurationError(UQKitError, ValueError):
    """A configuration object or option is invalid."""

class NumericError(UQKitError, ArithmeticError):
    """A loss or activation became non-finite."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch

class UQKitWarning(Warning):
    """Class for warnings in uqkit."""

# SPDX-License-Identifier: Apache-2.0
# Copyright Contributors to the WNCS project


class WncsError(Exception):
    """
    Base class for all errors raised by the wncs package.
    """


class ConfigError(WncsError, ValueError):
    """
    Raised for invalid configuration documents or settings.

    The optional field path points at the offending value, e.g. ``channel.d``
    or ``sweep_values[3]``.
    """
    def __init__(self, message, field_path=None):
        """
        Instantiate a new :class:`ConfigError`.

        :param str message: A description of the problem.
        :param str field_path: Optional path to the offending field.
        """
        self.field_path = field_path
        self.message = message
        if field_path:
            message = "%s: %s" % (field_path, message)
        super(ConfigError, self).__init__(message)


class SpectrumError(WncsError, RuntimeError):
    """
    Raised when the eigenvalues of a system matrix could not be computed.
    """


class UndefinedSIRError(WncsError, ZeroDivisionError):
    """
    Raised when a signal to interference ratio has no interference power.
    """


class DomainError(WncsError, ValueError):
    """
    Raised when an inverse relation is evaluated where it has no solution.
    """

# SPDX-License-Identifier: Apache-2.0
# Copyright Contributors to the WNCS project

import json
import logging
import numbers
import os

from .constants import _DEFAULT_SAMPLES, _DEFAULT_SEED, _DEFAULT_STREAMS
from .constants import _DEFAULT_CHUNK_SIZE, _DEFAULT_EIGEN_TOL, _DEFAULT_OMEGA
from .constants import _DEFAULT_EXPONENT_LIMIT, _SEED_ENV_VAR
from .errors import ConfigError

logger = logging.getLogger(__name__)


class Singleton(type):
    """
    A singleton meta class.
    """
    _instances = {}

    def __call__(cls, *args, **kwargs):
        if cls not in cls._instances:
            cls._instances[cls] = super(Singleton, cls).__call__(*args, **kwargs)
        return cls._instances[cls]


def _check_positive_int(name, value):
    """
    Check the given value is a strictly positive integer.

    Numpy integers are accepted and converted.

    :param str name: The setting name, used in error messages.
    :param value: The value to check.
    :returns: The value as an int.
    :raises ConfigError: For invalid values.
    """
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or int(value) < 1:
        raise ConfigError("must be an integer >= 1, not %r" % (value,), name)
    return int(value)


def _check_seed(name, value):
    """
    Check the given value is a 64 bits unsigned integer.

    :param str name: The setting name, used in error messages.
    :param value: The value to check.
    :returns: The value as an int.
    :raises ConfigError: For invalid values.
    """
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or not 0 <= int(value) < 2 ** 64:
        raise ConfigError("must be a 64 bits unsigned integer, not %r" % (value,), name)
    return int(value)


class WncsSettings(Singleton("WncsSettings", (object,), {})):
    """
    A class to store and retrieve global wncs settings.
    """
    def __init__(self):
        """
        Instantiate a new :class:`WncsSettings`.
        """
        self.reset_to_defaults()

    @classmethod
    def from_file(cls, json_file):
        """
        Load settings from a JSON file.

        :param str json_file: Full path to a JSON file.
        :returns: The :class:`WncsSettings` singleton instance.
        :raises ConfigError: For unknown settings or invalid values.
        """
        try:
            with open(json_file, "r", encoding="utf-8") as f:
                json_data = json.loads(f.read())
        except (IOError, OSError) as e:
            raise ConfigError("unable to read settings file %s: %s" % (json_file, e))
        except ValueError as e:
            raise ConfigError("invalid JSON in settings file %s: %s" % (json_file, e))
        if not isinstance(json_data, dict):
            raise ConfigError("settings file %s must contain a JSON object" % json_file)
        settings = WncsSettings()
        settings.reset_to_defaults()
        for key, value in json_data.items():
            if key.startswith("_") or not hasattr(settings, key):
                raise ConfigError("unknown setting with value %r" % (value,), key)
            setattr(settings, key, value)
        logger.debug("Loaded settings from %s" % json_file)
        # We return the settings, but since it's a singleton, it's not really needed.
        return settings

    @property
    def samples(self):
        """
        Return the default number of Monte Carlo draws.

        :returns: An integer.
        """
        return self._samples

    @samples.setter
    def samples(self, value):
        """
        Set the default number of Monte Carlo draws.

        :param int value: The value to set.
        :raises ConfigError: For invalid values.
        """
        self._samples = _check_positive_int("samples", value)

    @property
    def seed(self):
        """
        Return the default Monte Carlo seed.

        :returns: A non-negative integer.
        """
        return self._seed

    @seed.setter
    def seed(self, value):
        """
        Set the default Monte Carlo seed.

        :param int value: A 64 bits unsigned integer.
        :raises ConfigError: For invalid values.
        """
        self._seed = _check_seed("seed", value)

    @property
    def streams(self):
        """
        Return the default number of independent Monte Carlo streams.

        :returns: An integer.
        """
        return self._streams

    @streams.setter
    def streams(self, value):
        """
        Set the default number of independent Monte Carlo streams.

        :param int value: The value to set.
        """
        self._streams = _check_positive_int("streams", value)

    @property
    def max_workers(self):
        """
        Return the maximum number of workers used to evaluate streams in parallel.

        :returns: An integer or ``None`` for the executor default.
        """
        return self._max_workers

    @max_workers.setter
    def max_workers(self, value):
        """
        Set the maximum number of workers used to evaluate streams in parallel.

        :param value: An integer or ``None``.
        """
        if value is not None:
            value = _check_positive_int("max_workers", value)
        self._max_workers = value

    @property
    def chunk_size(self):
        """
        Return the number of draws generated in a single vectorised batch.

        :returns: An integer.
        """
        return self._chunk_size

    @chunk_size.setter
    def chunk_size(self, value):
        """
        Set the number of draws generated in a single vectorised batch.

        Changing it changes the draws sequence for a given seed.

        :param int value: The value to set.
        """
        self._chunk_size = _check_positive_int("chunk_size", value)

    @property
    def eigen_tol(self):
        """
        Return the slack used when classifying eigenvalue magnitudes.

        :returns: A float.
        """
        return self._eigen_tol

    @eigen_tol.setter
    def eigen_tol(self, value):
        """
        Set the slack used when classifying eigenvalue magnitudes.

        :param float value: A non-negative value.
        """
        if isinstance(value, bool) or not isinstance(value, numbers.Real) or value < 0:
            raise ConfigError("must be a non-negative number, not %r" % (value,), "eigen_tol")
        self._eigen_tol = float(value)

    @property
    def omega(self):
        """
        Return the default mean fading power, E[|h|^2].

        :returns: A float.
        """
        return self._omega

    @omega.setter
    def omega(self, value):
        """
        Set the default mean fading power.

        :param float value: A strictly positive value.
        """
        if isinstance(value, bool) or not isinstance(value, numbers.Real) or value <= 0:
            raise ConfigError("must be a positive number, not %r" % (value,), "omega")
        self._omega = float(value)

    @property
    def exponent_limit(self):
        """
        Return the exponent magnitude beyond which reliability is clamped to 0.

        :returns: A float.
        """
        return self._exponent_limit

    @exponent_limit.setter
    def exponent_limit(self, value):
        """
        Set the exponent magnitude beyond which reliability is clamped to 0.

        :param float value: A strictly positive value.
        """
        if isinstance(value, bool) or not isinstance(value, numbers.Real) or value <= 0:
            raise ConfigError("must be a positive number, not %r" % (value,), "exponent_limit")
        self._exponent_limit = float(value)

    def reset_to_defaults(self):
        """
        Reset settings to all default values.

        The default seed is read from the ``WNCS_SEED`` environment variable,
        if set.
        """
        self._samples = _DEFAULT_SAMPLES
        self._seed = _DEFAULT_SEED
        self._streams = _DEFAULT_STREAMS
        self._max_workers = None
        self._chunk_size = _DEFAULT_CHUNK_SIZE
        self._eigen_tol = _DEFAULT_EIGEN_TOL
        self._omega = _DEFAULT_OMEGA
        self._exponent_limit = _DEFAULT_EXPONENT_LIMIT
        env_seed = os.getenv(_SEED_ENV_VAR)
        if env_seed:
            try:
                value = int(env_seed)
            except ValueError:
                raise ConfigError("invalid seed %r" % env_seed, _SEED_ENV_VAR)
            self.seed = value

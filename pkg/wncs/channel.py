# SPDX-License-Identifier: Apache-2.0
# Copyright Contributors to the WNCS project

import collections
import logging
import math

import numpy as np

from .constants import _CHANNEL_FIELDS
from .errors import ConfigError, UndefinedSIRError
from .settings import WncsSettings

logger = logging.getLogger(__name__)


def _check_number(name, value, minimum, strict=True):
    """
    Check that the given value is a finite number above the given minimum.

    :param str name: The parameter name, used in error messages.
    :param value: The value to check.
    :param float minimum: The lower bound.
    :param bool strict: Whether the bound is excluded.
    :returns: The value as a float.
    :raises ValueError: For invalid values.
    """
    if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
        raise ValueError("%s must be a number, not %r" % (name, value))
    value = float(value)
    if not math.isfinite(value):
        raise ValueError("%s must be finite, not %s" % (name, value))
    if strict and not value > minimum:
        raise ValueError("%s must be > %s, not %s" % (name, minimum, value))
    if not strict and not value >= minimum:
        raise ValueError("%s must be >= %s, not %s" % (name, minimum, value))
    return value


class ChannelParams(object):
    """
    Parameters of a sensor to controller wireless link.

    The link has a distance based path loss L_d = d^eta L_0, with L_0 the path
    loss at the reference distance of 1 m, and Rayleigh small scale fading
    with E[|h|^2] = omega. All values are plain numerals in consistent
    linear units.
    """
    def __init__(self, p_t, n0, l0, d, eta, omega=None):
        """
        Instantiate a new :class:`ChannelParams`.

        :param float p_t: Transmit power, > 0.
        :param float n0: Noise power, > 0.
        :param float l0: Path loss at the reference distance, > 0.
        :param float d: Sensor to controller distance in meters, >= 1.
        :param float eta: Path loss exponent, > 0.
        :param float omega: Mean fading power E[|h|^2], > 0, defaults to the
                            omega setting.
        :raises ValueError: For invalid values.
        """
        if omega is None:
            omega = WncsSettings().omega
        self._p_t = _check_number("p_t", p_t, 0)
        self._n0 = _check_number("n0", n0, 0)
        self._l0 = _check_number("l0", l0, 0)
        # The reference distance model is never extrapolated below 1 m.
        self._d = _check_number("d", d, 1, strict=False)
        self._eta = _check_number("eta", eta, 0)
        self._omega = _check_number("omega", omega, 0)

    @classmethod
    def from_dict(cls, data, field_path="channel"):
        """
        Build channel parameters from a dictionary.

        :param dict data: A dictionary with "p_t", "n0", "l0", "d", "eta"
                          and optional "omega" keys. A missing
                          "omega" defaults to the omega setting.
        :param str field_path: Path to the dictionary in its document.
        :returns: A :class:`ChannelParams` instance.
        :raises ConfigError: For missing, unknown or invalid values.
        """
        if not isinstance(data, dict):
            raise ConfigError("must be an object", field_path)
        for key in data:
            if key not in _CHANNEL_FIELDS:
                raise ConfigError("unknown channel parameter", "%s.%s" % (field_path, key))
        kwargs = {}
        for key in _CHANNEL_FIELDS:
            if key not in data:
                if key == "omega":
                    continue
                raise ConfigError("missing required value", "%s.%s" % (field_path, key))
            kwargs[key] = data[key]
        try:
            return cls(**kwargs)
        except ValueError as e:
            raise ConfigError("%s" % e, field_path)

    def to_dict(self):
        """
        Return a dictionary representation of these parameters.

        :returns: A dictionary.
        """
        return dict((key, getattr(self, key)) for key in _CHANNEL_FIELDS)

    def replace(self, **kwargs):
        """
        Return a copy of these parameters with the given values replaced.

        :returns: A new :class:`ChannelParams` instance.
        """
        values = self.to_dict()
        values.update(kwargs)
        return ChannelParams(**values)

    @property
    def p_t(self):
        """
        Return the transmit power.
        """
        return self._p_t

    @property
    def n0(self):
        """
        Return the noise power.
        """
        return self._n0

    @property
    def l0(self):
        """
        Return the path loss at the reference distance.
        """
        return self._l0

    @property
    def d(self):
        """
        Return the sensor to controller distance.
        """
        return self._d

    @property
    def eta(self):
        """
        Return the path loss exponent.
        """
        return self._eta

    @property
    def omega(self):
        """
        Return the mean fading power E[|h|^2].
        """
        return self._omega

    def __eq__(self, other):
        if not isinstance(other, ChannelParams):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self):
        return hash(tuple(self.to_dict().items()))

    def __repr__(self):
        return "<ChannelParams %s>" % " ".join(
            "%s=%g" % (key, value) for key, value in self.to_dict().items()
        )


class LoopTopology(object):
    """
    K sensor to controller pairs sharing a frequency band and a path loss
    exponent.
    """
    def __init__(self, distances, eta):
        """
        Instantiate a new :class:`LoopTopology`.

        :param distances: A list of K >= 1 distances, each >= 1.
        :param float eta: The shared path loss exponent, > 0.
        :raises ValueError: For invalid values.
        """
        if not distances:
            raise ValueError("At least one distance is needed")
        self._distances = tuple(
            _check_number("distances[%d]" % i, d, 1, strict=False) for i, d in enumerate(distances)
        )
        self._eta = _check_number("eta", eta, 0)

    @classmethod
    def from_dict(cls, data, field_path="topology"):
        """
        Build a topology from a dictionary with "distances" and "eta" keys.

        :param dict data: A dictionary.
        :param str field_path: Path to the dictionary in its document.
        :returns: A :class:`LoopTopology` instance.
        :raises ConfigError: For missing, unknown or invalid values.
        """
        if not isinstance(data, dict):
            raise ConfigError("must be an object", field_path)
        for key in data:
            if key not in ("distances", "eta"):
                raise ConfigError("unknown topology entry", "%s.%s" % (field_path, key))
        for key in ("distances", "eta"):
            if key not in data:
                raise ConfigError("missing required value", "%s.%s" % (field_path, key))
        if not isinstance(data["distances"], list):
            raise ConfigError("must be a list", "%s.distances" % field_path)
        try:
            return cls(data["distances"], data["eta"])
        except ValueError as e:
            raise ConfigError("%s" % e, field_path)

    def to_dict(self):
        """
        Return a dictionary representation of this topology.

        :returns: A dictionary.
        """
        return {"distances": list(self._distances), "eta": self._eta}

    def replace(self, **kwargs):
        """
        Return a copy of this topology with the given values replaced.

        :returns: A new :class:`LoopTopology` instance.
        """
        values = self.to_dict()
        values.update(kwargs)
        return LoopTopology(**values)

    @property
    def distances(self):
        """
        Return the sensor to controller distances.

        :returns: A tuple of floats.
        """
        return self._distances

    @property
    def eta(self):
        """
        Return the shared path loss exponent.
        """
        return self._eta

    @property
    def k(self):
        """
        Return the number of loops.
        """
        return len(self._distances)

    def check_loop_index(self, loop_index):
        """
        Check the given loop index is valid for this topology.

        :param int loop_index: A 0 based loop index.
        :raises ValueError: For invalid indexes.
        """
        if isinstance(loop_index, bool) or not isinstance(loop_index, int):
            raise ValueError("Loop index must be an integer, not %r" % (loop_index,))
        if not 0 <= loop_index < self.k:
            raise ValueError("Loop index %d is out of range for %d loops" % (loop_index, self.k))

    def attenuations(self):
        """
        Return d_j^-eta for every loop.

        :returns: A :class:`numpy.ndarray`.
        """
        return np.power(np.array(self._distances), -self._eta)

    def __repr__(self):
        return "<LoopTopology K=%d eta=%g>" % (self.k, self._eta)


# |h| and its unit mean power counterpart |h|^2 / omega.
FadingSample = collections.namedtuple("FadingSample", ["amplitude", "power_gain"])


def path_loss(params):
    """
    Return the path loss at the link distance, L_d = d^eta L_0.

    :param params: A :class:`ChannelParams` instance.
    :returns: A float.
    """
    return params.d ** params.eta * params.l0


def uniform_open_closed(rng, size=None):
    """
    Draw uniform variates on (0, 1].

    :param rng: A :class:`numpy.random.Generator`.
    :param size: Optional output shape.
    :returns: A float or a :class:`numpy.ndarray`.
    """
    # random() draws from [0, 1).
    return 1.0 - rng.random(size)


def sample_rayleigh_amplitude(omega, rng, size=None):
    """
    Draw Rayleigh distributed fading amplitudes with E[|h|^2] = omega.

    Amplitudes are drawn by inverse transform, |h| = sqrt(-omega ln U).

    :param float omega: The mean fading power, > 0.
    :param rng: A :class:`numpy.random.Generator`.
    :param size: Optional output shape.
    :returns: A float or a :class:`numpy.ndarray`.
    :raises ValueError: For invalid omega values.
    """
    omega = _check_number("omega", omega, 0)
    u = uniform_open_closed(rng, size)
    amplitude = np.sqrt(-omega * np.log(u))
    if size is None:
        return float(amplitude)
    return amplitude


def sample_power_gains(rng, size=None):
    """
    Draw unit mean exponential power gains, -ln U.

    :param rng: A :class:`numpy.random.Generator`.
    :param size: Optional output shape.
    :returns: A float or a :class:`numpy.ndarray`.
    """
    gains = -np.log(uniform_open_closed(rng, size))
    if size is None:
        return float(gains)
    return gains


def sample_fading(omega, rng):
    """
    Draw a single fading realization.

    :param float omega: The mean fading power, > 0.
    :param rng: A :class:`numpy.random.Generator`.
    :returns: A :class:`FadingSample`.
    """
    amplitude = sample_rayleigh_amplitude(omega, rng)
    return FadingSample(amplitude, amplitude ** 2 / omega)


def snr(params, amplitude):
    """
    Return the instantaneous signal to noise ratio for a fading amplitude.

    SNR = |h|^2 P_t / (N_0 L_0 d^eta)

    :param params: A :class:`ChannelParams` instance.
    :param amplitude: A fading amplitude |h| >= 0, or an array of them.
    :returns: A float or a :class:`numpy.ndarray`.
    :raises ValueError: For negative amplitudes.
    """
    if np.any(np.asarray(amplitude) < 0):
        raise ValueError("Fading amplitudes must be >= 0")
    return np.square(amplitude) * params.p_t / (params.n0 * path_loss(params))


def capacity(snr_value):
    """
    Return the Shannon capacity, in bits per symbol, for a given SNR.

    :param snr_value: A SNR value >= 0, or an array of them.
    :returns: A float or a :class:`numpy.ndarray`.
    """
    if np.ndim(snr_value) == 0:
        return math.log2(1.0 + float(snr_value))
    return np.log2(1.0 + np.asarray(snr_value, dtype=float))


def sir(topology, loop_index, power_gains):
    """
    Return the signal to interference ratio of a loop.

    SIR_i = h_i d_i^-eta / sum_{j != i} h_j d_j^-eta

    :param topology: A :class:`LoopTopology` instance with K >= 2 loops.
    :param int loop_index: The 0 based index of the loop.
    :param power_gains: K power gains >= 0.
    :returns: A float.
    :raises ValueError: For invalid inputs.
    :raises UndefinedSIRError: If all interferers have a zero gain.
    """
    if topology.k < 2:
        raise ValueError("At least two loops are needed to compute a SIR")
    topology.check_loop_index(loop_index)
    gains = np.array(power_gains, dtype=float).reshape(-1)
    if gains.shape[0] != topology.k:
        raise ValueError("Expected %d power gains, got %d" % (topology.k, gains.shape[0]))
    if np.any(gains < 0):
        raise ValueError("Power gains must be >= 0")
    received = gains * topology.attenuations()
    interference = math.fsum(np.delete(received, loop_index))
    if interference == 0:
        raise UndefinedSIRError("Undefined SIR for loop %d: no interference power" % loop_index)
    return float(received[loop_index] / interference)

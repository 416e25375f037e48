# SPDX-License-Identifier: Apache-2.0
# Copyright Contributors to the WNCS project

import collections
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .channel import sample_power_gains, sample_rayleigh_amplitude, snr
from .constants import _METHODS
from .settings import WncsSettings, _check_positive_int, _check_seed

logger = logging.getLogger(__name__)


def make_generator(seed):
    """
    Return a random generator for the given seed.

    Generators are PCG64 bit generators (period 2^128) seeded through a
    :class:`numpy.random.SeedSequence`, so a seed always yields the same
    draws for a given numpy release.

    :param seed: A non-negative integer or a :class:`numpy.random.SeedSequence`.
    :returns: A :class:`numpy.random.Generator`.
    """
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.PCG64(seed))


class McConfig(object):
    """
    Monte Carlo sampling configuration.
    """
    def __init__(self, samples=None, seed=None, streams=None):
        """
        Instantiate a new :class:`McConfig`.

        Unset values are taken from the current settings.

        :param int samples: Number of channel realizations, >= 1.
        :param int seed: A 64 bits unsigned seed.
        :param int streams: Number of independent substreams, >= 1.
        :raises ValueError: For invalid values.
        """
        settings = WncsSettings()
        self._samples = _check_positive_int("samples", settings.samples if samples is None else samples)
        self._seed = _check_seed("seed", settings.seed if seed is None else seed)
        self._streams = _check_positive_int("streams", settings.streams if streams is None else streams)

    @property
    def samples(self):
        """
        Return the number of channel realizations.
        """
        return self._samples

    @property
    def seed(self):
        """
        Return the seed.
        """
        return self._seed

    @property
    def streams(self):
        """
        Return the number of independent substreams.
        """
        return self._streams

    def replace(self, **kwargs):
        """
        Return a copy of this configuration with the given values replaced.

        :returns: A new :class:`McConfig` instance.
        """
        values = {"samples": self._samples, "seed": self._seed, "streams": self._streams}
        values.update(kwargs)
        return McConfig(**values)

    def to_dict(self):
        """
        Return a dictionary representation of this configuration.
        """
        return {"samples": self._samples, "seed": self._seed, "streams": self._streams}

    def __eq__(self, other):
        if not isinstance(other, McConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self):
        return hash((self._samples, self._seed, self._streams))

    def __repr__(self):
        return "<McConfig samples=%d seed=%d streams=%d>" % (self._samples, self._seed, self._streams)


class McEstimate(collections.namedtuple("McEstimate", ["p_hat", "stderr", "samples"])):
    """
    An empirical probability with its binomial standard error.
    """
    __slots__ = ()

    @classmethod
    def from_counts(cls, successes, samples):
        """
        Build an estimate from a number of successes out of a number of draws.

        :param int successes: The number of draws for which the event held.
        :param int samples: The number of draws.
        :returns: A :class:`McEstimate` instance.
        """
        p_hat = successes / samples
        return cls(p_hat, math.sqrt(p_hat * (1.0 - p_hat) / samples), samples)

    def ci_halfwidth(self, z=3.0):
        """
        Return the half width of a z sigma confidence interval.

        :param float z: Number of standard errors.
        :returns: A float.
        """
        return z * self.stderr

    def agrees_with(self, value, z=3.0):
        """
        Return ``True`` if the given value is within z standard errors.

        :param float value: A probability to compare with.
        :param float z: Number of standard errors.
        :returns: A boolean.
        """
        return abs(self.p_hat - value) <= self.ci_halfwidth(z)

    def to_result(self, z=3.0):
        """
        Return this estimate as a reliability result.

        :param float z: Number of standard errors for the confidence interval.
        :returns: A :class:`ReliabilityResult` instance.
        """
        # Deferred import, reliability depends on the settings only.
        from .reliability import ReliabilityResult
        return ReliabilityResult(self.p_hat, _METHODS.MONTE_CARLO, ci_halfwidth=self.ci_halfwidth(z))

    def to_dict(self):
        """
        Return a dictionary representation of this estimate.
        """
        return {"p_hat": self.p_hat, "stderr": self.stderr, "samples": self.samples}


def _stream_sizes(samples, streams):
    """
    Split a number of draws between streams, first streams get the remainder.

    :returns: A list of integers.
    """
    base, remainder = divmod(samples, streams)
    return [base + (1 if i < remainder else 0) for i in range(streams)]


def _estimate(counter, mc):
    """
    Count successes over all the draws of a configuration.

    Draws are partitioned by stream, each stream having its own generator
    spawned from the configuration seed. Counts are merged by summation, so
    the result does not depend on the order in which streams complete.

    :param counter: A callable taking a generator and a number of draws and
                    returning the number of successes.
    :param mc: A :class:`McConfig` instance.
    :returns: A :class:`McEstimate` instance.
    """
    settings = WncsSettings()
    chunk_size = settings.chunk_size
    children = np.random.SeedSequence(mc.seed).spawn(mc.streams)
    sizes = _stream_sizes(mc.samples, mc.streams)

    def count_stream(index):
        rng = make_generator(children[index])
        remaining = sizes[index]
        successes = 0
        while remaining > 0:
            size = min(chunk_size, remaining)
            successes += int(counter(rng, size))
            remaining -= size
        logger.debug("Stream %d: %d successes out of %d" % (index, successes, sizes[index]))
        return successes

    if mc.streams == 1:
        successes = count_stream(0)
    else:
        with ThreadPoolExecutor(max_workers=settings.max_workers) as executor:
            # Results are yielded in submission order, summation is order insensitive anyway.
            successes = sum(executor.map(count_stream, range(mc.streams)))
    return McEstimate.from_counts(successes, mc.samples)


def estimate_beta_noise(params, unstable_product, mc=None):
    """
    Estimate the probability of stabilizability of a noise limited link.

    Counts Rayleigh fading draws for which log2(1 + SNR) >= log2(Pi), which
    is evaluated as SNR >= Pi - 1.

    :param params: A :class:`ChannelParams` instance.
    :param float unstable_product: The product of unstable eigenvalues, >= 1.
    :param mc: Optional :class:`McConfig`, defaults to the current settings.
    :returns: A :class:`McEstimate` instance.
    :raises ValueError: For products lower than 1.
    """
    if not unstable_product >= 1:
        raise ValueError("The product of unstable eigenvalues must be >= 1, not %s" % unstable_product)
    mc = mc or McConfig()
    threshold = unstable_product - 1.0

    def counter(rng, size):
        amplitudes = sample_rayleigh_amplitude(params.omega, rng, size)
        return np.count_nonzero(snr(params, amplitudes) >= threshold)

    estimate = _estimate(counter, mc)
    logger.debug("Noise limited estimate for pi=%g %s: %s" % (unstable_product, params, estimate))
    return estimate


def estimate_alpha_interference(topology, i, unstable_product, mc=None):
    """
    Estimate the reliability of a loop interfered by all other loops.

    Counts draws of independent unit mean exponential power gains for which
    SIR_i >= Pi - 1. Draws without any interference power are redrawn.

    :param topology: A :class:`LoopTopology` with at least two loops.
    :param int i: The 0 based index of the loop.
    :param float unstable_product: The product of unstable eigenvalues, >= 1.
    :param mc: Optional :class:`McConfig`, defaults to the current settings.
    :returns: A :class:`McEstimate` instance.
    :raises ValueError: For invalid inputs.
    """
    if topology.k < 2:
        raise ValueError("Interference needs at least two loops, got %d" % topology.k)
    topology.check_loop_index(i)
    if not unstable_product >= 1:
        raise ValueError("The product of unstable eigenvalues must be >= 1, not %s" % unstable_product)
    mc = mc or McConfig()
    threshold = unstable_product - 1.0
    attenuations = topology.attenuations()
    interferers = np.delete(np.arange(topology.k), i)

    def counter(rng, size):
        gains = sample_power_gains(rng, (size, topology.k))
        interference = gains[:, interferers].dot(attenuations[interferers])
        silent = interference == 0
        while np.any(silent):
            gains[silent] = sample_power_gains(rng, (int(np.count_nonzero(silent)), topology.k))
            interference = gains[:, interferers].dot(attenuations[interferers])
            silent = interference == 0
        # SIR_i >= threshold, without dividing.
        return np.count_nonzero(gains[:, i] * attenuations[i] >= threshold * interference)

    estimate = _estimate(counter, mc)
    logger.debug("Interference estimate for loop %d pi=%g %s: %s" % (i, unstable_product, topology, estimate))
    return estimate


def sweep(estimator, grid, mc=None):
    """
    Run an estimator over a grid of points.

    Each point is a dictionary of keyword arguments for the estimator. A point
    is evaluated with the seed ``mc.seed ^ point_index``, where the point
    index is the value of its optional "point_index" key, or its position in
    the grid. Estimates therefore don't depend on the evaluation order.

    :param estimator: :func:`estimate_beta_noise` or
                      :func:`estimate_alpha_interference`.
    :param grid: A non-empty list of dictionaries.
    :param mc: Optional :class:`McConfig`, defaults to the current settings.
    :returns: A list of :class:`McEstimate`, one per point.
    :raises ValueError: For an empty grid.
    """
    if not grid:
        raise ValueError("Cannot sweep an empty grid")
    mc = mc or McConfig()
    estimates = []
    for position, point in enumerate(grid):
        kwargs = dict(point)
        point_index = kwargs.pop("point_index", position)
        point_mc = mc.replace(seed=mc.seed ^ point_index)
        logger.debug("Sweeping point %d with %s" % (point_index, point_mc))
        estimates.append(estimator(mc=point_mc, **kwargs))
    return estimates

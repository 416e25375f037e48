# SPDX-License-Identifier: Apache-2.0
# Copyright Contributors to the WNCS project

import logging
import math

import numpy as np

from .channel import path_loss
from .constants import _CASES, _METHODS
from .errors import DomainError
from .settings import WncsSettings

logger = logging.getLogger(__name__)


class ReliabilityResult(object):
    """
    The reliability of a sensor to controller link, that is the probability
    that the link rate meets the stabilizability rate threshold.

    This probability is also the probability of asymptotic stabilizability
    of the loop.
    """
    def __init__(self, value, method, ci_halfwidth=0.0, underflow=False):
        """
        Instantiate a new :class:`ReliabilityResult`.

        :param float value: The probability, in [0, 1].
        :param method: A ``_METHODS`` member or its string value.
        :param float ci_halfwidth: Confidence interval half width, only
                                   allowed for Monte Carlo results.
        :param bool underflow: Whether the value was clamped to 0.
        :raises ValueError: For invalid values.
        """
        self._method = _METHODS(method) if not isinstance(method, _METHODS) else method
        value = float(value)
        if not 0.0 <= value <= 1.0:
            raise ValueError("Reliability must be in [0, 1], not %s" % value)
        ci_halfwidth = float(ci_halfwidth)
        if ci_halfwidth < 0:
            raise ValueError("Confidence interval half width must be >= 0, not %s" % ci_halfwidth)
        if ci_halfwidth and self._method != _METHODS.MONTE_CARLO:
            raise ValueError("Only Monte Carlo results have a confidence interval")
        self._value = value
        self._ci_halfwidth = ci_halfwidth
        self._underflow = bool(underflow)

    @property
    def value(self):
        """
        Return the probability.

        :returns: A float in [0, 1].
        """
        return self._value

    @property
    def method(self):
        """
        Return how the probability was obtained.

        :returns: A ``_METHODS`` member.
        """
        return self._method

    @property
    def ci_halfwidth(self):
        """
        Return the confidence interval half width, 0 for analytic results.

        :returns: A float.
        """
        return self._ci_halfwidth

    @property
    def underflow(self):
        """
        Return ``True`` if the value was clamped to 0 to avoid an underflow.

        :returns: A boolean.
        """
        return self._underflow

    @property
    def outage(self):
        """
        Return the outage probability, 1 - reliability.

        :returns: A float in [0, 1].
        """
        return 1.0 - self._value

    @property
    def nines(self):
        """
        Return the number of nines of this reliability, -log10(outage).

        :returns: A float, infinity for a zero outage.
        """
        if self.outage <= 0:
            return float("inf")
        return -math.log10(self.outage)

    def to_dict(self):
        """
        Return a JSON serializable representation of this result.

        :returns: A dictionary.
        """
        return {
            "value": self._value,
            "method": self._method.value,
            "ci_halfwidth": self._ci_halfwidth,
            "underflow": self._underflow,
        }

    def __eq__(self, other):
        if not isinstance(other, ReliabilityResult):
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
        return "<ReliabilityResult %s=%g>" % (self._method.value, self._value)


def _check_product(unstable_product, strict=False):
    """
    Check the given product of unstable eigenvalues.

    :raises ValueError: For values lower than 1, or equal to 1 if strict.
    """
    unstable_product = float(unstable_product)
    if strict and not unstable_product > 1:
        raise DomainError("The product of unstable eigenvalues must be > 1, not %s" % unstable_product)
    if not unstable_product >= 1:
        raise ValueError("The product of unstable eigenvalues must be >= 1, not %s" % unstable_product)
    return unstable_product


def _noise_exponent(params, unstable_product):
    """
    Return N_0 L_0 d^eta (Pi - 1) / (omega P_t), minus the log reliability
    of a noise limited link.
    """
    return params.n0 * path_loss(params) * (unstable_product - 1.0) / (params.omega * params.p_t)


def alpha_noise(params, unstable_product):
    """
    Return the reliability of a noise limited Rayleigh fading link.

    alpha = exp(-N_0 L_0 d^eta (Pi - 1) / (omega P_t))

    which is the Rayleigh CCDF evaluated at the amplitude needed to reach
    SNR = Pi - 1. With omega = 2 the denominator is 2 P_t.

    :param params: A :class:`ChannelParams` instance.
    :param float unstable_product: The product of unstable eigenvalues, >= 1.
    :returns: A :class:`ReliabilityResult` instance.
    """
    unstable_product = _check_product(unstable_product)
    exponent = _noise_exponent(params, unstable_product)
    limit = WncsSettings().exponent_limit
    if exponent > limit:
        logger.warning(
            "Exponent %g exceeds %g for pi=%g, %s, clamping reliability to 0" % (
                exponent, limit, unstable_product, params
            )
        )
        return ReliabilityResult(0.0, _METHODS.CLOSED_FORM_NOISE, underflow=True)
    return ReliabilityResult(math.exp(-exponent), _METHODS.CLOSED_FORM_NOISE)


def product_from_alpha(params, alpha):
    """
    Return the product of unstable eigenvalues matching a reliability.

    Pi = -(omega P_t / (N_0 L_0 d^eta)) ln(alpha) + 1

    :param params: A :class:`ChannelParams` instance.
    :param float alpha: A reliability in (0, 1].
    :returns: A float >= 1.
    :raises DomainError: If alpha is not in (0, 1].
    """
    if not 0 < alpha <= 1:
        raise DomainError("Reliability must be in (0, 1] to invert it, not %s" % alpha)
    return -(params.omega * params.p_t / (params.n0 * path_loss(params))) * math.log(alpha) + 1.0


def beta(plant_analysis, params):
    """
    Return the probability of asymptotic stabilizability of a plant over a
    noise limited link.

    It is the link reliability evaluated at the plant rate threshold.

    :param plant_analysis: An :class:`EigenAnalysis` instance.
    :param params: A :class:`ChannelParams` instance.
    :returns: A :class:`ReliabilityResult` instance.
    """
    return alpha_noise(params, plant_analysis.unstable_product)


def is_feasible(plant_analysis, params, beta_des):
    """
    Return ``True`` if a desired probability of stabilizability can be met.

    It can be met if and only if the link reliability at the plant rate
    threshold is at least the desired probability.

    :param plant_analysis: An :class:`EigenAnalysis` instance.
    :param params: A :class:`ChannelParams` instance.
    :param float beta_des: The desired probability, in [0, 1].
    :returns: A boolean.
    :raises ValueError: For invalid probabilities.
    """
    if not 0 <= beta_des <= 1:
        raise ValueError("Desired probability must be in [0, 1], not %s" % beta_des)
    return beta(plant_analysis, params).value >= beta_des


def _check_pair_topology(topology, loop_index):
    """
    Check the topology has at least two loops and the index is valid.

    :raises ValueError: For invalid inputs.
    """
    if topology.k < 2:
        raise ValueError("Interference needs at least two loops, got %d" % topology.k)
    topology.check_loop_index(loop_index)


def _interference_ratios(topology, loop_index):
    """
    Return (d_j / d_i)^-eta for every interferer j.

    :returns: A :class:`numpy.ndarray` with K - 1 values.
    """
    distances = np.array(topology.distances)
    others = np.delete(distances, loop_index)
    return np.power(others / distances[loop_index], -topology.eta)


def alpha_single_interference(topology, i, unstable_product):
    """
    Return the reliability of a loop interfered by a single other loop.

    alpha_i = 1 / (1 + (Pi - 1) (d_j / d_i)^-eta)

    :param topology: A :class:`LoopTopology` with exactly two loops.
    :param int i: The 0 based index of the loop.
    :param float unstable_product: The product of unstable eigenvalues, >= 1.
    :returns: A :class:`ReliabilityResult` instance.
    :raises ValueError: If the topology does not have exactly two loops.
    """
    if topology.k != 2:
        raise ValueError("The single interference case needs exactly two loops, got %d" % topology.k)
    topology.check_loop_index(i)
    unstable_product = _check_product(unstable_product)
    ratio = float(_interference_ratios(topology, i)[0])
    return ReliabilityResult(
        1.0 / (1.0 + (unstable_product - 1.0) * ratio),
        _METHODS.CLOSED_FORM_SINGLE_INTERF,
    )


def alpha_full_interference(topology, i, unstable_product):
    """
    Return the reliability of a loop interfered by all other loops, in its
    published form.

    alpha_i = d_i^-eta / (d_i^-eta + sum_{j != i} d_j^-eta (Pi - 1))

    This form is exact for two loops but over-estimates the reliability of
    independent Rayleigh interferers for more loops, see
    :func:`alpha_full_interference_exact`.

    :param topology: A :class:`LoopTopology` with at least two loops.
    :param int i: The 0 based index of the loop.
    :param float unstable_product: The product of unstable eigenvalues, >= 1.
    :returns: A :class:`ReliabilityResult` instance.
    """
    _check_pair_topology(topology, i)
    unstable_product = _check_product(unstable_product)
    attenuations = topology.attenuations()
    own = float(attenuations[i])
    others = math.fsum(np.delete(attenuations, i))
    return ReliabilityResult(
        own / (own + others * (unstable_product - 1.0)),
        _METHODS.CLOSED_FORM_FULL_INTERF,
    )


def alpha_full_interference_exact(topology, i, unstable_product):
    """
    Return the reliability of a loop interfered by all other loops, for
    independent unit mean exponential power gains.

    alpha_i = prod_{j != i} 1 / (1 + (Pi - 1) (d_j / d_i)^-eta)

    :param topology: A :class:`LoopTopology` with at least two loops.
    :param int i: The 0 based index of the loop.
    :param float unstable_product: The product of unstable eigenvalues, >= 1.
    :returns: A :class:`ReliabilityResult` instance.
    """
    _check_pair_topology(topology, i)
    unstable_product = _check_product(unstable_product)
    factors = 1.0 / (1.0 + (unstable_product - 1.0) * _interference_ratios(topology, i))
    return ReliabilityResult(float(np.prod(factors)), _METHODS.EXACT_PRODUCT_FORM)


def required_power(params_without_pt, unstable_product, target_alpha):
    """
    Return the transmit power needed for a noise limited link to reach a
    target reliability.

    P_t = -N_0 L_0 d^eta (Pi - 1) / (omega ln(target))

    :param params_without_pt: A :class:`ChannelParams` instance, its transmit
                              power is ignored.
    :param float unstable_product: The product of unstable eigenvalues, > 1.
    :param float target_alpha: The target reliability, in (0, 1).
    :returns: A float.
    :raises DomainError: If the target is not in (0, 1) or the product is 1.
    """
    if not 0 < target_alpha < 1:
        raise DomainError("Target reliability must be in (0, 1), not %s" % target_alpha)
    unstable_product = _check_product(unstable_product, strict=True)
    params = params_without_pt
    return -params.n0 * path_loss(params) * (unstable_product - 1.0) / (
        params.omega * math.log(target_alpha)
    )


def max_distance(params, unstable_product, target_alpha):
    """
    Return the largest sensor to controller distance for which a noise
    limited link reaches a target reliability.

    d = (-omega P_t ln(target) / (N_0 L_0 (Pi - 1)))^(1 / eta)

    :param params: A :class:`ChannelParams` instance, its distance is ignored.
    :param float unstable_product: The product of unstable eigenvalues, > 1.
    :param float target_alpha: The target reliability, in (0, 1).
    :returns: A float >= 1.
    :raises DomainError: If the target is not in (0, 1), the product is 1, or
                         the target can't be reached at the reference distance.
    """
    if not 0 < target_alpha < 1:
        raise DomainError("Target reliability must be in (0, 1), not %s" % target_alpha)
    unstable_product = _check_product(unstable_product, strict=True)
    scaled = -params.omega * params.p_t * math.log(target_alpha) / (
        params.n0 * params.l0 * (unstable_product - 1.0)
    )
    distance = scaled ** (1.0 / params.eta)
    if distance < 1.0:
        raise DomainError(
            "A reliability of %s can't be reached at the 1 m reference distance for pi=%s" % (
                target_alpha, unstable_product
            )
        )
    return distance


def alpha_for_case(case, unstable_product, params=None, topology=None, loop_index=0):
    """
    Return the analytic reliability for the given case.

    :param case: A ``_CASES`` member or its string value.
    :param float unstable_product: The product of unstable eigenvalues, >= 1.
    :param params: A :class:`ChannelParams` instance, needed for the noise
                   limited case.
    :param topology: A :class:`LoopTopology` instance, needed for
                     interference cases.
    :param int loop_index: The 0 based loop index for interference cases.
    :returns: A :class:`ReliabilityResult` instance.
    :raises ValueError: For unknown cases or missing inputs.
    """
    case = _CASES(case)
    if case == _CASES.NOISE:
        if params is None:
            raise ValueError("Channel parameters are needed for the %s case" % case.value)
        return alpha_noise(params, unstable_product)
    if topology is None:
        raise ValueError("A loop topology is needed for the %s case" % case.value)
    if case == _CASES.SINGLE_INTERFERENCE:
        return alpha_single_interference(topology, loop_index, unstable_product)
    if case == _CASES.FULL_INTERFERENCE:
        return alpha_full_interference(topology, loop_index, unstable_product)
    return alpha_full_interference_exact(topology, loop_index, unstable_product)

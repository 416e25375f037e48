# SPDX-License-Identifier: Apache-2.0
# Copyright Contributors to the WNCS project

import json
import logging
import math

import numpy as np

from .constants import _CHOLESKY_JITTER, _DETERMINANT_CHECK_RTOL
from .constants import _PSD_TOL, _SYMMETRY_TOL
from .errors import ConfigError, SpectrumError
from .montecarlo import make_generator
from .settings import WncsSettings

logger = logging.getLogger(__name__)


def _as_matrix(name, value):
    """
    Return the given value as a read-only 2D float array.

    :param str name: The matrix name, used in error messages.
    :param value: A nested sequence of numbers or an array.
    :returns: A :class:`numpy.ndarray`.
    :raises ValueError: If the value is not a 2D numeric matrix.
    """
    try:
        matrix = np.array(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise ValueError("%s must be a numeric matrix: %s" % (name, e))
    if matrix.ndim != 2:
        raise ValueError("%s must be a 2D matrix, not %dD" % (name, matrix.ndim))
    if not np.all(np.isfinite(matrix)):
        raise ValueError("%s must only contain finite values" % name)
    matrix.setflags(write=False)
    return matrix


class PlantModel(object):
    """
    A discrete-time linear time invariant plant.

    x[t + 1] = A x[t] + B u[t] + w[t]
    y[t] = C x[t]

    with w[t] a zero mean Gaussian process noise with covariance Sigma.
    Instances are immutable.
    """
    def __init__(self, a, b, c, sigma=None):
        """
        Instantiate a new :class:`PlantModel`.

        :param a: The M x M system matrix.
        :param b: The M x N input matrix. A flat sequence of M values is
                  treated as a single input column.
        :param c: The 1 x M measurement matrix. A flat sequence of M values
                  is treated as a single row.
        :param sigma: Optional M x M process noise covariance, defaults to zero.
        :raises ValueError: For inconsistent or invalid matrices.
        """
        super(PlantModel, self).__init__()
        self._a = _as_matrix("A", a)
        m_rows, m_cols = self._a.shape
        if m_rows != m_cols or m_rows < 1:
            raise ValueError("A must be a non-empty square matrix, not %dx%d" % (m_rows, m_cols))
        b = np.array(b, dtype=float)
        if b.ndim == 1:
            b = b.reshape((-1, 1))
        self._b = _as_matrix("B", b)
        if self._b.shape[0] != m_rows or self._b.shape[1] < 1:
            raise ValueError("B must have %d rows and at least one column, not %dx%d" % (
                m_rows, self._b.shape[0], self._b.shape[1]
            ))
        c = np.array(c, dtype=float)
        if c.ndim == 1:
            c = c.reshape((1, -1))
        self._c = _as_matrix("C", c)
        if self._c.shape != (1, m_rows):
            raise ValueError("C must be 1x%d, not %dx%d" % (m_rows, self._c.shape[0], self._c.shape[1]))
        if sigma is None:
            sigma = np.zeros((m_rows, m_rows))
        self._sigma = _as_matrix("Sigma", sigma)
        if self._sigma.shape != (m_rows, m_rows):
            raise ValueError("Sigma must be %dx%d, not %dx%d" % (
                m_rows, m_rows, self._sigma.shape[0], self._sigma.shape[1]
            ))
        if not np.allclose(self._sigma, self._sigma.T, rtol=0, atol=_SYMMETRY_TOL):
            raise ValueError("Sigma must be symmetric")
        if np.any(np.linalg.eigvalsh(self._sigma) < -_PSD_TOL):
            raise ValueError("Sigma must be positive semidefinite")

    @classmethod
    def from_dict(cls, data):
        """
        Build a plant from a dictionary with "A", "B", "C" and optional "Sigma"
        keys, each a row-major nested list of numbers.

        :param dict data: A dictionary, typically loaded from a JSON file.
        :returns: A :class:`PlantModel` instance.
        :raises ConfigError: For missing, unknown or invalid entries.
        """
        if not isinstance(data, dict):
            raise ConfigError("a plant must be a JSON object")
        for key in data:
            if key not in ("A", "B", "C", "Sigma"):
                raise ConfigError("unknown plant entry", key)
        for key in ("A", "B", "C"):
            if key not in data:
                raise ConfigError("missing required plant entry", key)
        try:
            return cls(data["A"], data["B"], data["C"], data.get("Sigma"))
        except ValueError as e:
            raise ConfigError("invalid plant: %s" % e)

    @property
    def a(self):
        """
        Return the system matrix.

        :returns: A read-only M x M :class:`numpy.ndarray`.
        """
        return self._a

    @property
    def b(self):
        """
        Return the input matrix.

        :returns: A read-only M x N :class:`numpy.ndarray`.
        """
        return self._b

    @property
    def c(self):
        """
        Return the measurement matrix.

        :returns: A read-only 1 x M :class:`numpy.ndarray`.
        """
        return self._c

    @property
    def sigma(self):
        """
        Return the process noise covariance.

        :returns: A read-only M x M :class:`numpy.ndarray`.
        """
        return self._sigma

    @property
    def m(self):
        """
        Return the number of states.

        :returns: An integer.
        """
        return self._a.shape[0]

    @property
    def n(self):
        """
        Return the number of inputs.

        :returns: An integer.
        """
        return self._b.shape[1]

    def __repr__(self):
        return "<PlantModel M=%d N=%d>" % (self.m, self.n)


def load_plant(path):
    """
    Load a plant from a JSON file.

    :param str path: Full path to the JSON file.
    :returns: A :class:`PlantModel` instance.
    :raises ConfigError: If the file can't be read or is invalid.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.loads(f.read())
    except (IOError, OSError) as e:
        raise ConfigError("unable to read plant file %s: %s" % (path, e))
    except ValueError as e:
        raise ConfigError("invalid JSON in plant file %s: %s" % (path, e))
    plant = PlantModel.from_dict(data)
    logger.debug("Loaded %s from %s" % (plant, path))
    return plant


def rate_threshold(unstable_product):
    """
    Return the minimum transmission rate, in bits per symbol, for a product
    of unstable eigenvalue magnitudes.

    :param float unstable_product: A product of magnitudes, >= 1.
    :returns: A float.
    :raises ValueError: If the product is lower than 1.
    """
    if not unstable_product >= 1:
        raise ValueError("The product of unstable eigenvalues must be >= 1, not %s" % unstable_product)
    return math.log2(unstable_product)


class EigenAnalysis(object):
    """
    Eigenvalue magnitudes of a system matrix, the product of the unstable ones
    and the matching transmission rate threshold.
    """
    def __init__(self, magnitudes, unstable_product, rate_threshold_bits):
        """
        Instantiate a new :class:`EigenAnalysis`.

        :param magnitudes: Eigenvalue magnitudes, in decreasing order.
        :param float unstable_product: Product of the unstable magnitudes.
        :param float rate_threshold_bits: log2 of the unstable product.
        """
        self._magnitudes = tuple(float(x) for x in magnitudes)
        self._unstable_product = float(unstable_product)
        self._rate_threshold_bits = float(rate_threshold_bits)

    @property
    def magnitudes(self):
        """
        Return all eigenvalue magnitudes, largest first.

        :returns: A tuple of floats.
        """
        return self._magnitudes

    @property
    def unstable_product(self):
        """
        Return the product of the unstable eigenvalue magnitudes.

        :returns: A float >= 1, 1 when there is no unstable mode.
        """
        return self._unstable_product

    @property
    def rate_threshold_bits(self):
        """
        Return the minimum rate, in bits per symbol, needed for stabilizability.

        :returns: A float >= 0.
        """
        return self._rate_threshold_bits

    @property
    def stable(self):
        """
        Return ``True`` if the system matrix has no unstable mode.

        :returns: A boolean.
        """
        return self._unstable_product == 1.0

    def to_dict(self):
        """
        Return a JSON serializable representation of this analysis.

        :returns: A dictionary.
        """
        return {
            "magnitudes": list(self._magnitudes),
            "unstable_product": self._unstable_product,
            "rate_threshold_bits": self._rate_threshold_bits,
        }

    def __repr__(self):
        return "<EigenAnalysis pi=%g r_th=%g>" % (self._unstable_product, self._rate_threshold_bits)


def eigen_analyze(plant, tol=None):
    """
    Compute the eigenvalue spectrum of the plant system matrix.

    Eigenvalues are computed with LAPACK's dense non-symmetric solver
    (Hessenberg reduction followed by shifted QR iterations). Complex
    eigenvalues contribute their modulus. A magnitude is unstable if it
    exceeds 1 + tol.

    :param plant: A :class:`PlantModel` instance.
    :param float tol: Optional classification slack, defaults to the
                      ``eigen_tol`` setting.
    :returns: An :class:`EigenAnalysis` instance.
    :raises ValueError: For a negative tolerance.
    :raises SpectrumError: If the spectrum could not be computed.
    """
    if tol is None:
        tol = WncsSettings().eigen_tol
    if tol < 0:
        raise ValueError("Tolerance must be >= 0, not %s" % tol)
    try:
        eigenvalues = np.linalg.eigvals(plant.a)
    except np.linalg.LinAlgError as e:
        raise SpectrumError("Spectrum not computed: %s" % e)
    magnitudes = np.sort(np.abs(eigenvalues))[::-1]
    if not np.all(np.isfinite(magnitudes)):
        raise SpectrumError("Spectrum not computed: non finite eigenvalues for %s" % plant)
    # The determinant is the product of the eigenvalues.
    abs_det = abs(np.linalg.det(plant.a))
    scale = max(1.0, float(np.max(np.abs(plant.a)))) ** plant.m
    if not math.isclose(abs_det, float(np.prod(magnitudes)), rel_tol=_DETERMINANT_CHECK_RTOL, abs_tol=1e-12 * scale):
        raise SpectrumError(
            "Spectrum not computed: |det(A)| = %g does not match the eigenvalues product %g" % (
                abs_det, np.prod(magnitudes)
            )
        )
    unstable = magnitudes[magnitudes > 1.0 + tol]
    # Empty product convention.
    unstable_product = float(np.prod(unstable)) if unstable.size else 1.0
    logger.debug("%d unstable mode(s) out of %d for %s" % (unstable.size, plant.m, plant))
    return EigenAnalysis(
        magnitudes,
        unstable_product,
        math.log2(unstable_product),
    )


class StateTrajectory(object):
    """
    States, inputs and outputs of a simulated plant.
    """
    def __init__(self, states, inputs, outputs):
        """
        Instantiate a new :class:`StateTrajectory`.

        :param states: A (T + 1) x M array.
        :param inputs: A T x N array.
        :param outputs: A T + 1 array.
        :raises ValueError: For inconsistent lengths.
        """
        self._states = np.array(states, dtype=float)
        self._inputs = np.array(inputs, dtype=float)
        self._outputs = np.array(outputs, dtype=float)
        horizon = self._inputs.shape[0]
        if self._states.shape[0] != horizon + 1 or self._outputs.shape[0] != horizon + 1:
            raise ValueError(
                "Inconsistent trajectory lengths: %d states, %d inputs, %d outputs" % (
                    self._states.shape[0], horizon, self._outputs.shape[0]
                )
            )
        for array in (self._states, self._inputs, self._outputs):
            array.setflags(write=False)

    @property
    def states(self):
        """
        Return the states x[0..T].

        :returns: A read-only (T + 1) x M :class:`numpy.ndarray`.
        """
        return self._states

    @property
    def inputs(self):
        """
        Return the inputs u[0..T-1].

        :returns: A read-only T x N :class:`numpy.ndarray`.
        """
        return self._inputs

    @property
    def outputs(self):
        """
        Return the measurements y[0..T].

        :returns: A read-only T + 1 :class:`numpy.ndarray`.
        """
        return self._outputs

    @property
    def horizon(self):
        """
        Return the number of simulated steps.

        :returns: An integer.
        """
        return self._inputs.shape[0]

    def __len__(self):
        return self.horizon


def _as_vector(name, value, size):
    """
    Return the given value as a float vector of the given size.

    :raises ValueError: For a size mismatch.
    """
    vector = np.array(value, dtype=float).reshape(-1)
    if vector.shape[0] != size:
        raise ValueError("%s must have %d entries, not %d" % (name, size, vector.shape[0]))
    return vector


def step(plant, x, u, w):
    """
    Advance the plant by one step.

    :param plant: A :class:`PlantModel` instance.
    :param x: The current state, M values.
    :param u: The control input, N values.
    :param w: The process noise, M values.
    :returns: A (next state, measurement) tuple, the measurement being taken
              on the current state.
    :raises ValueError: For dimension mismatches.
    """
    x = _as_vector("x", x, plant.m)
    u = _as_vector("u", u, plant.n)
    w = _as_vector("w", w, plant.m)
    x_next = plant.a.dot(x) + plant.b.dot(u) + w
    y = float(plant.c.dot(x)[0])
    return x_next, y


def _noise_factor(sigma):
    """
    Return a matrix L with L L^T = Sigma, or ``None`` for a zero covariance.

    :param sigma: A positive semidefinite covariance matrix.
    :returns: A :class:`numpy.ndarray` or ``None``.
    """
    if not np.any(sigma):
        return None
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        logger.warning("Noise covariance is only semidefinite, adding %g diagonal jitter" % _CHOLESKY_JITTER)
        return np.linalg.cholesky(sigma + _CHOLESKY_JITTER * np.eye(sigma.shape[0]))


def simulate(plant, x0, gain=None, horizon=1, noise_seed=None):
    """
    Simulate the plant over the given horizon.

    If a gain K is given, the control input is u[t] = -K x[t], otherwise it
    is zero. Without a noise seed the process noise is zero, otherwise it is
    drawn from N(0, Sigma) with a generator seeded with the given seed.

    :param plant: A :class:`PlantModel` instance.
    :param x0: The initial state, M values.
    :param gain: Optional N x M feedback gain.
    :param int horizon: The number of steps to simulate, >= 1.
    :param int noise_seed: Optional seed for the process noise.
    :returns: A :class:`StateTrajectory` instance.
    :raises ValueError: For invalid dimensions or horizon.
    """
    if isinstance(horizon, bool) or not isinstance(horizon, (int, np.integer)) or horizon < 1:
        raise ValueError("Horizon must be an integer >= 1, not %r" % (horizon,))
    horizon = int(horizon)
    x = _as_vector("x0", x0, plant.m)
    if gain is not None:
        gain = np.array(gain, dtype=float)
        if gain.ndim == 1 and plant.n == 1:
            gain = gain.reshape((1, -1))
        if gain.shape != (plant.n, plant.m):
            raise ValueError("Gain must be %dx%d, not %s" % (plant.n, plant.m, "x".join(str(s) for s in gain.shape)))
    factor = None
    rng = None
    if noise_seed is not None:
        factor = _noise_factor(plant.sigma)
        rng = make_generator(noise_seed)
    states = [x]
    inputs = []
    outputs = []
    zero_u = np.zeros(plant.n)
    zero_w = np.zeros(plant.m)
    for _ in range(horizon):
        u = -gain.dot(x) if gain is not None else zero_u
        w = factor.dot(rng.standard_normal(plant.m)) if factor is not None else zero_w
        x, y = step(plant, x, u, w)
        states.append(x)
        inputs.append(u)
        outputs.append(y)
    # Last measurement, on the final state.
    outputs.append(float(plant.c.dot(x)[0]))
    return StateTrajectory(states, np.reshape(inputs, (horizon, plant.n)), outputs)

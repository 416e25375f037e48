# SPDX-License-Identifier: Apache-2.0
# Copyright Contributors to the WNCS project

import collections
import copy
import csv
import json
import logging

import numpy as np

from .channel import ChannelParams, LoopTopology
from .constants import _CASES, _MODES, _MODE_ALIASES, _PRESETS, _CHANNEL_FIELDS, _SWEEP_VARIABLES
from .constants import _NOISE_COORDINATES, _INTERFERENCE_COORDINATES, _VALUE_COLUMNS
from .constants import _CSV_SIGNIFICANT_DIGITS, _PRESET_PI_START, _PRESET_PI_STOP, _PRESET_PI_POINTS
from .errors import ConfigError, WncsError
from .montecarlo import McConfig, estimate_alpha_interference, estimate_beta_noise, sweep
from .plant import rate_threshold
from .reliability import alpha_for_case, alpha_full_interference_exact

logger = logging.getLogger(__name__)

_CONFIG_KEYS = [
    "name", "case", "sweep_variable", "sweep_values", "fixed",
    "topology", "loop_index", "pi_values", "mode", "mc",
]

# Coordinates which are rendered and parsed as integers.
_INTEGER_COORDINATES = ["loop_index", "k"]

# A single evaluated scenario point. Coordinates is an ordered dictionary of
# the inputs, values are None when they were not computed.
SweepRow = collections.namedtuple(
    "SweepRow", ["coordinates", "alpha_closed", "alpha_exact", "alpha_mc", "mc_stderr"]
)


def preset_pi_values():
    """
    Return the Pi axis shared by presets, geometrically spaced points.

    :returns: A list of floats.
    """
    return [float(x) for x in np.geomspace(_PRESET_PI_START, _PRESET_PI_STOP, _PRESET_PI_POINTS)]


def _check_ascending(values, field_path, minimum=None):
    """
    Check the given values are a non-empty strictly ascending list of numbers.

    :param values: The values to check.
    :param str field_path: Path to the values in their document.
    :param float minimum: Optional inclusive lower bound.
    :returns: A tuple of floats.
    :raises ConfigError: For invalid values.
    """
    if not isinstance(values, (list, tuple)):
        raise ConfigError("must be a list", field_path)
    if not values:
        raise ConfigError("must not be empty", field_path)
    checked = []
    for i, value in enumerate(values):
        path = "%s[%d]" % (field_path, i)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
            raise ConfigError("must be a finite number, not %r" % (value,), path)
        if minimum is not None and value < minimum:
            raise ConfigError("must be >= %s, not %s" % (minimum, value), path)
        if checked and not value > checked[-1]:
            raise ConfigError("values must be strictly ascending", path)
        checked.append(float(value))
    return tuple(checked)


def _parse_mode(value, field_path="mode"):
    """
    Return the ``_MODES`` member for a mode name or one of its aliases.

    :raises ConfigError: For unknown modes.
    """
    if isinstance(value, _MODES):
        return value
    if not isinstance(value, str):
        raise ConfigError("must be a string, not %r" % (value,), field_path)
    try:
        return _MODES(_MODE_ALIASES.get(value, value))
    except ValueError:
        raise ConfigError(
            "unknown mode %r, expected one of %s" % (
                value, ", ".join(sorted(set([m.value for m in _MODES]) | set(_MODE_ALIASES)))
            ),
            field_path,
        )


def _parse_mc(data, field_path="mc"):
    """
    Return a :class:`McConfig` from a dictionary.

    :raises ConfigError: For unknown keys or invalid values.
    """
    if not isinstance(data, dict):
        raise ConfigError("must be an object", field_path)
    for key in data:
        if key not in ("samples", "seed", "streams"):
            raise ConfigError("unknown Monte Carlo setting", "%s.%s" % (field_path, key))
    try:
        return McConfig(**data)
    except ConfigError as e:
        raise ConfigError(e.message, "%s.%s" % (field_path, e.field_path))


class ScenarioConfig(object):
    """
    A parameter sweep over a reliability case.

    Noise limited scenarios sweep a channel parameter, or Pi, around fixed
    channel parameters. Interference scenarios sweep the path loss exponent,
    or Pi, for a loop of a topology. When a channel parameter is swept, a
    curve is evaluated for each Pi value.
    """
    def __init__(
        self,
        sweep_variable,
        sweep_values,
        fixed=None,
        pi_values=None,
        mode=_MODES.CLOSED_FORM,
        mc=None,
        case=_CASES.NOISE,
        topology=None,
        loop_index=0,
        name=None,
    ):
        """
        Instantiate a new :class:`ScenarioConfig`.

        :param str sweep_variable: One of "p_t", "d", "eta" or "pi".
        :param sweep_values: A strictly ascending list of values.
        :param dict fixed: Channel parameters, minus the swept one, for the
                           noise limited case.
        :param pi_values: A strictly ascending list of Pi values >= 1, needed
                          unless Pi is swept.
        :param mode: A ``_MODES`` member, or its string value or alias.
        :param mc: Optional :class:`McConfig`, defaults to the settings.
        :param case: A ``_CASES`` member or its string value.
        :param topology: A :class:`LoopTopology` for interference cases.
        :param int loop_index: The 0 based loop index for interference cases.
        :param str name: Optional name for this scenario.
        :raises ConfigError: For invalid values, with the path to the
                             offending field.
        """
        try:
            self._case = _CASES(case)
        except ValueError:
            raise ConfigError(
                "unknown case %r, expected one of %s" % (case, ", ".join([c.value for c in _CASES])),
                "case",
            )
        if sweep_variable not in _SWEEP_VARIABLES:
            raise ConfigError(
                "unknown sweep variable %r, expected one of %s" % (sweep_variable, ", ".join(_SWEEP_VARIABLES)),
                "sweep_variable",
            )
        self._sweep_variable = sweep_variable
        self._sweep_values = _check_ascending(
            sweep_values, "sweep_values", minimum=1 if sweep_variable in ("pi", "d") else None
        )
        if sweep_variable == "pi":
            if pi_values:
                raise ConfigError("can't be set when sweeping pi", "pi_values")
            self._pi_values = None
        else:
            if pi_values is None:
                raise ConfigError("missing required value when sweeping %s" % sweep_variable, "pi_values")
            self._pi_values = _check_ascending(pi_values, "pi_values", minimum=1)
        self._mode = _parse_mode(mode)
        self._mc = mc
        self._name = name or "scenario"
        self._fixed = None
        self._topology = None
        self._loop_index = None
        if self._case == _CASES.NOISE:
            if topology is not None:
                raise ConfigError("only allowed for interference cases", "topology")
            self._fixed = self._check_fixed(fixed)
        else:
            if fixed is not None:
                raise ConfigError("only allowed for the noise case", "fixed")
            self._topology, self._loop_index = self._check_topology(topology, loop_index)

    def _check_fixed(self, fixed):
        """
        Check fixed channel parameters for the noise limited case.

        :returns: A dictionary.
        :raises ConfigError: For invalid values.
        """
        if not isinstance(fixed, dict):
            raise ConfigError("must be an object", "fixed")
        for key in fixed:
            if key not in _CHANNEL_FIELDS:
                raise ConfigError("unknown channel parameter", "fixed.%s" % key)
            if key == self._sweep_variable:
                raise ConfigError("swept parameters can't be fixed", "fixed.%s" % key)
        for key in _CHANNEL_FIELDS:
            if key != "omega" and key != self._sweep_variable and key not in fixed:
                raise ConfigError("missing required value", "fixed.%s" % key)
        fixed = dict(fixed)
        # Validate every swept value against the fixed parameters.
        for i, value in enumerate(self._sweep_values):
            params = dict(fixed)
            if self._sweep_variable != "pi":
                params[self._sweep_variable] = value
            try:
                ChannelParams(**params)
            except ValueError as e:
                if self._sweep_variable == "pi":
                    raise ConfigError("%s" % e, "fixed")
                raise ConfigError("%s" % e, "sweep_values[%d]" % i)
        return fixed

    def _check_topology(self, topology, loop_index):
        """
        Check the topology and loop index for interference cases.

        :returns: A (:class:`LoopTopology`, int) tuple.
        :raises ConfigError: For invalid values.
        """
        if self._sweep_variable not in ("eta", "pi"):
            raise ConfigError(
                "interference cases can only sweep eta or pi, not %s" % self._sweep_variable,
                "sweep_variable",
            )
        if topology is None:
            raise ConfigError("missing required value", "topology")
        if isinstance(topology, dict):
            topology = dict(topology)
            if self._sweep_variable == "eta" and "eta" not in topology:
                topology["eta"] = self._sweep_values[0]
            topology = LoopTopology.from_dict(topology)
        if not isinstance(topology, LoopTopology):
            raise ConfigError("must be an object", "topology")
        if self._case == _CASES.SINGLE_INTERFERENCE and topology.k != 2:
            raise ConfigError("exactly two loops are needed, got %d" % topology.k, "topology.distances")
        if topology.k < 2:
            raise ConfigError("at least two loops are needed, got %d" % topology.k, "topology.distances")
        try:
            topology.check_loop_index(loop_index)
        except ValueError as e:
            raise ConfigError("%s" % e, "loop_index")
        if self._sweep_variable == "eta":
            for i, value in enumerate(self._sweep_values):
                if not value > 0:
                    raise ConfigError("eta must be > 0, not %s" % value, "sweep_values[%d]" % i)
        return topology, loop_index

    @classmethod
    def from_dict(cls, data):
        """
        Build a scenario from a dictionary, typically read from a JSON file.

        :param dict data: A dictionary, see the README for its schema.
        :returns: A :class:`ScenarioConfig` instance.
        :raises ConfigError: For invalid documents.
        """
        if not isinstance(data, dict):
            raise ConfigError("scenario config must be a JSON object")
        for key in data:
            if key not in _CONFIG_KEYS:
                raise ConfigError("unknown scenario entry", key)
        for key in ("sweep_variable", "sweep_values"):
            if key not in data:
                raise ConfigError("missing required value", key)
        mc = data.get("mc")
        if mc is not None:
            mc = _parse_mc(mc)
        return cls(
            data["sweep_variable"],
            data["sweep_values"],
            fixed=data.get("fixed"),
            pi_values=data.get("pi_values"),
            mode=data.get("mode", _MODES.CLOSED_FORM),
            mc=mc,
            case=data.get("case", _CASES.NOISE.value),
            topology=data.get("topology"),
            loop_index=data.get("loop_index", 0),
            name=data.get("name"),
        )

    @classmethod
    def from_file(cls, path):
        """
        Load a scenario from a JSON file.

        :param str path: Full path to the JSON file.
        :returns: A :class:`ScenarioConfig` instance.
        :raises ConfigError: If the file can't be read or is invalid.
        """
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.loads(f.read())
        except (IOError, OSError) as e:
            raise ConfigError("unable to read scenario file %s: %s" % (path, e))
        except ValueError as e:
            raise ConfigError("invalid JSON in scenario file %s: %s" % (path, e))
        return cls.from_dict(data)

    @classmethod
    def from_preset(cls, preset):
        """
        Return a builtin scenario.

        :param str preset: A preset key, e.g. "1", or its name, e.g. "scenario1".
        :returns: A :class:`ScenarioConfig` instance.
        :raises ConfigError: For unknown presets.
        """
        data = _PRESETS.get(preset)
        if data is None:
            for value in _PRESETS.values():
                if value["name"] == preset:
                    data = value
                    break
            else:
                raise ConfigError(
                    "unknown preset %r, expected one of %s" % (preset, ", ".join(sorted(_PRESETS))),
                    "preset",
                )
        data = copy.deepcopy(data)
        if data["sweep_variable"] != "pi" and "pi_values" not in data:
            data["pi_values"] = preset_pi_values()
        return cls.from_dict(data)

    @property
    def name(self):
        """
        Return the name of this scenario.
        """
        return self._name

    @property
    def case(self):
        """
        Return the reliability case.

        :returns: A ``_CASES`` member.
        """
        return self._case

    @property
    def sweep_variable(self):
        """
        Return the swept variable name.
        """
        return self._sweep_variable

    @property
    def sweep_values(self):
        """
        Return the swept values.

        :returns: A tuple of floats.
        """
        return self._sweep_values

    @property
    def fixed(self):
        """
        Return the fixed channel parameters, ``None`` for interference cases.

        :returns: A dictionary or ``None``.
        """
        return dict(self._fixed) if self._fixed is not None else None

    @property
    def topology(self):
        """
        Return the loop topology, ``None`` for the noise limited case.
        """
        return self._topology

    @property
    def loop_index(self):
        """
        Return the evaluated loop index, ``None`` for the noise limited case.
        """
        return self._loop_index

    @property
    def pi_values(self):
        """
        Return the Pi values, ``None`` when Pi is swept.

        :returns: A tuple of floats or ``None``.
        """
        return self._pi_values

    @property
    def mode(self):
        """
        Return the evaluation mode.

        :returns: A ``_MODES`` member.
        """
        return self._mode

    @mode.setter
    def mode(self, value):
        """
        Set the evaluation mode.

        :param value: A ``_MODES`` member, or its string value or alias.
        :raises ConfigError: For unknown modes.
        """
        self._mode = _parse_mode(value)

    @property
    def mc(self):
        """
        Return the Monte Carlo configuration, ``None`` to use the settings.
        """
        return self._mc

    @mc.setter
    def mc(self, value):
        """
        Set the Monte Carlo configuration.

        :param value: A :class:`McConfig` instance or ``None``.
        """
        self._mc = value

    @property
    def points(self):
        """
        Return the evaluated (pi, sweep value) pairs, ordered by Pi and
        then by sweep value.

        :returns: A list of tuples, the sweep value is ``None`` when Pi is swept.
        """
        if self._sweep_variable == "pi":
            return [(pi, None) for pi in self._sweep_values]
        return [(pi, value) for pi in self._pi_values for value in self._sweep_values]

    @property
    def fieldnames(self):
        """
        Return the CSV columns for the rows of this scenario.

        :returns: A list of strings.
        """
        if self._case == _CASES.NOISE:
            coordinates = list(_NOISE_COORDINATES)
        else:
            coordinates = list(_INTERFERENCE_COORDINATES)
        values = list(_VALUE_COLUMNS)
        if self._case != _CASES.FULL_INTERFERENCE:
            values.remove("alpha_exact")
        return coordinates + values

    def __repr__(self):
        return "<ScenarioConfig %s %s over %s (%d points)>" % (
            self._name, self._case.value, self._sweep_variable, len(self.points)
        )


def _channel_params(config, value):
    """
    Return the channel parameters of a noise limited point.
    """
    params = config.fixed
    if config.sweep_variable != "pi":
        params[config.sweep_variable] = value
    return ChannelParams(**params)


def _point_topology(config, value):
    """
    Return the loop topology of an interference point.
    """
    if config.sweep_variable == "eta":
        return config.topology.replace(eta=value)
    return config.topology


def run_scenario(config):
    """
    Evaluate all the points of a scenario.

    :param config: A :class:`ScenarioConfig` instance.
    :returns: A list of :class:`SweepRow`, ordered by Pi and then by sweep value.
    """
    closed = config.mode in (_MODES.CLOSED_FORM, _MODES.BOTH)
    sampled = config.mode in (_MODES.MONTE_CARLO, _MODES.BOTH)
    logger.info("Running %s in %s mode" % (config, config.mode.value))
    coordinates = []
    closed_values = []
    exact_values = []
    grid = []
    for point_index, (pi, value) in enumerate(config.points):
        alpha_closed = alpha_exact = None
        if config.case == _CASES.NOISE:
            params = _channel_params(config, value)
            coordinates.append(collections.OrderedDict(
                [("pi", pi)] + [(key, getattr(params, key)) for key in _NOISE_COORDINATES[1:]]
            ))
            if closed:
                alpha_closed = alpha_for_case(config.case, pi, params=params).value
            grid.append({"params": params, "unstable_product": pi, "point_index": point_index})
        else:
            topology = _point_topology(config, value)
            coordinates.append(collections.OrderedDict([
                ("pi", pi),
                ("eta", topology.eta),
                ("loop_index", config.loop_index),
                ("k", topology.k),
                ("d_i", topology.distances[config.loop_index]),
            ]))
            if closed:
                alpha_closed = alpha_for_case(
                    config.case, pi, topology=topology, loop_index=config.loop_index
                ).value
                if config.case == _CASES.FULL_INTERFERENCE:
                    alpha_exact = alpha_full_interference_exact(topology, config.loop_index, pi).value
            grid.append({
                "topology": topology, "i": config.loop_index,
                "unstable_product": pi, "point_index": point_index
            })
        closed_values.append(alpha_closed)
        exact_values.append(alpha_exact)

    estimates = [None] * len(grid)
    if sampled:
        estimator = estimate_beta_noise if config.case == _CASES.NOISE else estimate_alpha_interference
        estimates = sweep(estimator, grid, config.mc or McConfig())

    rows = []
    for coords, alpha_closed, alpha_exact, estimate in zip(coordinates, closed_values, exact_values, estimates):
        rows.append(SweepRow(
            coords,
            alpha_closed,
            alpha_exact,
            estimate.p_hat if estimate else None,
            estimate.stderr if estimate else None,
        ))
    logger.debug("Evaluated %d rows for %s" % (len(rows), config.name))
    return rows


def table1(products):
    """
    Return the stabilizability rate threshold for products of unstable
    eigenvalues.

    :param products: A list of products, each >= 1.
    :returns: A list of (pi, r_th) tuples.
    :raises ValueError: For products lower than 1.
    """
    return [(float(pi), rate_threshold(pi)) for pi in products]


def format_number(value):
    """
    Render a value for CSV and text output.

    :param value: A number, a string or ``None``.
    :returns: A string, empty for ``None``.
    """
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return "%d" % value
    return "%.*g" % (_CSV_SIGNIFICANT_DIGITS, value)


def row_to_dict(row):
    """
    Return a flat ordered dictionary with the coordinates and values of a row.

    :param row: A :class:`SweepRow` instance.
    :returns: A :class:`collections.OrderedDict`.
    """
    record = collections.OrderedDict(row.coordinates)
    for column in _VALUE_COLUMNS:
        record[column] = getattr(row, column)
    return record


def _row_fieldnames(rows):
    """
    Return CSV columns derived from a list of rows.
    """
    if not rows:
        coordinates = list(_NOISE_COORDINATES)
    else:
        coordinates = list(rows[0].coordinates.keys())
    values = list(_VALUE_COLUMNS)
    if not any(row.alpha_exact is not None for row in rows):
        values.remove("alpha_exact")
    return coordinates + values


def write_records(records, csv_handle, fieldnames):
    """
    Write dictionaries as CSV lines to an open stream, header first.

    :param records: A list of dictionaries.
    :param csv_handle: A text stream opened with ``newline=""``.
    :param fieldnames: The list of columns to write.
    """
    csv_writer = csv.writer(csv_handle, lineterminator="\n")
    csv_writer.writerow(fieldnames)
    for record in records:
        csv_writer.writerow([format_number(record.get(field)) for field in fieldnames])


def emit_records(records, path, fieldnames):
    """
    Write dictionaries to a CSV file.

    :param records: A list of dictionaries.
    :param str path: Full path to the CSV file to write.
    :param fieldnames: The list of columns to write.
    :raises WncsError: If the file can't be written.
    """
    try:
        with open(path, "w", encoding="utf-8", newline="") as csv_handle:
            write_records(records, csv_handle, fieldnames)
    except (IOError, OSError) as e:
        raise WncsError("Unable to write CSV file %s: %s" % (path, e))
    logger.info("%d rows written to %s" % (len(records), path))


def emit_csv(rows, path, fieldnames=None):
    """
    Write rows to a CSV file.

    The file has a header line and one line per row, in the given order.
    Numbers are written with 9 significant digits, missing values as empty
    fields.

    :param rows: A list of :class:`SweepRow`.
    :param str path: Full path to the CSV file to write.
    :param fieldnames: Optional list of columns, derived from the rows if
                       not set.
    :raises WncsError: If the file can't be written.
    """
    emit_records([row_to_dict(row) for row in rows], path, fieldnames or _row_fieldnames(rows))


def read_csv(path):
    """
    Read rows from a CSV file written by :func:`emit_csv`.

    :param str path: Full path to the CSV file to read.
    :returns: A list of :class:`SweepRow`.
    :raises WncsError: If the file can't be read or is invalid.
    """
    rows = []
    try:
        with open(path, "r", encoding="utf-8", newline="") as csv_handle:
            for line, record in enumerate(csv.DictReader(csv_handle), start=2):
                coordinates = collections.OrderedDict()
                values = dict((column, None) for column in _VALUE_COLUMNS)
                for column, text in record.items():
                    if column is None:
                        raise WncsError("%s:%d: unexpected extra values" % (path, line))
                    if text is None or text == "":
                        parsed = None
                    elif column in _INTEGER_COORDINATES:
                        parsed = int(text)
                    else:
                        parsed = float(text)
                    if column in values:
                        values[column] = parsed
                    else:
                        coordinates[column] = parsed
                rows.append(SweepRow(coordinates, **values))
    except (IOError, OSError) as e:
        raise WncsError("Unable to read CSV file %s: %s" % (path, e))
    except ValueError as e:
        raise WncsError("Invalid value in CSV file %s: %s" % (path, e))
    return rows

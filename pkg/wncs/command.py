# SPDX-License-Identifier: Apache-2.0
# Copyright Contributors to the WNCS project

import collections
import json
import logging
import os
import sys

from .channel import ChannelParams, LoopTopology
from .constants import _CASES, _MODES, _TABLE1_USE_CASES
from .errors import ConfigError, DomainError
from .montecarlo import McConfig, estimate_alpha_interference, estimate_beta_noise
from .plant import eigen_analyze, load_plant
from .reliability import alpha_for_case, alpha_full_interference_exact, max_distance, required_power
from .scenario import ScenarioConfig, emit_csv, emit_records, format_number, row_to_dict
from .scenario import run_scenario, table1, write_records
from .settings import WncsSettings

logger = logging.getLogger(__name__)

_REQUEST_KEYS = ["case", "pi", "plant", "channel", "topology", "loop_index", "target", "mc"]

# A single reliability evaluation read from a JSON config.
ReliabilityRequest = collections.namedtuple(
    "ReliabilityRequest", ["case", "pi", "params", "topology", "loop_index", "target", "mc"]
)


def load_request(path):
    """
    Load a reliability request from a JSON file.

    The product of unstable eigenvalues is either given directly with a "pi"
    key, or computed from a "plant" file, relative paths being resolved
    against the config file directory.

    :param str path: Full path to the JSON file.
    :returns: A :class:`ReliabilityRequest` instance.
    :raises ConfigError: If the file can't be read or is invalid.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.loads(f.read())
    except (IOError, OSError) as e:
        raise ConfigError("unable to read config file %s: %s" % (path, e))
    except ValueError as e:
        raise ConfigError("invalid JSON in config file %s: %s" % (path, e))
    if not isinstance(data, dict):
        raise ConfigError("config file %s must contain a JSON object" % path)
    for key in data:
        if key not in _REQUEST_KEYS:
            raise ConfigError("unknown config entry", key)
    try:
        case = _CASES(data.get("case", _CASES.NOISE.value))
    except ValueError:
        raise ConfigError(
            "unknown case %r, expected one of %s" % (data.get("case"), ", ".join([c.value for c in _CASES])),
            "case",
        )
    if ("pi" in data) == ("plant" in data):
        raise ConfigError("exactly one of pi or plant must be set", "pi")
    if "plant" in data:
        plant_path = os.path.join(os.path.dirname(os.path.abspath(path)), data["plant"])
        unstable_product = eigen_analyze(load_plant(plant_path)).unstable_product
    else:
        unstable_product = data["pi"]
        if isinstance(unstable_product, bool) or not isinstance(unstable_product, (int, float)):
            raise ConfigError("must be a number, not %r" % (unstable_product,), "pi")
        if not unstable_product >= 1:
            raise ConfigError("must be >= 1, not %s" % unstable_product, "pi")
    params = topology = None
    loop_index = data.get("loop_index", 0)
    if case == _CASES.NOISE:
        if "topology" in data:
            raise ConfigError("only allowed for interference cases", "topology")
        if "channel" not in data:
            raise ConfigError("missing required value", "channel")
        params = ChannelParams.from_dict(data["channel"])
    else:
        if "channel" in data:
            raise ConfigError("only allowed for the noise case", "channel")
        if "topology" not in data:
            raise ConfigError("missing required value", "topology")
        topology = LoopTopology.from_dict(data["topology"])
        try:
            if case == _CASES.SINGLE_INTERFERENCE and topology.k != 2:
                raise ValueError("Exactly two loops are needed, got %d" % topology.k)
            if topology.k < 2:
                raise ValueError("At least two loops are needed, got %d" % topology.k)
        except ValueError as e:
            raise ConfigError("%s" % e, "topology.distances")
        try:
            topology.check_loop_index(loop_index)
        except ValueError as e:
            raise ConfigError("%s" % e, "loop_index")
    target = data.get("target")
    if target is not None:
        if case != _CASES.NOISE:
            raise ConfigError("only allowed for the noise case", "target")
        if isinstance(target, bool) or not isinstance(target, (int, float)) or not 0 < target < 1:
            raise ConfigError("must be a number in (0, 1), not %r" % (target,), "target")
    mc = data.get("mc")
    if mc is not None:
        if not isinstance(mc, dict):
            raise ConfigError("must be an object", "mc")
        for key in mc:
            if key not in ("samples", "seed", "streams"):
                raise ConfigError("unknown Monte Carlo setting", "mc.%s" % key)
    return ReliabilityRequest(case, float(unstable_product), params, topology, loop_index, target, mc)


class WncsCommand(object):
    """
    A class to run wncs commands and report their results.

    Results are written to the output stream as aligned text or, in JSON
    mode, as a single JSON object. Logs go to the logging handlers.
    """
    def __init__(self, output=None, as_json=False, verbose=False, settings=None):
        """
        Instantiate a new :class:`WncsCommand`.

        :param output: Optional stream to write results to, defaults to stdout.
        :param bool as_json: Whether results should be written as JSON.
        :param bool verbose: Whether debug messages should be logged.
        :param str settings: Optional settings JSON file to load.
        """
        self._output = output or sys.stdout
        self._as_json = as_json
        logging.getLogger("wncs").setLevel(logging.DEBUG if verbose else logging.INFO)
        if settings:
            WncsSettings.from_file(settings)

    def _write_json(self, data):
        """
        Write the given data as a single JSON object.
        """
        self._output.write(json.dumps(data, sort_keys=True))
        self._output.write("\n")

    def _write_lines(self, pairs):
        """
        Write label / value pairs as aligned text lines.

        :param pairs: A list of (label, value) tuples.
        """
        width = max(len(label) for label, _ in pairs)
        for label, value in pairs:
            self._output.write("%s : %s\n" % (label.ljust(width), value))

    def _mc_config(self, request_mc=None, samples=None, seed=None, streams=None):
        """
        Return a :class:`McConfig` from config values and command line overrides.

        Command line values take precedence over config values, which take
        precedence over settings.
        """
        values = dict(request_mc or {})
        for key, value in (("samples", samples), ("seed", seed), ("streams", streams)):
            if value is not None:
                values[key] = value
        try:
            return McConfig(**values)
        except ConfigError as e:
            raise ConfigError(e.message, "mc.%s" % e.field_path)

    def analyze(self, plant_path, tol=None):
        """
        Report the eigenvalue magnitudes of a plant, the product of its
        unstable eigenvalues and the matching rate threshold.

        :param str plant_path: Full path to a plant JSON file.
        :param float tol: Optional classification slack.
        :returns: An :class:`EigenAnalysis` instance.
        """
        analysis = eigen_analyze(load_plant(plant_path), tol=tol)
        if self._as_json:
            data = analysis.to_dict()
            data["stable"] = analysis.stable
            self._write_json(data)
        else:
            self._write_lines([
                ("magnitudes", ", ".join(format_number(x) for x in analysis.magnitudes)),
                ("unstable product", format_number(analysis.unstable_product)),
                ("rate threshold", "%s bits/symbol" % format_number(analysis.rate_threshold_bits)),
            ])
        return analysis

    def reliability(self, config_path):
        """
        Report the analytic reliability for a config.

        For the noise limited case with a "target" reliability, the transmit
        power and the distance needed to reach it are reported too.

        :param str config_path: Full path to a reliability JSON config.
        :returns: A :class:`ReliabilityResult` instance.
        """
        request = load_request(config_path)
        result = alpha_for_case(
            request.case,
            request.pi,
            params=request.params,
            topology=request.topology,
            loop_index=request.loop_index,
        )
        data = collections.OrderedDict([
            ("case", request.case.value),
            ("pi", request.pi),
            ("result", result.to_dict()),
            ("outage", result.outage),
        ])
        if request.target is not None:
            for key, solver, params in (
                ("required_power", required_power, request.params),
                ("max_distance", max_distance, request.params),
            ):
                try:
                    data[key] = solver(params, request.pi, request.target)
                except DomainError as e:
                    logger.warning("%s" % e)
                    data[key] = None
            data["target"] = request.target
        if self._as_json:
            self._write_json(data)
            return result
        line = "alpha = %s (%s)" % (format_number(result.value), result.method.value)
        if result.underflow:
            line += " underflow"
        self._output.write("%s\n" % line)
        if request.target is not None:
            self._write_lines([
                ("target", format_number(request.target)),
                ("required power", format_number(data["required_power"])),
                ("max distance", format_number(data["max_distance"])),
            ])
        return result

    def simulate(self, config_path, samples=None, seed=None, streams=None):
        """
        Estimate the reliability for a config with the Monte Carlo oracle and
        report it alongside the analytic value.

        :param str config_path: Full path to a reliability JSON config.
        :param int samples: Optional number of draws.
        :param int seed: Optional seed.
        :param int streams: Optional number of independent streams.
        :returns: A :class:`McEstimate` instance.
        """
        request = load_request(config_path)
        mc = self._mc_config(request.mc, samples, seed, streams)
        if request.case == _CASES.NOISE:
            estimate = estimate_beta_noise(request.params, request.pi, mc)
        else:
            estimate = estimate_alpha_interference(request.topology, request.loop_index, request.pi, mc)
        closed = alpha_for_case(
            request.case,
            request.pi,
            params=request.params,
            topology=request.topology,
            loop_index=request.loop_index,
        )
        exact = None
        if request.case == _CASES.FULL_INTERFERENCE:
            exact = alpha_full_interference_exact(request.topology, request.loop_index, request.pi)
        if self._as_json:
            data = collections.OrderedDict([
                ("case", request.case.value),
                ("pi", request.pi),
                ("mc", mc.to_dict()),
                ("estimate", estimate.to_dict()),
                ("closed_form", closed.to_dict()),
                ("agrees", estimate.agrees_with(closed.value)),
            ])
            if exact is not None:
                data["exact"] = exact.to_dict()
            self._write_json(data)
            return estimate
        pairs = [
            ("p_hat", format_number(estimate.p_hat)),
            ("stderr", format_number(estimate.stderr)),
            ("samples / seed / streams", "%d / %d / %d" % (mc.samples, mc.seed, mc.streams)),
            ("closed form", "%s (%s)" % (format_number(closed.value), closed.method.value)),
        ]
        if exact is not None:
            pairs.append(("exact", "%s (%s)" % (format_number(exact.value), exact.method.value)))
        pairs.append(("within 3 sigma", "yes" if estimate.agrees_with(closed.value) else "no"))
        self._write_lines(pairs)
        return estimate

    def table1(self, out=None):
        """
        Report the rate threshold of the published use cases.

        :param str out: Optional CSV file to write the table to.
        :returns: A list of (pi, r_th) tuples.
        """
        thresholds = table1([product for _, product in _TABLE1_USE_CASES])
        records = [
            collections.OrderedDict([("use_case", name), ("pi", pi), ("r_th", r_th)])
            for (name, _), (pi, r_th) in zip(_TABLE1_USE_CASES, thresholds)
        ]
        if out:
            emit_records(records, out, list(records[0].keys()))
        if self._as_json:
            self._write_json({"table1": records})
        elif not out:
            width = max(len(record["use_case"]) for record in records)
            for record in records:
                self._output.write("%s  %12s  %8.4f\n" % (
                    record["use_case"].ljust(width), format_number(record["pi"]), record["r_th"]
                ))
        return thresholds

    def scenario(self, preset=None, config_path=None, out=None, mode=None, samples=None, seed=None, streams=None):
        """
        Run a builtin or configured scenario and write its rows as CSV.

        Rows are written to the given CSV file, or to the output stream if no
        file is given. In JSON mode, rows are reported as a JSON list.

        :param str preset: A builtin scenario name, "table1" included.
        :param str config_path: Full path to a scenario JSON config.
        :param str out: Optional CSV file path.
        :param str mode: Optional evaluation mode override.
        :param int samples: Optional number of Monte Carlo draws.
        :param int seed: Optional Monte Carlo seed.
        :param int streams: Optional number of Monte Carlo streams.
        :returns: A list of :class:`SweepRow`, or (pi, r_th) tuples for table1.
        :raises ValueError: If both or neither of preset and config_path are set.
        """
        if bool(preset) == bool(config_path):
            raise ValueError("Exactly one of a preset or a config must be given")
        if preset == "table1":
            return self.table1(out)
        if preset:
            config = ScenarioConfig.from_preset(preset)
        else:
            config = ScenarioConfig.from_file(config_path)
        if mode:
            config.mode = mode
        if config.mode != _MODES.CLOSED_FORM or any(x is not None for x in (samples, seed, streams)):
            config.mc = self._mc_config(
                config.mc.to_dict() if config.mc else None, samples, seed, streams
            )
        rows = run_scenario(config)
        if out:
            emit_csv(rows, out, config.fieldnames)
        if self._as_json:
            records = [
                collections.OrderedDict(
                    (key, value) for key, value in row_to_dict(row).items() if key in config.fieldnames
                )
                for row in rows
            ]
            self._write_json({"name": config.name, "mode": config.mode.value, "rows": records})
        elif not out:
            write_records([row_to_dict(row) for row in rows], self._output, config.fieldnames)
        return rows
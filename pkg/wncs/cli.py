# SPDX-License-Identifier: Apache-2.0
# Copyright Contributors to the WNCS project

import argparse
import logging
import sys

from .command import WncsCommand
from .constants import _EXIT_RUNTIME_ERROR, _EXIT_SUCCESS, _EXIT_USAGE_ERROR
from .constants import _MODE_ALIASES, _MODES, _PRESET_NAMES
from .errors import ConfigError

logger = logging.getLogger("wncs")


def build_parser():
    """
    Return the command line parser.

    :returns: An :class:`argparse.ArgumentParser` instance.
    """
    parser = argparse.ArgumentParser(
        prog="wncs",
        description="Compute the probability of stabilizability of wireless networked control loops, "
                    "check it against a Monte Carlo channel simulation, and reproduce reference scenarios."
    )
    subparser = parser.add_subparsers(dest="command")
    analyze_parser = subparser.add_parser(
        "analyze",
        help="Report the unstable eigenvalues of a plant and its rate threshold."
    )
    reliability_parser = subparser.add_parser(
        "reliability",
        help="Evaluate the closed form reliability of a link."
    )
    simulate_parser = subparser.add_parser(
        "simulate",
        help="Estimate the reliability of a link with a Monte Carlo simulation."
    )
    scenario_parser = subparser.add_parser(
        "scenario",
        help="Run a builtin or configured parameter sweep and write it as CSV."
    )
    # Common arguments are added to the subparsers so that the first
    # positional argument is always the command.
    for command_parser in (analyze_parser, reliability_parser, simulate_parser, scenario_parser):
        add_common_args(command_parser)

    # Analyze parameters
    analyze_parser.add_argument(
        "--plant", "-p",
        required=True,
        help="The plant JSON file to read, with A, B, C and optional Sigma matrices."
    )
    analyze_parser.add_argument(
        "--tol",
        required=False,
        type=float,
        help="Magnitudes above 1 + tol are unstable. Defaults to the eigen_tol setting."
    )
    # Reliability parameters
    reliability_parser.add_argument(
        "--config", "-c",
        required=True,
        help="The reliability JSON config to read."
    )
    # Simulate parameters
    simulate_parser.add_argument(
        "--config", "-c",
        required=True,
        help="The reliability JSON config to read."
    )
    add_mc_args(simulate_parser)

    # Scenario parameters
    source = scenario_parser.add_mutually_exclusive_group(required=True)
    source.add_argument(
        "--preset",
        choices=_PRESET_NAMES,
        help="A builtin scenario."
    )
    source.add_argument(
        "--config", "-c",
        help="A scenario JSON config to read."
    )
    scenario_parser.add_argument(
        "--out", "-o",
        required=False,
        help="The CSV file to write. If not provided, CSV rows are written to stdout."
    )
    scenario_parser.add_argument(
        "--mode", "-m",
        required=False,
        choices=sorted(set(_MODE_ALIASES) | set(m.value for m in _MODES)),
        help="Evaluate closed forms, Monte Carlo estimates or both. Defaults to the config mode."
    )
    add_mc_args(scenario_parser)
    return parser


def add_common_args(parser):
    """
    Add arguments shared by all commands.

    :param parser: An instance of :class:`argparse.ArgumentParser`.
    """
    parser.add_argument(
        "--verbose", "-v",
        action="store_true",
        help="Print debug information."
    )
    parser.add_argument(
        "--settings", "-s",
        required=False,
        help="The settings JSON file to use. If not provided, the default settings are used."
    )
    parser.add_argument(
        "--json",
        action="store_true",
        help="Write results as a single JSON object."
    )


def add_mc_args(parser):
    """
    Add Monte Carlo arguments.

    :param parser: An instance of :class:`argparse.ArgumentParser`.
    """
    parser.add_argument(
        "--samples", "-n",
        required=False,
        type=int,
        help="The number of channel realizations."
    )
    parser.add_argument(
        "--seed",
        required=False,
        type=int,
        help="The random seed. Defaults to the WNCS_SEED environment variable, or 42."
    )
    parser.add_argument(
        "--streams",
        required=False,
        type=int,
        help="The number of independent random streams, evaluated in parallel."
    )


def run(args):
    """
    Run the command for parsed arguments.

    :param args: An :class:`argparse.Namespace` instance.
    """
    command = WncsCommand(as_json=args.json, verbose=args.verbose, settings=args.settings)
    if args.command == "analyze":
        command.analyze(plant_path=args.plant, tol=args.tol)
    elif args.command == "reliability":
        command.reliability(config_path=args.config)
    elif args.command == "simulate":
        command.simulate(
            config_path=args.config,
            samples=args.samples,
            seed=args.seed,
            streams=args.streams,
        )
    elif args.command == "scenario":
        command.scenario(
            preset=args.preset,
            config_path=args.config,
            out=args.out,
            mode=args.mode,
            samples=args.samples,
            seed=args.seed,
            streams=args.streams,
        )


def main(argv=None):
    """
    Parse command line arguments and run the requested command.

    :param argv: Optional list of arguments, defaults to ``sys.argv[1:]``.
    :returns: 0 on success, 1 for runtime errors and 2 for usage or
              configuration errors.
    """
    logging.basicConfig(level=logging.INFO)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 for usage errors and 0 for --help.
        return e.code
    # We need to have a command to check args set on subparsers.
    if not args.command:
        parser.print_help()
        return _EXIT_SUCCESS
    try:
        run(args)
    except ConfigError as e:
        sys.stderr.write("wncs %s: error: %s\n" % (args.command, e))
        return _EXIT_USAGE_ERROR
    except Exception as e:
        if args.verbose:
            logger.exception("wncs %s failed" % args.command)
        sys.stderr.write("wncs %s: error: %s\n" % (args.command, e))
        return _EXIT_RUNTIME_ERROR
    return _EXIT_SUCCESS


if __name__ == "__main__":
    sys.exit(main())

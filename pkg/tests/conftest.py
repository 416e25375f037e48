# SPDX-License-Identifier: Apache-2.0
# Copyright Contributors to the WNCS project

import os
import logging
import sys

# Define a standard logger
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

sys.path.append(os.path.dirname(__file__))

# Builtin scenarios with a golden CSV file.
GOLDEN_PRESETS = ["1", "2", "3"]


def pytest_addoption(parser):
    """
    Add custom command line arguments to pytest to generate the golden CSV
    files.
    """
    parser.addoption(
        "--generate_goldens",
        action="store_true",
        dest="generate_goldens",
        default=False,
        help="Regenerate the golden CSV files for builtin scenarios"
    )


def get_golden_path(preset):
    """
    Return the golden CSV file path for a builtin scenario.

    :param str preset: A builtin scenario key.
    :returns: A string.
    """
    return os.path.join(
        os.path.dirname(__file__),
        "fixtures",
        "goldens",
        "scenario%s.csv" % preset,
    )


def pytest_configure(config):
    """
    Treat additional arguments which were specified on the command line.
    """
    if config.option.generate_goldens:
        from wncs.scenario import ScenarioConfig, emit_csv, run_scenario
        from wncs.settings import WncsSettings

        WncsSettings().reset_to_defaults()
        for preset in GOLDEN_PRESETS:
            golden_path = get_golden_path(preset)
            scenario = ScenarioConfig.from_preset(preset)
            emit_csv(run_scenario(scenario), golden_path, scenario.fieldnames)
            logger.info("Golden file for preset %s generated in %s" % (preset, golden_path))

# SPDX-License-Identifier: Apache-2.0
# Copyright Contributors to the WNCS project

import enum

# Default Monte Carlo values
_DEFAULT_SAMPLES = 1000000
_DEFAULT_SEED = 42
_DEFAULT_STREAMS = 1
# Number of draws generated in a single vectorised batch. Changing it changes
# the sequence of draws, and therefore Monte Carlo results for a given seed.
_DEFAULT_CHUNK_SIZE = 65536

# Environment variable used as a fallback default seed.
_SEED_ENV_VAR = "WNCS_SEED"

# Slack used when classifying eigenvalue magnitudes: |lambda| > 1 + tol is unstable.
_DEFAULT_EIGEN_TOL = 1e-9
# Relative tolerance for the |det(A)| == prod(|lambda|) sanity check.
_DETERMINANT_CHECK_RTOL = 1e-6
# Diagonal jitter added to semidefinite noise covariances before factoring.
_CHOLESKY_JITTER = 1e-12
# Tolerances used when validating plant matrices.
_SYMMETRY_TOL = 1e-9
_PSD_TOL = 1e-9

# Omega = E[|h|^2]. Only Omega = 2 reproduces the published closed form verbatim.
_DEFAULT_OMEGA = 2.0

# Exponents beyond this magnitude clamp reliability to zero.
_DEFAULT_EXPONENT_LIMIT = 700.0

# Number of significant digits used when rendering numbers in CSV files.
_CSV_SIGNIFICANT_DIGITS = 9

# Exit codes
_EXIT_SUCCESS = 0
_EXIT_RUNTIME_ERROR = 1
_EXIT_USAGE_ERROR = 2

# How a reliability value was obtained.
_METHODS = enum.Enum(
    "ReliabilityMethod", {
        "CLOSED_FORM_NOISE": "closed_form_noise",                # Noise limited Rayleigh CCDF
        "CLOSED_FORM_SINGLE_INTERF": "closed_form_single_interf",  # K = 2 SIR
        "CLOSED_FORM_FULL_INTERF": "closed_form_full_interf",    # K loops, printed form
        "EXACT_PRODUCT_FORM": "exact_product_form",              # K loops, exact product
        "MONTE_CARLO": "monte_carlo",                            # Empirical frequency
    }
)

# Analytic cases which can be requested from configs and the command line.
_CASES = enum.Enum(
    "ReliabilityCase", {
        "NOISE": "noise",
        "SINGLE_INTERFERENCE": "single_interference",
        "FULL_INTERFERENCE": "full_interference",
        "FULL_INTERFERENCE_EXACT": "full_interference_exact",
    }
)

# Scenario evaluation modes.
_MODES = enum.Enum(
    "ScenarioMode", {
        "CLOSED_FORM": "closed_form",
        "MONTE_CARLO": "monte_carlo",
        "BOTH": "both",
    }
)

# Command line aliases for scenario modes.
_MODE_ALIASES = {
    "closed": "closed_form",
    "mc": "monte_carlo",
    "both": "both",
}

# Channel fields which can be swept, and the Pi axis.
_CHANNEL_FIELDS = ["p_t", "n0", "l0", "d", "eta", "omega"]
_SWEEP_VARIABLES = ["p_t", "d", "eta", "pi"]

# Coordinates written for noise limited and interference rows.
_NOISE_COORDINATES = ["pi", "p_t", "n0", "l0", "d", "eta", "omega"]
_INTERFERENCE_COORDINATES = ["pi", "eta", "loop_index", "k", "d_i"]
_VALUE_COLUMNS = ["alpha_closed", "alpha_exact", "alpha_mc", "mc_stderr"]

# Product of unstable eigenvalues for published use cases. The
# system matrices are not published alongside, only their products.
_TABLE1_USE_CASES = [
    ("Voltage Regulation in DC Micro Grids", 6e7),
    ("Load Frequency Control", 412.99),
    ("Adaptive Cruise control", 2.2),
]

# Shared reproduction fixtures. The quoted "0.1 mW" and "10 mW" only
# reproduce the published curves when used as plain numerals 0.1 and 0.01.
_REPRODUCTION_N0 = 0.01
_REPRODUCTION_L0 = 0.1

# Pi axis shared by the noise limited presets: 60 geometric points in [10, 600].
_PRESET_PI_START = 10.0
_PRESET_PI_STOP = 600.0
_PRESET_PI_POINTS = 60

_PRESETS = {
    # Reliability against Pi for several transmit powers.
    "1": {
        "name": "scenario1",
        "case": "noise",
        "sweep_variable": "p_t",
        "sweep_values": [100.0, 200.0, 300.0, 400.0],
        "fixed": {
            "n0": _REPRODUCTION_N0, "l0": _REPRODUCTION_L0,
            "d": 10.0, "eta": 2.5, "omega": _DEFAULT_OMEGA,
        },
    },
    # Reliability against Pi for several sensor-controller distances.
    "2": {
        "name": "scenario2",
        "case": "noise",
        "sweep_variable": "d",
        "sweep_values": [5.0, 10.0, 15.0, 20.0],
        "fixed": {
            "p_t": 300.0, "n0": _REPRODUCTION_N0, "l0": _REPRODUCTION_L0,
            "eta": 2.5, "omega": _DEFAULT_OMEGA,
        },
    },
    # Reliability against Pi for several path loss exponents.
    "3": {
        "name": "scenario3",
        "case": "noise",
        "sweep_variable": "eta",
        "sweep_values": [2.0, 2.5, 3.0, 3.5],
        "fixed": {
            "p_t": 300.0, "n0": _REPRODUCTION_N0, "l0": _REPRODUCTION_L0,
            "d": 10.0, "omega": _DEFAULT_OMEGA,
        },
    },
    # Two interfering loops.
    "interference": {
        "name": "interference",
        "case": "single_interference",
        "sweep_variable": "eta",
        "sweep_values": [2.0, 2.5, 3.0],
        "topology": {"distances": [10.0, 20.0], "eta": 2.5},
        "loop_index": 0,
        "pi_values": [1.5, 2.0, 5.0, 10.0, 20.0, 50.0],
    },
    # Four interfering loops at equal distances, printed form vs exact form.
    "full_interference": {
        "name": "full_interference",
        "case": "full_interference",
        "sweep_variable": "pi",
        "sweep_values": [1.25, 1.5, 2.0, 3.0, 5.0],
        "topology": {"distances": [10.0, 10.0, 10.0, 10.0], "eta": 2.5},
        "loop_index": 0,
    },
}

_PRESET_NAMES = ["1", "2", "3", "interference", "full_interference", "table1"]

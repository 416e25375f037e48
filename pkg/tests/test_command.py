# SPDX-License-Identifier: Apache-2.0
# Copyright Contributors to the WNCS project

import io
import json
import os
import tempfile
from unittest import mock

from .python.wncs_test import WncsBaseTest

from wncs.cli import build_parser, main
from wncs.command import WncsCommand, load_request
from wncs.constants import _CASES
from wncs.errors import ConfigError
from wncs.reliability import alpha_noise
from wncs.scenario import read_csv


class TestCommand(WncsBaseTest):
    """
    Test the wncs command line.
    """
    def _run(self, argv):
        """
        Run the command line with the given arguments and capture its output.

        :param argv: A list of arguments.
        :returns: A (exit code, stdout, stderr) tuple.
        """
        with mock.patch("sys.stdout", new_callable=io.StringIO) as stdout:
            with mock.patch("sys.stderr", new_callable=io.StringIO) as stderr:
                code = main(argv)
        return code, stdout.getvalue(), stderr.getvalue()

    def test_parser(self):
        """
        Test parsing command line arguments.
        """
        parser = build_parser()
        args = parser.parse_args(["scenario", "--preset", "1", "--mode", "mc", "-n", "10", "--seed", "3"])
        self.assertEqual(args.command, "scenario")
        self.assertEqual(args.preset, "1")
        self.assertIsNone(args.config)
        self.assertEqual(args.mode, "mc")
        self.assertEqual(args.samples, 10)
        self.assertEqual(args.seed, 3)
        self.assertIsNone(args.streams)
        self.assertFalse(args.json)
        args = parser.parse_args(["analyze", "-p", "plant.json", "--tol", "0.1", "--json", "-v"])
        self.assertEqual(args.plant, "plant.json")
        self.assertEqual(args.tol, 0.1)
        self.assertTrue(args.json)
        self.assertTrue(args.verbose)

    def test_usage_errors(self):
        """
        Test usage errors exit with code 2.
        """
        code, _, _ = self._run([])
        self.assertEqual(code, 0)
        code, _, stderr = self._run(["scenario", "--preset", "1", "--config", self.resource("scenario_small.json")])
        self.assertEqual(code, 2)
        self.assertIn("not allowed with argument", stderr)
        code, _, _ = self._run(["scenario"])
        self.assertEqual(code, 2)
        code, _, _ = self._run(["reliability", "--config", self.resource("reliability_noise.json"), "--bogus"])
        self.assertEqual(code, 2)
        code, _, _ = self._run(["scenario", "--preset", "4"])
        self.assertEqual(code, 2)
        code, _, stderr = self._run(["reliability", "--config", self.resource("missing.json")])
        self.assertEqual(code, 2)
        self.assertIn("wncs reliability: error:", stderr)
        self.assertIn("missing.json", stderr)
        code, _, stderr = self._run(["reliability", "--config", self.resource("reliability_bad_channel.json")])
        self.assertEqual(code, 2)
        self.assertIn("channel", stderr)
        code, _, stderr = self._run([
            "analyze", "--plant", self.resource("diag2.json"), "--settings", self.resource("bad_settings.json")
        ])
        self.assertEqual(code, 2)
        self.assertIn("number_of_draws", stderr)
        code, _, stderr = self._run([
            "simulate", "--config", self.resource("reliability_noise.json"), "--seed", "-1"
        ])
        self.assertEqual(code, 2)
        self.assertIn("mc.seed", stderr)
        code, _, stderr = self._run([
            "scenario", "--config", self.resource("scenario_unsorted.json"), "--mode", "closed"
        ])
        self.assertEqual(code, 2)
        self.assertIn("sweep_values[3]", stderr)

    def test_runtime_errors(self):
        """
        Test runtime errors exit with code 1.
        """
        out = os.path.join(tempfile.mkdtemp(), "missing_dir", "rows.csv")
        code, _, stderr = self._run(["scenario", "--preset", "table1", "--out", out])
        self.assertEqual(code, 1)
        self.assertIn("wncs scenario: error:", stderr)
        self.assertFalse(os.path.exists(out))

    def test_table1(self):
        """
        Test the rate threshold table.
        """
        code, stdout, _ = self._run(["scenario", "--preset", "table1"])
        self.assertEqual(code, 0)
        lines = stdout.splitlines()
        self.assertEqual(len(lines), 3)
        self.assertIn("Voltage Regulation in DC Micro Grids", lines[0])
        for line, expected in zip(lines, [25.8384, 8.69, 1.1375]):
            self.assertAlmostEqual(float(line.split()[-1]), expected, delta=0.0005)
        code, stdout, _ = self._run(["scenario", "--preset", "table1", "--json"])
        self.assertEqual(code, 0)
        records = json.loads(stdout)["table1"]
        self.assertEqual([record["pi"] for record in records], [6e7, 412.99, 2.2])
        self.assertAlmostEqual(records[2]["r_th"], 1.1375, delta=0.0005)
        # And as a CSV file.
        out = os.path.join(tempfile.mkdtemp(), "table1.csv")
        code, stdout, _ = self._run(["scenario", "--preset", "table1", "--out", out])
        self.assertEqual(code, 0)
        self.assertEqual(stdout, "")
        with open(out, "r", newline="") as f:
            lines = f.read().split("\n")
        self.assertEqual(lines[0], "use_case,pi,r_th")
        self.assertTrue(lines[2].startswith("Load Frequency Control,412.99,8.6899"))

    def test_analyze(self):
        """
        Test analyzing plants.
        """
        code, stdout, _ = self._run(["analyze", "--plant", self.resource("diag2.json")])
        self.assertEqual(code, 0)
        self.assertIn("unstable product : 2", stdout)
        self.assertIn("rate threshold   : 1 bits/symbol", stdout)
        code, stdout, _ = self._run(["analyze", "--plant", self.resource("diag2.json"), "--json"])
        self.assertEqual(code, 0)
        data = json.loads(stdout)
        self.assertEqual(data["magnitudes"], [2.0, 0.5])
        self.assertAlmostEqual(data["unstable_product"], 2.0, places=12)
        self.assertAlmostEqual(data["rate_threshold_bits"], 1.0, places=12)
        self.assertFalse(data["stable"])
        code, stdout, _ = self._run(["analyze", "--plant", self.resource("stable_plant.json"), "--json"])
        self.assertTrue(json.loads(stdout)["stable"])
        code, _, _ = self._run(["analyze", "--plant", self.resource("diag2.json"), "--tol", "-1"])
        self.assertEqual(code, 1)

    def test_reliability(self):
        """
        Test evaluating closed forms.
        """
        code, stdout, _ = self._run(["reliability", "--config", self.resource("reliability_noise.json")])
        self.assertEqual(code, 0)
        self.assertTrue(stdout.startswith("alpha = 0.38"))
        self.assertIn("(closed_form_noise)", stdout)
        self.assertIn("required power", stdout)
        code, stdout, _ = self._run(["reliability", "--config", self.resource("reliability_noise.json"), "--json"])
        self.assertEqual(code, 0)
        data = json.loads(stdout)
        self.assertEqual(data["case"], "noise")
        self.assertAlmostEqual(data["result"]["value"], 0.388, delta=0.0005)
        self.assertAlmostEqual(data["outage"], 1 - data["result"]["value"], places=12)
        self.assertAlmostEqual(data["required_power"], 100, delta=0.5)
        self.assertAlmostEqual(data["max_distance"], 10, delta=0.05)
        self.assertEqual(data["target"], 0.388)
        # Pi computed from a plant file.
        code, stdout, _ = self._run(["reliability", "--config", self.resource("reliability_plant.json"), "--json"])
        self.assertEqual(code, 0)
        data = json.loads(stdout)
        self.assertAlmostEqual(data["pi"], 2.0, places=12)
        self.assertAlmostEqual(
            data["result"]["value"], alpha_noise(self.scenario1_params, 2).value, places=12
        )
        self.assertNotIn("required_power", data)
        code, stdout, _ = self._run(["reliability", "--config", self.resource("reliability_full.json"), "--json"])
        self.assertEqual(code, 0)
        data = json.loads(stdout)
        self.assertEqual(data["result"]["method"], "closed_form_full_interf")
        self.assertAlmostEqual(data["result"]["value"], 0.25, places=12)

    def test_simulate(self):
        """
        Test Monte Carlo estimates are reproducible.
        """
        argv = [
            "simulate", "--config", self.resource("reliability_interference.json"),
            "--samples", "20000", "--json",
        ]
        code, stdout, _ = self._run(argv)
        self.assertEqual(code, 0)
        self.assertEqual(self._run(argv)[1], stdout)
        data = json.loads(stdout)
        self.assertEqual(data["mc"], {"samples": 20000, "seed": 3, "streams": 1})
        self.assertEqual(data["estimate"]["samples"], 20000)
        self.assertEqual(data["closed_form"]["method"], "closed_form_single_interf")
        self.assertNotIn("exact", data)
        code, other, _ = self._run(argv + ["--seed", "4"])
        self.assertNotEqual(json.loads(other)["estimate"], data["estimate"])
        # Text report for several interferers, with the exact form.
        code, stdout, _ = self._run([
            "simulate", "--config", self.resource("reliability_full.json"), "-n", "50000",
        ])
        self.assertEqual(code, 0)
        self.assertIn("samples / seed / streams : 50000 / 11 / 1", stdout)
        self.assertIn("(exact_product_form)", stdout)
        self.assertIn("within 3 sigma", stdout)

    def test_scenario(self):
        """
        Test running scenario configs.
        """
        out = os.path.join(tempfile.mkdtemp(), "small.csv")
        code, stdout, _ = self._run([
            "scenario", "--config", self.resource("scenario_small.json"), "--out", out, "--mode", "closed"
        ])
        self.assertEqual(code, 0)
        self.assertEqual(stdout, "")
        with open(out, "r", newline="") as f:
            lines = f.read().splitlines()
        self.assertEqual(len(lines), 5)
        self.assertEqual(lines[0], "pi,p_t,n0,l0,d,eta,omega,alpha_closed,alpha_mc,mc_stderr")
        rows = read_csv(out)
        self.assertEqual(
            [(row.coordinates["pi"], row.coordinates["p_t"]) for row in rows],
            [(200, 100), (200, 400), (600, 100), (600, 400)],
        )
        self.assertIsNone(rows[0].alpha_mc)
        # Rows are written to stdout without an output file.
        code, stdout, _ = self._run([
            "scenario", "--config", self.resource("scenario_small.json"), "--mode", "closed"
        ])
        self.assertEqual(code, 0)
        with open(out, "r", newline="") as f:
            self.assertEqual(stdout, f.read())
        code, stdout, _ = self._run([
            "scenario", "--config", self.resource("scenario_small.json"), "--mode", "mc",
            "--samples", "5000", "--json",
        ])
        self.assertEqual(code, 0)
        data = json.loads(stdout)
        self.assertEqual(data["name"], "small")
        self.assertEqual(data["mode"], "monte_carlo")
        self.assertEqual(len(data["rows"]), 4)
        self.assertIsNone(data["rows"][0]["alpha_closed"])
        self.assertGreater(data["rows"][0]["alpha_mc"], 0)

    def test_load_request(self):
        """
        Test reliability configs are validated.
        """
        request = load_request(self.resource("reliability_interference.json"))
        self.assertEqual(request.case, _CASES.SINGLE_INTERFERENCE)
        self.assertEqual(request.pi, 2.0)
        self.assertIsNone(request.params)
        self.assertEqual(request.topology.k, 2)
        self.assertEqual(request.mc, {"samples": 100000, "seed": 3})
        tmp_dir = tempfile.mkdtemp()
        path = os.path.join(tmp_dir, "config.json")
        channel = {"p_t": 100, "n0": 0.01, "l0": 0.1, "d": 10, "eta": 2.5}
        topology = {"distances": [10, 20, 30], "eta": 2.5}
        for data, field_path in [
            ({"pi": 2, "channel": channel, "power": 3}, "power"),
            ({"case": "other", "pi": 2, "channel": channel}, "case"),
            ({"channel": channel}, "pi"),
            ({"pi": 2, "plant": "diag2.json", "channel": channel}, "pi"),
            ({"pi": 0.5, "channel": channel}, "pi"),
            ({"pi": "2", "channel": channel}, "pi"),
            ({"pi": 2}, "channel"),
            ({"pi": 2, "channel": channel, "topology": topology}, "topology"),
            ({"case": "full_interference", "pi": 2}, "topology"),
            ({"case": "single_interference", "pi": 2, "topology": topology}, "topology.distances"),
            ({"case": "full_interference", "pi": 2, "topology": topology, "loop_index": 3}, "loop_index"),
            ({"case": "full_interference", "pi": 2, "topology": topology, "target": 0.5}, "target"),
            ({"pi": 2, "channel": channel, "target": 1}, "target"),
            ({"pi": 2, "channel": channel, "mc": {"draws": 3}}, "mc.draws"),
            ({"pi": 2, "channel": dict(channel, d=0.5)}, "channel"),
        ]:
            with open(path, "w") as f:
                f.write(json.dumps(data))
            with self.assertRaises(ConfigError) as cm:
                load_request(path)
            self.assertTrue(
                cm.exception.field_path and cm.exception.field_path.startswith(field_path),
                "%s %s" % (data, cm.exception),
            )

    def test_command(self):
        """
        Test running commands directly.
        """
        output = io.StringIO()
        command = WncsCommand(output=output, settings=self.resource("settings.json"))
        estimate = command.simulate(self.resource("reliability_noise.json"))
        self.assertEqual(estimate.samples, 20000)
        self.assertIn("20000 / 7 / 2", output.getvalue())
        with self.assertRaises(ValueError):
            command.scenario()
        thresholds = command.scenario(preset="table1")
        self.assertEqual(len(thresholds), 3)

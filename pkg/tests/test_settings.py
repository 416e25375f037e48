# SPDX-License-Identifier: Apache-2.0
# Copyright Contributors to the WNCS project

import os
import tempfile
from unittest import mock

import numpy as np

from .python.wncs_test import WncsBaseTest

from wncs.errors import ConfigError
from wncs.settings import WncsSettings


class TestSettings(WncsBaseTest):
    """
    Test global settings.
    """
    def test_defaults(self):
        """
        Test default values.
        """
        settings = WncsSettings()
        self.assertEqual(settings.samples, 1000000)
        self.assertEqual(settings.seed, 42)
        self.assertEqual(settings.streams, 1)
        self.assertIsNone(settings.max_workers)
        self.assertEqual(settings.chunk_size, 65536)
        self.assertEqual(settings.eigen_tol, 1e-9)
        self.assertEqual(settings.omega, 2.0)
        self.assertEqual(settings.exponent_limit, 700.0)
        # Settings are shared.
        self.assertIs(settings, WncsSettings())
        settings.samples = 10
        self.assertEqual(WncsSettings().samples, 10)
        settings.reset_to_defaults()
        self.assertEqual(WncsSettings().samples, 1000000)

    def test_from_file(self):
        """
        Test loading settings from a JSON file.
        """
        settings = WncsSettings.from_file(self.resource("settings.json"))
        self.assertIs(settings, WncsSettings())
        self.assertEqual(settings.samples, 20000)
        self.assertEqual(settings.seed, 7)
        self.assertEqual(settings.streams, 2)
        self.assertEqual(settings.chunk_size, 4096)
        # Values which are not in the file are reset.
        settings.omega = 1.0
        WncsSettings.from_file(self.resource("settings.json"))
        self.assertEqual(settings.omega, 2.0)

    def test_invalid_files(self):
        """
        Test errors raised for invalid settings files.
        """
        with self.assertRaises(ConfigError) as cm:
            WncsSettings.from_file(self.resource("bad_settings.json"))
        self.assertEqual(cm.exception.field_path, "number_of_draws")
        with self.assertRaises(ConfigError) as cm:
            WncsSettings.from_file(self.resource("missing_settings.json"))
        self.assertIn("missing_settings.json", "%s" % cm.exception)
        # Private attributes can't be set from files.
        with tempfile.TemporaryDirectory() as tmp_dir:
            path = os.path.join(tmp_dir, "settings.json")
            with open(path, "w") as f:
                f.write('{"_samples": 3}')
            with self.assertRaises(ConfigError) as cm:
                WncsSettings.from_file(path)
            self.assertEqual(cm.exception.field_path, "_samples")
            with open(path, "w") as f:
                f.write('{"samples": ')
            with self.assertRaisesRegex(ConfigError, "invalid JSON"):
                WncsSettings.from_file(path)
            with open(path, "w") as f:
                f.write("[1, 2]")
            with self.assertRaisesRegex(ConfigError, "JSON object"):
                WncsSettings.from_file(path)
            with open(path, "w") as f:
                f.write('{"seed": -3}')
            with self.assertRaises(ConfigError) as cm:
                WncsSettings.from_file(path)
            self.assertEqual(cm.exception.field_path, "seed")

    def test_setters(self):
        """
        Test invalid values are rejected.
        """
        settings = WncsSettings()
        for name, value in [
            ("samples", 0), ("samples", 1.5), ("samples", True),
            ("seed", -1), ("seed", 2 ** 64), ("seed", "3"),
            ("streams", 0), ("max_workers", 0), ("chunk_size", -4),
            ("eigen_tol", -1e-3), ("omega", 0), ("exponent_limit", False),
        ]:
            with self.assertRaises(ConfigError) as cm:
                setattr(settings, name, value)
            self.assertEqual(cm.exception.field_path, name)
        settings.max_workers = None
        settings.max_workers = 2
        self.assertEqual(settings.max_workers, 2)
        settings.eigen_tol = 0
        self.assertEqual(settings.eigen_tol, 0.0)
        settings.seed = 2 ** 64 - 1
        self.assertEqual(settings.seed, 2 ** 64 - 1)
        settings.samples = np.int64(10)
        settings.seed = np.uint64(7)
        settings.chunk_size = np.int32(512)
        self.assertIs(type(settings.samples), int)
        self.assertEqual((settings.samples, settings.seed, settings.chunk_size), (10, 7, 512))
        settings.omega = np.float64(1.5)
        self.assertEqual(settings.omega, 1.5)
        with self.assertRaises(ConfigError):
            settings.streams = np.int64(0)

    def test_seed_environment(self):
        """
        Test the default seed can be set from the environment.
        """
        with mock.patch.dict(os.environ, {"WNCS_SEED": "123"}):
            WncsSettings().reset_to_defaults()
            self.assertEqual(WncsSettings().seed, 123)
        with mock.patch.dict(os.environ, {"WNCS_SEED": "abc"}):
            with self.assertRaises(ConfigError) as cm:
                WncsSettings().reset_to_defaults()
            self.assertEqual(cm.exception.field_path, "WNCS_SEED")
        with mock.patch.dict(os.environ, {"WNCS_SEED": "-5"}):
            with self.assertRaises(ConfigError):
                WncsSettings().reset_to_defaults()
        WncsSettings().reset_to_defaults()
        self.assertEqual(WncsSettings().seed, 42)

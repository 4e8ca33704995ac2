import unittest
import os
import sys
import tempfile

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from sources.errors import ConfigError
from sources.config import apply_overrides, build_run_config, ini_to_dict, load_config, read_ini
from sources.moebius import GroupClass

INI = """
[MAIN]
n = 4
lmax = 5
seed = 7

[GROUP]
preset = cyclic_loxodromic
lam = 3.0

[TOLERANCES]
sep = 0.1

[OUTPUT]
format = csv
path =
"""


class TestConfig(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmpdir.cleanup()

    def write_ini(self, text: str) -> str:
        path = os.path.join(self.tmpdir.name, "run.ini")
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path

    def test_defaults(self):
        config = load_config()
        self.assertEqual((config.n, config.lmax, config.seed, config.samples), (2, 6, 0, 100))
        self.assertEqual(config.group.preset, "schottky_pair")
        self.assertEqual(config.output.format, "json")
        self.assertIsNone(config.output.path)

    def test_load_from_file(self):
        config = load_config(self.write_ini(INI))
        self.assertEqual((config.n, config.lmax, config.seed), (4, 5, 7))
        self.assertEqual(config.output.format, "csv")
        self.assertIsNone(config.output.path)
        self.assertAlmostEqual(config.tolerances.sep, 0.1)
        self.assertAlmostEqual(config.tolerances.dedup_tol, 1e-6)
        group = config.group_spec()
        self.assertEqual(group.names, ["g"])
        self.assertEqual(group.n, 4)

    def test_overrides_replace_file_values(self):
        overrides = {"n": 3, "lmax": None, "format": "json", "out": "results/run.json", "preset": None}
        config = load_config(self.write_ini(INI), overrides)
        self.assertEqual(config.n, 3)
        self.assertEqual(config.lmax, 5)
        self.assertEqual(config.output.format, "json")
        self.assertEqual(config.output.path, "results/run.json")

    def test_preset_override_clears_generators(self):
        data = {"group": {"generators": {"a": "2, 0; 0, 0.5"}}}
        merged = apply_overrides(data, {"preset": "rotation"})
        self.assertEqual(merged["group"]["generators"], {})
        self.assertEqual(build_run_config(merged).group_spec().names, ["g"])

    def test_inline_generators(self):
        path = self.write_ini("[GROUP]\nasserted_class = cyclic_loxodromic\ngen_A = 2, 0; 0, 0.5\n")
        data = ini_to_dict(read_ini(path))
        self.assertEqual(data["group"]["generators"], {"a": "2, 0; 0, 0.5"})
        group = build_run_config(data).group_spec()
        self.assertEqual(group.names, ["a"])
        self.assertEqual(group.asserted_class, GroupClass.CYCLIC_LOXODROMIC)

    def test_invalid_values(self):
        cases = {
            "n": "[MAIN]\nn = 1\n",
            "sep": "[TOLERANCES]\nsep = 2\n",
            "format": "[OUTPUT]\nformat = xml\n",
            "samples": "[MAIN]\nsamples = 0\n",
        }
        for key, text in cases.items():
            with self.subTest(key=key):
                with self.assertRaises(ConfigError) as ctx:
                    load_config(self.write_ini(text))
                self.assertTrue(any(problem.startswith(key) or f".{key}" in problem
                                    for problem in ctx.exception.details["problems"]))

    def test_unknown_preset(self):
        config = load_config(self.write_ini("[GROUP]\npreset = nonexistent\n"))
        with self.assertRaises(ConfigError):
            config.group_spec()

    def test_bad_generator_matrix(self):
        config = load_config(self.write_ini("[GROUP]\ngen_g = 1, 2; 3\n"))
        with self.assertRaises(ConfigError):
            config.group_spec()

    def test_missing_file(self):
        with self.assertRaises(ConfigError) as ctx:
            load_config(os.path.join(self.tmpdir.name, "absent.ini"))
        self.assertIn("path", ctx.exception.details)


if __name__ == "__main__":
    unittest.main()

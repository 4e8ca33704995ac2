import unittest
import os
import sys
from dataclasses import replace

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from sources.errors import ConfigError
from sources.limits import dominated_diagnostic
from sources.presets import schottky_pair
from sources.schemas import GroupSource, RunConfig
from sources.suites import SUITES, get_suite


def make_config(preset: str = "cyclic_loxodromic", n: int = 2, lmax: int = 3, samples: int = 5,
                lam: float = 2.0) -> RunConfig:
    return RunConfig(n=n, lmax=lmax, samples=samples, seed=0, group=GroupSource(preset=preset, lam=lam))


class TestSuites(unittest.TestCase):
    """
    Every verify suite at a small scale. Checks are listed by name when a suite fails.
    """

    def run_suite(self, name: str, config: RunConfig):
        report = get_suite(name, config).run()
        self.assertEqual(report.suite, name)
        self.assertGreater(len(report.checks), 0)
        return report

    def assert_passed(self, report):
        failed = [str(check) for check in report.checks if not check.passed]
        self.assertEqual(failed, [], f"suite {report.suite} failed")

    def test_equivariance(self):
        report = self.run_suite("equivariance", make_config(n=3, samples=6))
        self.assert_passed(report)
        self.assertEqual([c.name for c in report.checks], ["embedding_equivariance", "curve_automorphism"])

    def test_oracle(self):
        for n in (2, 4):
            with self.subTest(n=n):
                self.assert_passed(self.run_suite("oracle", make_config(n=n, samples=4)))

    def test_independence(self):
        report = self.run_suite("independence", make_config(n=3))
        self.assert_passed(report)
        self.assertEqual(len(report.notes), 1)

    def test_types(self):
        report = self.run_suite("types", make_config(samples=10))
        self.assert_passed(report)
        self.assertEqual(len(report.checks), 3)

    def test_svlaw(self):
        report = self.run_suite("svlaw", make_config(n=3, lmax=3))
        self.assert_passed(report)
        self.assertEqual(report.notes, [])

    def test_svlaw_skips_unmeasurable_words(self):
        report = self.run_suite("svlaw", make_config(n=4, lmax=6, samples=2))
        self.assert_passed(report)
        self.assertEqual(len(report.notes), 1)

    def test_domination(self):
        report = self.run_suite("domination", make_config(preset="schottky_pair", n=2, lmax=3))
        checks = {check.name: check for check in report.checks}
        self.assertEqual(set(checks), {"slope_p1", "slope_p2", "slope_consistency",
                                       "transversality_p1", "transversality_p2"})
        self.assertTrue(checks["slope_p1"].passed)
        self.assertTrue(checks["slope_p2"].passed)
        self.assertTrue(checks["slope_consistency"].passed)

    def test_slope_consistency_uses_common_lengths(self):
        suite = get_suite("domination", make_config(preset="schottky_pair", n=3, lmax=4))
        fits = [dominated_diagnostic(schottky_pair(), 3, p, 4) for p in (1, 2, 3)]
        shortened = [fits[0], replace(fits[1], complete_length=3), fits[2]]
        checks = suite.slope_consistency(shortened, 4)
        self.assertEqual([c.detail for c in checks], ["words up to length 3"])
        self.assertTrue(checks[0].passed)
        self.assertEqual(suite.slope_consistency(fits, 4)[0].detail, "words up to length 4")
        self.assertEqual(suite.slope_consistency([replace(fits[1], complete_length=1)], 4), [])
        self.assertEqual(len(suite.notes), 1)

    def test_ecg(self):
        report = self.run_suite("ecg", make_config(n=3, lmax=4))
        self.assert_passed(report)
        self.assertIn("generator_equivariance", [c.name for c in report.checks])

    def test_ecg_short_words(self):
        report = self.run_suite("ecg", make_config(n=3, lmax=2))
        self.assertNotIn("generator_equivariance", [c.name for c in report.checks])
        self.assertIn("generator equivariance needs lmax >= 3", report.notes)

    def test_lambda(self):
        report = self.run_suite("lambda", make_config(n=2))
        self.assert_passed(report)
        self.assertEqual([c.name for c in report.checks], ["attraction_cyclic", "attraction_g"])

    def test_containment(self):
        report = self.run_suite("containment", make_config(n=2, lmax=4, lam=10.0))
        self.assert_passed(report)
        self.assertEqual(len(report.notes), 1)
        self.assertEqual([item["property"] for item in report.unchecked], ["hyperplane_points_approached"])
        self.assertNotIn("hyperplane_points_approached", [c.name for c in report.checks])
        self.assertEqual(report.jsonify()["unchecked"][0]["measured"], report.unchecked[0]["measured"])

    def test_kernel(self):
        self.assert_passed(self.run_suite("kernel", make_config(n=3)))

    def test_kernel_parabolic_group(self):
        report = self.run_suite("kernel", make_config(preset="cyclic_parabolic", n=3))
        checks = {check.name: check for check in report.checks}
        self.assertTrue(checks["sequence_types"].passed)
        self.assertNotIn("proximal_directions_on_curve", checks)
        self.assertEqual(len(report.notes), 1)

    def test_get_suite(self):
        self.assertEqual(set(SUITES), {"equivariance", "svlaw", "lambda", "containment", "domination",
                                       "oracle", "types", "independence", "kernel", "ecg"})
        with self.assertRaises(ConfigError):
            get_suite("nothing", make_config())

    def test_runs_are_reproducible(self):
        first = get_suite("equivariance", make_config(samples=4)).run().jsonify()
        second = get_suite("equivariance", make_config(samples=4)).run().jsonify()
        self.assertEqual(first, second)


if __name__ == "__main__":
    unittest.main()

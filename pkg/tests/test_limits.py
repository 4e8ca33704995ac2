import unittest
import os
import sys
import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from sources.errors import (
    EmptySequence,
    Inconclusive,
    NoLoxodromicFound,
    NotConverged,
    NotDivergent,
    PreconditionViolated,
)
from sources.limits import (
    FlagPair,
    SequenceType,
    cg_limit,
    complement_sample,
    conjugation_sequence,
    dominated_diagnostic,
    ecg_distance,
    ecg_index,
    equivariance_defect,
    extended_cg_limit,
    image_kernel_distance,
    limit_flags,
    myrberg_distance,
    myrberg_limit,
    normalized_powers,
    orbit_accumulation,
    power_limit,
    proper_discontinuity_check,
    quasi_projective_limit,
    sequence_type,
    subsample,
    transversality_report,
)
from sources.moebius import MoebiusElement, attracting_point, enumerate_words
from sources.presets import cyclic_loxodromic, cyclic_parabolic, rotation, schottky_pair
from sources.projlin import (
    chordal_distance,
    normalize_projective,
    point_subspace_distance,
    standard_subspace,
    subspace_distance,
)
from sources.veronese import RepCache, embed, irrep


class TestQuasiProjectiveLimits(unittest.TestCase):
    def setUp(self):
        self.g = MoebiusElement(np.diag([2.0, 0.5]), "g")
        self.parabolic = MoebiusElement(np.array([[1.0, 1.0], [0.0, 1.0]]), "u")

    def test_loxodromic_powers(self):
        limit = quasi_projective_limit(normalized_powers(self.g, 2, [10, 20, 30]))
        self.assertTrue(limit.converged)
        self.assertTrue(limit.quasi_projective)
        self.assertEqual(limit.rank, 1)
        self.assertAlmostEqual(subspace_distance(limit.image, standard_subspace(3, [0])), 0.0)
        self.assertAlmostEqual(subspace_distance(limit.kernel, standard_subspace(3, [1, 2])), 0.0)
        far = normalize_projective([1, 1, 1])
        self.assertLess(point_subspace_distance(limit.apply(far), limit.image), 1e-12)

    def test_sequence_preconditions(self):
        with self.assertRaises(EmptySequence):
            quasi_projective_limit([])
        with self.assertRaises(PreconditionViolated):
            quasi_projective_limit([np.eye(3), np.eye(3)])

    def test_invertible_limit(self):
        limit = quasi_projective_limit([np.eye(3)] * 3)
        self.assertFalse(limit.quasi_projective)
        with self.assertRaises(PreconditionViolated):
            image_kernel_distance(limit)

    def test_power_limit_types(self):
        loxodromic = power_limit(self.g, 2)
        self.assertTrue(loxodromic.converged)
        self.assertEqual(sequence_type(loxodromic), SequenceType.LOXODROMIC_TYPE)
        parabolic = power_limit(self.parabolic, 3)
        self.assertTrue(parabolic.converged)
        self.assertEqual(parabolic.rank, 1)
        self.assertEqual(sequence_type(parabolic), SequenceType.PARABOLIC_TYPE)
        self.assertAlmostEqual(subspace_distance(parabolic.image, standard_subspace(4, [0])), 0.0, places=6)

    def test_mixed_conjugation_sequence_is_parabolic(self):
        # both factors are loxodromic, yet g^m b g^-m tends to the nilpotent [[0, 1], [0, 0]]
        b = MoebiusElement(np.array([[1.0, 1.0], [1.0, 2.0]]), "b")
        limit = quasi_projective_limit(conjugation_sequence(self.g, b, 3, 30))
        self.assertTrue(limit.converged)
        self.assertEqual(limit.rank, 1)
        self.assertEqual(sequence_type(limit), SequenceType.PARABOLIC_TYPE)
        self.assertLess(subspace_distance(limit.image, standard_subspace(4, [0])), 1e-10)
        self.assertLess(subspace_distance(limit.kernel, standard_subspace(4, [0, 1, 2])), 1e-10)

    def test_power_limit_of_plain_matrix(self):
        limit = power_limit(np.diag([8.0, 2.0, 0.5, 0.125]))
        self.assertEqual(limit.rank, 1)
        with self.assertRaises(PreconditionViolated):
            power_limit(self.g)


class TestLimitFlags(unittest.TestCase):
    def test_diagonal_flags(self):
        g = MoebiusElement(np.diag([2.0, 0.5]), "g")
        powers = [MoebiusElement(np.linalg.matrix_power(g.mat, m), "g") for m in (8, 9, 10)]
        flags = limit_flags(powers, 3)
        self.assertEqual(flags.n, 3)
        for j in range(1, 4):
            with self.subTest(j=j):
                self.assertLess(subspace_distance(flags.forward_step(j), standard_subspace(4, range(j))), 1e-10)
        for j in range(2, 5):
            with self.subTest(j=j):
                self.assertLess(subspace_distance(flags.backward_step(j),
                                                  standard_subspace(4, range(j - 1, 4))), 1e-10)
        self.assertLess(flags.route_agreement, 1e-6)
        self.assertFalse(flags.gauge_warning)
        with self.assertRaises(PreconditionViolated):
            flags.backward_step(1)

    def test_conjugated_flags(self):
        B = MoebiusElement(np.array([[1.0, 1.0], [1.0, 2.0]]), "b")
        D = np.diag([2.0, 0.5])
        for n in (2, 3):
            rep = irrep(B, n).mat
            for top, tol in ((10, 1e-4), (20, 1e-8)):
                with self.subTest(n=n, top=top):
                    seq = [MoebiusElement(B.mat @ np.linalg.matrix_power(D, m) @ B.inverse().mat, "g")
                           for m in range(top - 2, top + 1)]
                    flags = limit_flags(seq, n)
                    self.assertLess(flags.route_agreement, 1e-6)
                    for j in range(1, n + 1):
                        expected = standard_subspace(n + 1, range(j)).map(rep)
                        self.assertLess(subspace_distance(flags.forward_step(j), expected), tol)
                    for j in range(2, n + 2):
                        expected = standard_subspace(n + 1, range(j - 1, n + 1)).map(rep)
                        self.assertLess(subspace_distance(flags.backward_step(j), expected), tol)

    def test_route_disagreement_raises(self):
        g = MoebiusElement(np.diag([2.0, 0.5]), "g")
        powers = [MoebiusElement(np.linalg.matrix_power(g.mat, m), "g") for m in (8, 9, 10)]
        with self.assertRaises(NotConverged) as ctx:
            limit_flags(powers, 2, agreement_tol=-1.0)
        self.assertIsInstance(ctx.exception.estimate, FlagPair)
        self.assertLess(ctx.exception.details["route_agreement"], 1e-6)
        self.assertEqual(len(ctx.exception.details["forward"]), 2)

    def test_not_divergent(self):
        with self.assertRaises(NotDivergent):
            limit_flags([MoebiusElement(np.eye(2))] * 3, 2)


class TestLimitSets(unittest.TestCase):
    def setUp(self):
        self.cyclic = cyclic_loxodromic(2.0)
        self.schottky = schottky_pair()

    def test_myrberg_limit_of_cyclic_group(self):
        sample = myrberg_limit(self.cyclic, 2, 3)
        self.assertEqual(len(sample), 2)
        self.assertEqual(sample.provenance, ["g", "g^-1"])
        np.testing.assert_allclose(sample.entries[0].covector.coords, [0, 0, 1], atol=1e-14)
        np.testing.assert_allclose(sample.entries[1].covector.coords, [1, 0, 0], atol=1e-14)
        self.assertEqual(len(sample.cross_checks), 2)
        self.assertTrue(sample.cross_validated)
        for entry in sample.entries:
            self.assertTrue(entry.hyperplane.contains_point(entry.curve_point))

    def test_myrberg_distance(self):
        sample = myrberg_limit(self.cyclic, 2, 3, cross_checks=0)
        rows = np.array([[0, 0, 1], np.array([1, 1, 1]) / np.sqrt(3)], dtype=complex)
        distances = myrberg_distance(rows, sample)
        self.assertAlmostEqual(distances[0], 0.0)
        self.assertAlmostEqual(distances[1], 1 / np.sqrt(3))

    def test_extended_cg_limit(self):
        sample = extended_cg_limit(self.schottky, 3, 3)
        q = ecg_index(3)
        self.assertEqual(q, 2)
        self.assertEqual(sample.notes, [])
        for entry in sample.entries:
            self.assertEqual(entry.ecg_subspace.proj_dim, q - 1)
            self.assertLess(entry.ecg_osculating_gap, 1e-8)
        self.assertEqual(len(extended_cg_limit(self.cyclic, 4, 2).notes), 1)

    def test_ecg_distance(self):
        sample = extended_cg_limit(self.cyclic, 3, 2)
        rows = np.array([[1, 0, 0, 0], [0, 1, 0, 0], np.ones(4) / 2], dtype=complex)
        distances = ecg_distance(rows, sample)
        self.assertAlmostEqual(distances[0], 0.0)
        self.assertAlmostEqual(distances[1], 0.0)
        self.assertAlmostEqual(distances[2], 2 ** -0.5)

    def test_cg_limit_lies_on_the_curve(self):
        found = cg_limit(self.schottky, 3, 3)
        self.assertGreater(len(found), 0)
        for lp in found:
            self.assertLess(chordal_distance(lp.point, embed(attracting_point(lp.word), 3)), 1e-8)

    def test_cg_limit_shares_a_cache(self):
        cache = RepCache()
        first = cg_limit(self.schottky, 3, 3, cache=cache)
        self.assertEqual((len(cache), cache.hits), (4 + 12 + 36, 0))
        second = cg_limit(self.schottky, 3, 3, cache=cache)
        self.assertEqual(cache.hits, 4 + 12 + 36)
        self.assertEqual([lp.word.label for lp in first], [lp.word.label for lp in second])
        equivariance_defect(myrberg_limit(self.schottky, 3, 3, cross_checks=0), self.schottky, 1, cache=cache)
        # the generators and inverses are the length-one words already cached
        self.assertEqual(cache.hits, 4 + 12 + 36 + 4)

    def test_equivariance_defect(self):
        sample = myrberg_limit(self.schottky, 2, 5, cross_checks=0)
        defect = equivariance_defect(sample, self.schottky, 3)
        self.assertGreater(defect.checked, 0)
        self.assertLess(defect.point, 1e-5)
        self.assertLess(defect.hyperplane, 1e-4)
        self.assertIsNone(defect.ecg)


class TestOrbits(unittest.TestCase):
    def setUp(self):
        self.cyclic = cyclic_loxodromic(2.0)

    def test_orbit_accumulation(self):
        seed = normalize_projective([1, 1, 1])
        cloud = orbit_accumulation(self.cyclic, 2, [seed], 4, targets=[embed(normalize_projective([1, 0]), 2)])
        self.assertEqual(cloud.lengths, [2, 3, 4])
        self.assertEqual(cloud.images_computed, 6)
        self.assertEqual(cloud.distinct, 6)
        self.assertEqual(len(cloud), 6)
        self.assertLess(cloud.max_myrberg_distance, 1 / np.sqrt(3))
        self.assertLess(cloud.target_distances[0], 1e-2)
        self.assertEqual({p.seed for p in cloud.points}, {0})

    def test_orbit_accumulation_preconditions(self):
        with self.assertRaises(PreconditionViolated):
            orbit_accumulation(self.cyclic, 2, [], 3)
        with self.assertRaises(PreconditionViolated):
            orbit_accumulation(self.cyclic, 2, [normalize_projective([1, 0, 0])], 3)
        with self.assertRaises(PreconditionViolated):
            orbit_accumulation(self.cyclic, 2, [normalize_projective([1, 1, 1, 1])], 3)

    def test_proper_discontinuity(self):
        sample = extended_cg_limit(self.cyclic, 3, 4)
        rng = np.random.default_rng(0)
        region = complement_sample(lambda rows: ecg_distance(rows, sample), 3, 3, 0.1, rng)
        report = proper_discontinuity_check(self.cyclic, 3, region, 4, sep=0.05, ecg=sample)
        self.assertEqual(report.words_checked, 8)
        self.assertTrue(report.stable_beyond(5))
        with self.assertRaises(PreconditionViolated):
            proper_discontinuity_check(self.cyclic, 3, [normalize_projective([1, 0, 0, 0])], 4, ecg=sample)

    def test_complement_sample_gives_up(self):
        rng = np.random.default_rng(0)
        with self.assertRaises(PreconditionViolated):
            complement_sample(lambda rows: np.zeros(rows.shape[0]), 4, 2, 0.1, rng, attempts=2)


class TestDiagnostics(unittest.TestCase):
    def setUp(self):
        self.schottky = schottky_pair()

    def test_domination_slope(self):
        fits = [dominated_diagnostic(self.schottky, 3, p, 4) for p in (1, 2, 3)]
        for fit in fits:
            self.assertLess(fit.slope, 0)
            self.assertEqual(fit.samples + fit.skipped, 4 + 12 + 36 + 108)
        self.assertEqual(fits[0].skipped, 0)
        self.assertAlmostEqual(fits[0].slope, fits[2].slope, places=6)

    def test_measured_slope_matches_two_by_two_law(self):
        words = list(enumerate_words(self.schottky, 3))
        lengths = [w.length for w in words]
        law = [-2.0 * np.log(np.linalg.svd(w.mat, compute_uv=False)[0]) for w in words]
        expected_slope, _ = np.polyfit(lengths, law, 1)
        for n, p in ((2, 1), (4, 4)):
            with self.subTest(n=n, p=p):
                fit = dominated_diagnostic(self.schottky, n, p, 3)
                self.assertEqual((fit.samples, fit.skipped), (len(words), 0))
                self.assertAlmostEqual(fit.slope, expected_slope, places=6)

    def test_cyclic_and_unitary_slopes(self):
        for n, p in ((2, 1), (4, 2)):
            with self.subTest(n=n, p=p):
                fit = dominated_diagnostic(cyclic_loxodromic(2.0), n, p, 6)
                self.assertAlmostEqual(fit.slope, -np.log(4.0), places=8)
                self.assertLess(fit.residual, 1e-8)
        self.assertAlmostEqual(dominated_diagnostic(rotation(), 3, 2, 4).slope, 0.0, places=10)

    def test_ratios_past_the_floor_are_skipped(self):
        fit = dominated_diagnostic(self.schottky, 8, 5, 4)
        self.assertGreater(fit.skipped, 0)
        self.assertLess(fit.complete_length, 4)
        self.assertEqual(fit.samples + fit.skipped, 4 + 12 + 36 + 108)
        with self.assertRaises(Inconclusive):
            dominated_diagnostic(cyclic_loxodromic(100.0), 8, 4, 3)

    def test_domination_preconditions(self):
        with self.assertRaises(PreconditionViolated):
            dominated_diagnostic(self.schottky, 3, 4, 4)
        with self.assertRaises(PreconditionViolated):
            dominated_diagnostic(self.schottky, 3, 1, 1)

    def test_transversality(self):
        report = transversality_report(self.schottky, 3, 2, 2)
        self.assertGreater(report.pairs, 0)
        self.assertGreater(report.min_transversality, 1e-9)

    def test_parabolic_group_has_no_limit_sample(self):
        with self.assertRaises(NoLoxodromicFound):
            myrberg_limit(cyclic_parabolic(), 2, 3)

    def test_subsample(self):
        self.assertEqual(subsample(2, 8), [0, 1])
        picked = subsample(10, 3)
        self.assertEqual(len(picked), 3)
        self.assertEqual((picked[0], picked[-1]), (0, 9))
        self.assertEqual(subsample(5, 0), [])


if __name__ == "__main__":
    unittest.main()

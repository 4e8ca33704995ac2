import unittest
import os
import sys
import numpy as np
from scipy.stats import unitary_group

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from sources.errors import GeometryError, NoGap, ZeroVector, DimensionMismatch
from sources.projlin import (
    Flag,
    ProjPoint,
    ProjSubspace,
    chordal_distance,
    dominant_subspace,
    dominant_vector,
    is_proximal,
    normalize_projective,
    point_subspace_distance,
    random_points,
    repelling_subspace,
    singular_gaps,
    standard_subspace,
    subspace_distance,
    svd,
    transversality,
)


class TestProjPoint(unittest.TestCase):
    def test_normalize_scales_to_unit_norm(self):
        p = normalize_projective([2, 0])
        np.testing.assert_allclose(p.coords, [1, 0])

    def test_canonical_phase(self):
        p = normalize_projective([1j, 1j])
        np.testing.assert_allclose(p.coords, [2 ** -0.5, 2 ** -0.5])
        q = normalize_projective([0, -3j, 4])
        self.assertEqual(q.coords[0], 0)
        self.assertGreater(q.coords[1].real, 0)
        self.assertAlmostEqual(q.coords[1].imag, 0.0)

    def test_same_class_same_representative(self):
        v = np.array([1 + 2j, -0.5j, 3])
        np.testing.assert_allclose(normalize_projective(v).coords,
                                   normalize_projective((2 - 7j) * v).coords, atol=1e-14)

    def test_zero_vector(self):
        with self.assertRaises(ZeroVector):
            normalize_projective([0, 0, 0])

    def test_direct_construction_checks_invariants(self):
        with self.assertRaises(GeometryError):
            ProjPoint(np.array([2.0, 0.0]))
        with self.assertRaises(GeometryError):
            ProjPoint(np.array([-1.0, 0.0]))

    def test_chordal_distance(self):
        e0 = normalize_projective([1, 0])
        e1 = normalize_projective([0, 1])
        diagonal = normalize_projective([1, 1])
        self.assertAlmostEqual(chordal_distance(e0, e1), 1.0)
        self.assertAlmostEqual(chordal_distance(e0, e0), 0.0)
        self.assertAlmostEqual(chordal_distance(e0, diagonal), 2 ** -0.5)
        self.assertAlmostEqual(chordal_distance(e0, diagonal), chordal_distance(diagonal, e0))

    def test_chordal_distance_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            chordal_distance(normalize_projective([1, 0]), normalize_projective([1, 0, 0]))

    def test_random_points(self):
        rng = np.random.default_rng(3)
        points = random_points(rng, 7, 4)
        self.assertEqual(len(points), 7)
        for p in points:
            self.assertEqual(p.dim_ambient, 4)
            self.assertAlmostEqual(np.linalg.norm(p.coords), 1.0)


class TestProjSubspace(unittest.TestCase):
    def test_from_covector(self):
        plane = ProjSubspace.from_covector([1, 0, 0])
        self.assertTrue(plane.is_hyperplane)
        self.assertEqual(plane.proj_dim, 1)
        self.assertTrue(plane.contains_point(normalize_projective([0, 1, 0])))
        self.assertFalse(plane.contains_point(normalize_projective([1, 1, 0])))
        np.testing.assert_allclose(plane.covector().coords, [1, 0, 0], atol=1e-12)

    def test_covector_of_non_hyperplane(self):
        with self.assertRaises(GeometryError):
            standard_subspace(4, [0]).covector()

    def test_non_orthonormal_basis_rejected(self):
        with self.assertRaises(GeometryError):
            ProjSubspace(np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]))

    def test_subspace_distance(self):
        a = standard_subspace(2, [0])
        b = standard_subspace(2, [1])
        self.assertAlmostEqual(subspace_distance(a, a), 0.0)
        self.assertAlmostEqual(subspace_distance(a, b), 1.0)
        with self.assertRaises(DimensionMismatch):
            subspace_distance(standard_subspace(3, [0]), standard_subspace(3, [0, 1]))

    def test_subspace_distance_worked_values(self):
        e1 = standard_subspace(2, [0])
        diagonal = ProjSubspace.from_span(np.array([1.0, 1.0]) / np.sqrt(2))
        self.assertAlmostEqual(subspace_distance(e1, diagonal), np.sqrt(0.5))
        plane = standard_subspace(3, [0, 1])
        self.assertAlmostEqual(point_subspace_distance(normalize_projective([1, 0, 1]), plane), np.sqrt(0.5))

    def test_subspace_distance_triangle_inequality(self):
        rng = np.random.default_rng(4)
        for size, dim in ((3, 1), (4, 2), (6, 3), (7, 5)):
            for _ in range(30):
                with self.subTest(size=size, dim=dim):
                    a, b, c = (ProjSubspace.from_span(rng.standard_normal((size, dim))
                                                      + 1j * rng.standard_normal((size, dim))) for _ in range(3))
                    self.assertLessEqual(subspace_distance(a, c),
                                         subspace_distance(a, b) + subspace_distance(b, c) + 1e-9)
                    self.assertAlmostEqual(subspace_distance(a, b), subspace_distance(b, a))

    def test_point_subspace_distance(self):
        plane = standard_subspace(3, [0, 1])
        self.assertAlmostEqual(point_subspace_distance(normalize_projective([1, 1, 0]), plane), 0.0)
        self.assertAlmostEqual(point_subspace_distance(normalize_projective([0, 0, 1]), plane), 1.0)

    def test_transversality(self):
        line = standard_subspace(3, [0])
        self.assertAlmostEqual(transversality(line, standard_subspace(3, [1, 2])), 1.0)
        self.assertAlmostEqual(transversality(line, standard_subspace(3, [0, 1])), 0.0)

    def test_map(self):
        perm = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
        image = standard_subspace(3, [0]).map(perm)
        self.assertAlmostEqual(subspace_distance(image, standard_subspace(3, [1])), 0.0)

    def test_flag_must_be_nested(self):
        Flag((standard_subspace(3, [0]), standard_subspace(3, [0, 1])))
        with self.assertRaises(GeometryError):
            Flag((standard_subspace(3, [2]), standard_subspace(3, [0, 1])))
        with self.assertRaises(GeometryError):
            Flag((standard_subspace(3, [0, 1]), standard_subspace(3, [0, 2])))


class TestSingularValues(unittest.TestCase):
    def setUp(self):
        self.diag = np.diag([4.0, 1.0, 0.25])

    def test_svd_reconstructs(self):
        rng = np.random.default_rng(0)
        mat = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        triple = svd(mat)
        np.testing.assert_allclose(triple.reconstruct(), mat, atol=1e-12)
        self.assertTrue(np.all(np.diff(triple.sigma) <= 0))

    def test_svd_random_sizes(self):
        rng = np.random.default_rng(12)
        for size in range(1, 13):
            for _ in range(8):
                with self.subTest(size=size):
                    mat = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
                    triple = svd(mat)
                    scale = np.linalg.norm(mat)
                    self.assertLess(np.linalg.norm(triple.reconstruct() - mat), 1e-10 * scale)
                    np.testing.assert_allclose(triple.u.conj().T @ triple.u, np.eye(size), atol=1e-10)
                    np.testing.assert_allclose(triple.v.conj().T @ triple.v, np.eye(size), atol=1e-10)

    def test_singular_values_are_unitarily_invariant(self):
        rng = np.random.default_rng(5)
        for size in (2, 5, 12):
            with self.subTest(size=size):
                mat = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
                Q, R = unitary_group.rvs(size, random_state=rng), unitary_group.rvs(size, random_state=rng)
                sigma = svd(mat).sigma
                np.testing.assert_allclose(svd(Q @ mat @ R).sigma, sigma, atol=1e-10 * sigma[0])

    def test_subspaces_of_rotated_diagonal(self):
        Q = unitary_group.rvs(3, random_state=np.random.default_rng(9))
        left = dominant_subspace(Q @ self.diag, 1)
        self.assertLess(subspace_distance(left, ProjSubspace.from_span(Q[:, 0])), 1e-12)
        M = self.diag @ Q
        bottom = repelling_subspace(M, 1)
        expected = ProjSubspace.from_span(Q.conj().T[:, 1:])
        self.assertLess(subspace_distance(bottom, expected), 1e-12)
        # S_{n-p}(M) is the orthogonal complement of U_p(M^*)
        top = dominant_subspace(M.conj().T, 1)
        np.testing.assert_allclose(top.projector() + bottom.projector(), np.eye(3), atol=1e-12)
        self.assertGreater(transversality(dominant_subspace(M, 1), bottom), 0.1)

    def test_singular_gaps(self):
        gaps = singular_gaps(self.diag)
        self.assertEqual([p for p, _ in gaps], [1, 2])
        for _, ratio in gaps:
            self.assertAlmostEqual(ratio, 0.25)
        self.assertEqual(singular_gaps(np.eye(3)), [])

    def test_dominant_and_repelling_subspaces(self):
        top = dominant_subspace(self.diag, 1)
        self.assertAlmostEqual(subspace_distance(top, standard_subspace(3, [0])), 0.0)
        bottom = repelling_subspace(self.diag, 1)
        self.assertAlmostEqual(subspace_distance(bottom, standard_subspace(3, [1, 2])), 0.0)

    def test_no_gap(self):
        with self.assertRaises(NoGap):
            dominant_subspace(np.eye(3), 1)
        with self.assertRaises(NoGap):
            dominant_subspace(self.diag, 3)

    def test_proximal(self):
        self.assertTrue(is_proximal(self.diag))
        self.assertFalse(is_proximal(np.diag([1.0, -1.0])))
        np.testing.assert_allclose(dominant_vector(self.diag).coords, [1, 0, 0], atol=1e-12)
        with self.assertRaises(NoGap):
            dominant_vector(np.diag([1.0, -1.0]))


if __name__ == "__main__":
    unittest.main()

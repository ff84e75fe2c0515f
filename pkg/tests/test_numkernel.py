# tests/test_numkernel.py
import os
import unittest
import sys
from pathlib import Path
from unittest import mock

import numpy as np
from hypothesis import given, settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent.parent))
from nilsym.errors import InputError, NumericalAmbiguityError
from nilsym.utils import config
from nilsym.utils.numkernel import (
    SubspaceBasis,
    as_matrix,
    decide_rank,
    gram_orthonormalize,
    matrix_rank,
    orthogonal_complement,
    rank_revealing_nullspace,
    subspace_contains,
    subspace_equal,
    symmetric_eigensplit,
)

small_ints = st.integers(min_value=-3, max_value=3)


class TestRankDecisions(unittest.TestCase):
    def setUp(self):
        config.reset()

    def test_nullspace_of_row(self):
        """Kernel of [1, 1] is the antidiagonal with a positive leading entry"""
        kernel = rank_revealing_nullspace([[1.0, 1.0]])
        self.assertEqual(kernel.dim, 1)
        np.testing.assert_allclose(kernel.vectors[0], [np.sqrt(0.5), -np.sqrt(0.5)], atol=1e-12)

    def test_zero_matrix_has_full_kernel(self):
        self.assertEqual(rank_revealing_nullspace(np.zeros((2, 3))).dim, 3)

    def test_no_rows_gives_identity(self):
        kernel = rank_revealing_nullspace(np.zeros((0, 4)))
        np.testing.assert_allclose(kernel.vectors, np.eye(4))

    def test_tiny_singular_value_is_zero(self):
        self.assertEqual(matrix_rank(np.diag([1.0, 1e-12])), 1)

    def test_clear_singular_value_counts(self):
        self.assertEqual(matrix_rank(np.diag([1.0, 1e-6])), 2)

    def test_ambiguous_singular_value_raises(self):
        """A singular value within a factor 10 of tol * sigma_max is refused"""
        with self.assertRaises(NumericalAmbiguityError) as ctx:
            matrix_rank(np.diag([1.0, 5e-9]))
        self.assertAlmostEqual(ctx.exception.threshold, 1e-9)
        self.assertEqual(len(ctx.exception.singular_values), 2)
        self.assertEqual(ctx.exception.exit_code, 3)

    def test_band_follows_ambiguity_factor(self):
        config.configure(ambiguity_factor=2.0)
        self.assertEqual(decide_rank(np.array([1.0, 5e-9])), 2)

    def test_non_finite_input(self):
        with self.assertRaises(InputError):
            as_matrix([[1.0, np.nan]])

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.lists(small_ints, min_size=5, max_size=5), min_size=1, max_size=4))
    def test_nullspace_property(self, rows):
        """Kernel vectors are annihilated and the dimensions add up"""
        A = np.array(rows, dtype=float)
        kernel = rank_revealing_nullspace(A)
        self.assertEqual(kernel.dim, 5 - np.linalg.matrix_rank(A))
        if kernel.dim:
            self.assertLess(np.abs(A @ kernel.vectors.T).max(), 1e-9)
            np.testing.assert_allclose(kernel.vectors @ kernel.vectors.T, np.eye(kernel.dim), atol=1e-10)


class TestSubspaces(unittest.TestCase):
    def setUp(self):
        config.reset()

    def test_gram_orthonormalize_drops_dependent(self):
        gram = np.diag([2.0, 1.0])
        basis = gram_orthonormalize([[1.0, 0.0], [1.0, 1.0], [2.0, 0.0]], gram)
        self.assertEqual(basis.dim, 2)
        self.assertLess(basis.orthonormality_residual(), 1e-12)

    def test_equal_spans_different_bases(self):
        A = gram_orthonormalize([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], np.eye(3))
        B = gram_orthonormalize([[1.0, 1.0, 0.0], [1.0, -1.0, 0.0]], np.eye(3))
        result = subspace_equal(A, B)
        self.assertTrue(result.equal)
        self.assertLess(result.distance, 1e-12)

    def test_principal_angle_distance(self):
        t = 0.3
        A = gram_orthonormalize([[1.0, 0.0]], np.eye(2))
        B = gram_orthonormalize([[np.cos(t), np.sin(t)]], np.eye(2))
        result = subspace_equal(A, B)
        self.assertFalse(result.equal)
        self.assertAlmostEqual(result.distance, t, places=10)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(min_value=-1.0, max_value=1.0), st.floats(min_value=-1.0, max_value=1.0))
    def test_equivalence_at_fixed_tolerance(self, a, b):
        """Steps of tol/10 stay equal under chaining; a 10*tol step never does"""
        tol = 1e-6

        def line(t):
            return gram_orthonormalize([[np.cos(t), np.sin(t), 0.0]], np.eye(3))

        A, B, C = line(0.0), line(a * tol / 10), line((a + b) * tol / 10)
        for X, Y in [(A, A), (A, B), (B, A), (B, C), (C, B), (A, C)]:
            self.assertTrue(subspace_equal(X, Y, tol=tol).equal)
        far = line(10 * tol)
        self.assertFalse(subspace_equal(A, far, tol=tol).equal)
        self.assertFalse(subspace_equal(far, A, tol=tol).equal)

    def test_angles_measured_in_gram(self):
        gram = np.diag([4.0, 1.0])
        A = gram_orthonormalize([[1.0, 0.0]], gram)
        B = gram_orthonormalize([[3.0, 0.0]], gram)
        self.assertTrue(subspace_equal(A, B).equal)

    def test_dimension_mismatch(self):
        A = SubspaceBasis.full(np.eye(3))
        B = SubspaceBasis.zero(3)
        result = subspace_equal(A, B)
        self.assertFalse(result.equal)
        self.assertAlmostEqual(result.distance, np.pi / 2)

    def test_zero_subspaces_equal(self):
        self.assertEqual(tuple(subspace_equal(SubspaceBasis.zero(2), SubspaceBasis.zero(2))), (True, 0.0))

    def test_complement_and_containment(self):
        gram = np.array([[2.0, 1.0], [1.0, 2.0]])
        line = gram_orthonormalize([[1.0, 0.0]], gram)
        comp = orthogonal_complement(line)
        self.assertEqual(comp.dim, 1)
        self.assertLess(abs(line.vectors[0] @ gram @ comp.vectors[0]), 1e-12)
        self.assertTrue(subspace_contains(SubspaceBasis.full(gram), line))
        self.assertFalse(subspace_contains(line, comp))

    def test_projection(self):
        basis = gram_orthonormalize([[1.0, 0.0, 0.0]], np.eye(3))
        np.testing.assert_allclose(basis.project(np.array([2.0, 3.0, 4.0])), [2.0, 0.0, 0.0])

    def test_non_positive_gram(self):
        with self.assertRaises(InputError):
            gram_orthonormalize([[1.0, 0.0]], np.diag([1.0, -1.0]))

    def test_eigensplit_clusters(self):
        clusters = symmetric_eigensplit(np.diag([3.0, 1.0, 1.0]))
        self.assertEqual([round(v) for v, _ in clusters], [1, 3])
        self.assertEqual([b.dim for _, b in clusters], [2, 1])


class TestConfig(unittest.TestCase):
    def setUp(self):
        config.reset()

    def tearDown(self):
        config.reset()

    def test_defaults(self):
        self.assertEqual(config.get("tol"), 1e-9)
        self.assertEqual(config.get("theorem_tol"), 1e-8)
        self.assertEqual(config.get("seed"), 0)

    def test_environment_override(self):
        with mock.patch.dict(os.environ, {"NILSYM_TOL": "1e-7"}):
            config.reset()
            self.assertEqual(config.get("tol"), 1e-7)
            config.configure(tol=1e-6)
            self.assertEqual(config.get("tol"), 1e-6)

    def test_invalid_values(self):
        with self.assertRaises(ValueError):
            config.configure(tol=-1.0)
        with self.assertRaises(ValueError):
            config.configure(seed=-2)
        with self.assertRaises(ValueError):
            config.configure(max_attempts=0)
        with self.assertRaises(TypeError):
            config.configure(tol="small")

    def test_unknown_setting(self):
        with self.assertRaises(KeyError) as ctx:
            config.get("precision")
        self.assertIn("Available settings", str(ctx.exception))


if __name__ == "__main__":
    unittest.main()

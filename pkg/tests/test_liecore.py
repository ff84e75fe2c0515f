# tests/test_liecore.py
import unittest
import sys
from pathlib import Path

import numpy as np
from hypothesis import given, settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent.parent))
from nilsym.errors import InputError, NotCompactError
from nilsym.utils import config
from nilsym.utils.liecore import (
    MetricLieAlgebra,
    ad_invariance_check,
    adjoint,
    bracket,
    center,
    compact_decomposition,
    derived_subalgebra,
    jacobi_residual,
    killing_form,
    killing_kernel_contains_center,
    lower_central_series,
    matrix_lie_algebra,
    nilpotency_step,
    subalgebra,
)
from nilsym.utils.numkernel import gram_orthonormalize


def so3():
    return MetricLieAlgebra.from_upper(3, [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (0, 2, 1, -1.0)])


def heisenberg3():
    return MetricLieAlgebra.from_upper(3, [(1, 2, 0, 1.0)])


class TestMetricLieAlgebra(unittest.TestCase):
    def setUp(self):
        config.reset()

    def test_antisymmetry_synthesized(self):
        L = so3()
        np.testing.assert_allclose(L.constants, -L.constants.transpose(1, 0, 2))
        np.testing.assert_allclose(bracket(L, [0, 1, 0], [1, 0, 0]), [0, 0, -1])

    def test_default_gram_is_identity(self):
        np.testing.assert_allclose(so3().gram, np.eye(3))

    def test_jacobi_violation_rejected(self):
        with self.assertRaises(InputError):
            MetricLieAlgebra.from_upper(3, [(0, 1, 2, 1.0), (1, 2, 1, 1.0)])

    def test_lower_triangle_rejected(self):
        with self.assertRaises(InputError):
            MetricLieAlgebra.from_upper(3, [(1, 0, 2, 1.0)])

    def test_index_out_of_range(self):
        with self.assertRaises(InputError):
            MetricLieAlgebra.from_upper(2, [(0, 1, 2, 1.0)])

    def test_gram_must_be_positive(self):
        with self.assertRaises(InputError):
            MetricLieAlgebra.abelian(2, gram=np.diag([1.0, 0.0]))

    def test_upper_entries_round_trip(self):
        L = so3()
        again = MetricLieAlgebra.from_upper(3, L.upper_entries())
        np.testing.assert_allclose(again.constants, L.constants)

    def test_adjoint_columns(self):
        L = so3()
        ad0 = adjoint(L, [1.0, 0.0, 0.0])
        np.testing.assert_allclose(ad0[:, 1], bracket(L, [1, 0, 0], [0, 1, 0]))


class TestStructure(unittest.TestCase):
    def setUp(self):
        config.reset()

    def test_so3_killing_form(self):
        """[e1,e2]=e3 cyclic with orthonormal gram gives B = -2 I"""
        L = so3()
        np.testing.assert_allclose(killing_form(L), -2.0 * np.eye(3), atol=1e-12)
        self.assertTrue(ad_invariance_check(L))

    def test_heisenberg_center_and_derived(self):
        L = heisenberg3()
        self.assertEqual(center(L).dim, 1)
        self.assertEqual(derived_subalgebra(L).dim, 1)
        self.assertEqual(lower_central_series(L), [3, 1, 0])
        self.assertEqual(nilpotency_step(L), 2)
        self.assertTrue(killing_kernel_contains_center(L))

    def test_semisimple_not_nilpotent(self):
        self.assertIsNone(nilpotency_step(so3()))

    def test_abelian_step_one(self):
        self.assertEqual(nilpotency_step(MetricLieAlgebra.abelian(2)), 1)

    def test_compact_split_of_u2(self):
        i = 1j
        mats = [np.array([[i, 0], [0, i]]), np.array([[i, 0], [0, -i]]), np.array([[0, i], [i, 0]]), np.array([[0, 1], [-1, 0]], dtype=complex)]
        real = [np.kron(A.real, np.eye(2)) + np.kron(A.imag, np.array([[0.0, -1.0], [1.0, 0.0]])) for A in mats]
        L = matrix_lie_algebra(real, form_scale=0.25)
        np.testing.assert_allclose(L.gram, np.eye(4), atol=1e-12)
        c, gbar = compact_decomposition(L)
        self.assertEqual((c.dim, gbar.dim), (1, 3))
        self.assertEqual(subalgebra(L, gbar).dim, 3)

    def test_heisenberg_not_compact(self):
        with self.assertRaises(NotCompactError):
            compact_decomposition(heisenberg3())

    def test_subalgebra_must_close(self):
        L = so3()
        plane = gram_orthonormalize(np.eye(3)[:2], L.gram)
        with self.assertRaises(InputError):
            subalgebra(L, plane)

    def test_matrix_algebra_must_close(self):
        with self.assertRaises(InputError):
            matrix_lie_algebra([np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([[0.0, 0.0], [1.0, 0.0]])])

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=2, max_value=5))
    def test_so_n_trace_form(self, n):
        """so(n) with -1/2 trace is orthonormal, ad-invariant and satisfies Jacobi"""
        mats = []
        for a in range(n):
            for b in range(a + 1, n):
                E = np.zeros((n, n))
                E[a, b], E[b, a] = 1.0, -1.0
                mats.append(E)
        L = matrix_lie_algebra(mats, form_scale=0.5)
        np.testing.assert_allclose(L.gram, np.eye(len(mats)), atol=1e-12)
        self.assertLess(jacobi_residual(L), 1e-12)
        self.assertTrue(ad_invariance_check(L))


if __name__ == "__main__":
    unittest.main()

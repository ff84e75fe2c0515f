# tests/test_symindex.py
import dataclasses
import unittest
import sys
from pathlib import Path
from unittest import mock

import numpy as np
import scipy.linalg

sys.path.insert(0, str(Path(__file__).parent.parent))
from nilsym.errors import ConventionError, TheoremViolationError
from nilsym.utils import config, isomcalc
from nilsym.utils.catalog import catalog_get
from nilsym.utils.isomcalc import IsotropyAlgebra
from nilsym.utils.lauretbuild import ConstructionInput, build_nilalgebra
from nilsym.utils.liecore import MetricLieAlgebra
from nilsym.utils.numkernel import SubspaceBasis
from nilsym.utils.repnlab import OrthogonalRepresentation
from nilsym.utils.symindex import (
    index_of_symmetry,
    isotropy_fixed_set,
    quotient_construction,
    verify_main_theorem,
)


J = np.array([[0.0, -1.0], [1.0, 0.0]])


def model_for(name, **params):
    return build_nilalgebra(catalog_get(name, params))


class TestFixedSet(unittest.TestCase):
    def setUp(self):
        config.reset()

    def test_heisenberg_fixed_set_is_center(self):
        model = model_for("heisenberg", n=1)
        fixed = isotropy_fixed_set(model.isotropy, model.n.gram)
        self.assertEqual(fixed.dim, 1)
        np.testing.assert_allclose(np.abs(fixed.vectors[0]), [1.0, 0.0, 0.0], atol=1e-12)

    def test_free_two_step_fixed_set_is_zero(self):
        model = model_for("free_two_step", n=3)
        self.assertEqual(isotropy_fixed_set(model.isotropy, model.n.gram).dim, 0)

    def test_trivial_isotropy_fixes_everything(self):
        empty = IsotropyAlgebra(SubspaceBasis.zero(9), np.zeros((0, 3, 3)), np.zeros((0, 3, 3)), 0.0, 0.0)
        self.assertEqual(isotropy_fixed_set(empty).dim, 3)


class TestMainTheorem(unittest.TestCase):
    def setUp(self):
        config.reset()

    def test_heisenberg_two(self):
        report = verify_main_theorem(model_for("heisenberg", n=2))
        self.assertEqual(report.index_of_symmetry, 1)
        self.assertEqual(report.co_index, 4)
        self.assertTrue(report.theorem_holds)
        self.assertFalse(report.symmetric)
        for distance in report.distances.values():
            self.assertLessEqual(distance, 1e-8)

    def test_free_two_step_four(self):
        report = verify_main_theorem(model_for("free_two_step", n=4))
        self.assertEqual(report.index_of_symmetry, 0)
        self.assertEqual((report.s_e.dim, report.fixed_set.dim, report.center.dim), (0, 0, 0))
        self.assertTrue(report.theorem_holds)

    def test_u2_index_one(self):
        model = model_for("u2_on_C2")
        self.assertEqual(verify_main_theorem(model).index_of_symmetry, 1)
        self.assertEqual(index_of_symmetry(model), 1)

    def test_diagnostics_small(self):
        report = verify_main_theorem(model_for("heisenberg_weighted", weights=(1.0, 2.0)))
        for name, value in report.diagnostics.items():
            self.assertLessEqual(value, 1e-9, msg=name)

    def test_violation_raises(self):
        report = verify_main_theorem(model_for("heisenberg", n=1))
        broken = dataclasses.replace(report, equalities={**report.equalities, "s_e~center": False})
        self.assertFalse(broken.theorem_holds)
        with self.assertRaises(TheoremViolationError) as ctx:
            broken.raise_for_violation()
        self.assertIs(ctx.exception.report, broken)
        report.raise_for_violation()

    def test_residual_gate(self):
        report = verify_main_theorem(model_for("heisenberg", n=1))
        self.assertEqual(report.residual_failures, [])
        broken = dataclasses.replace(report, diagnostics={**report.diagnostics, "eq3": 1.0})
        self.assertEqual(broken.residual_failures, ["eq3"])
        self.assertFalse(broken.theorem_holds)
        with self.assertRaises(TheoremViolationError) as ctx:
            broken.raise_for_violation()
        self.assertIn("eq3 residual", str(ctx.exception))

    def test_table_sign_error_aborts(self):
        real = isomcalc.lemma_table

        def flipped(model, u, Y):
            out = real(model, u, Y).copy()
            out[model.g_slice] *= -1
            return out

        model = model_for("heisenberg", n=1)
        with mock.patch("nilsym.utils.isomcalc.lemma_table", side_effect=flipped):
            with self.assertRaises(ConventionError) as ctx:
                verify_main_theorem(model)
        self.assertEqual(ctx.exception.exit_code, 4)


class TestQuotient(unittest.TestCase):
    def setUp(self):
        config.reset()

    def test_heisenberg_quotient_is_flat(self):
        for n in (1, 3):
            quotient, leaf = quotient_construction(catalog_get("heisenberg", {"n": n}))
            self.assertEqual((quotient.kind, quotient.dim), ("flat", 2 * n))
            self.assertEqual(leaf.euclidean_dim, 1)
            self.assertIn("vector bundle", quotient.note)

    def test_u2_quotient(self):
        quotient, leaf = quotient_construction(catalog_get("u2_on_C2"))
        self.assertEqual(quotient.kind, "nilmanifold")
        self.assertEqual(quotient.input.dims, {"g": 3, "V": 4, "c": 0, "gbar": 3})
        self.assertEqual(quotient.euclidean_factor_dim, 0)
        self.assertEqual(leaf.euclidean_dim, 1)
        report = verify_main_theorem(build_nilalgebra(quotient.input))
        self.assertEqual(report.index_of_symmetry, 0)
        self.assertTrue(report.theorem_holds)

    def test_quotient_with_euclidean_factor(self):
        """R + so(3) on R^2 + R^3: so(3) fixes the R^2 block"""
        g = MetricLieAlgebra.from_upper(4, [(1, 2, 3, 1.0), (2, 3, 1, 1.0), (1, 3, 2, -1.0)])
        ad = g.constants.transpose(0, 2, 1)
        weights = [1.0, 0.0, 0.0, 0.0]
        mats = [scipy.linalg.block_diag(w * J, ad[i, 1:, 1:]) for i, w in enumerate(weights)]
        construction = ConstructionInput.create(g, OrthogonalRepresentation(g, mats))
        with self.assertLogs("nilsym.utils.symindex", "WARNING"):
            quotient, leaf = quotient_construction(construction)
        self.assertEqual((quotient.kind, quotient.dim, quotient.euclidean_factor_dim), ("nilmanifold", 8, 2))
        self.assertEqual(quotient.input.dims, {"g": 3, "V": 3, "c": 0, "gbar": 3})
        self.assertEqual(leaf.euclidean_dim, 1)
        self.assertEqual(verify_main_theorem(build_nilalgebra(construction)).index_of_symmetry, 1)
        report = verify_main_theorem(build_nilalgebra(quotient.input))
        self.assertEqual(report.index_of_symmetry, 0)
        self.assertTrue(report.theorem_holds)

    def test_semisimple_quotient_is_identity(self):
        construction = catalog_get("free_two_step", {"n": 3})
        quotient, leaf = quotient_construction(construction)
        self.assertEqual(quotient.kind, "identity")
        self.assertIs(quotient.input, construction)
        self.assertEqual(leaf.euclidean_dim, 0)
        self.assertEqual(quotient.as_dict()["g_dim"], 3)


if __name__ == "__main__":
    unittest.main()

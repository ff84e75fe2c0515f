# tests/test_lauretbuild.py
import unittest
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))
from nilsym.errors import InputError, NotCompactError
from nilsym.utils import config
from nilsym.utils.catalog import catalog_get
from nilsym.utils.lauretbuild import (
    ConstructionInput,
    build_nilalgebra,
    certify_two_step,
    defining_identity_residual,
    nilalgebra_constants,
)
from nilsym.utils.liecore import MetricLieAlgebra, bracket
from nilsym.utils.repnlab import OrthogonalRepresentation

J = np.array([[0.0, -1.0], [1.0, 0.0]])


class TestConstructionInput(unittest.TestCase):
    def setUp(self):
        config.reset()

    def test_dims(self):
        construction = catalog_get("u2_on_C2")
        self.assertEqual(construction.dims, {"g": 4, "V": 4, "c": 1, "gbar": 3})

    def test_base_mismatch(self):
        g = MetricLieAlgebra.abelian(1)
        rep = OrthogonalRepresentation(MetricLieAlgebra.abelian(2), [J, 2 * J])
        with self.assertRaises(InputError):
            ConstructionInput.create(g, rep)

    def test_invalid_representation_rejected(self):
        g = MetricLieAlgebra.abelian(2)
        rep = OrthogonalRepresentation(g, [J, J])
        with self.assertRaises(InputError):
            ConstructionInput.create(g, rep)

    def test_inner_product_not_ad_invariant(self):
        """so(3) with an unequal metric: its standard representation is fine, the split is not"""
        g = MetricLieAlgebra.from_upper(3, [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (0, 2, 1, -1.0)], gram=np.diag([1.0, 1.0, 2.0]))
        rep = OrthogonalRepresentation(g, g.constants.transpose(0, 2, 1))
        with self.assertRaises(NotCompactError):
            ConstructionInput.create(g, rep)


class TestBuild(unittest.TestCase):
    def setUp(self):
        config.reset()

    def test_heisenberg_bracket(self):
        """[e2, e3] = e1 for the complex structure on R^2"""
        model = build_nilalgebra(catalog_get("heisenberg", {"n": 1}))
        self.assertEqual(model.dim, 3)
        np.testing.assert_allclose(bracket(model.n, [0, 1, 0], [0, 0, 1]), [1, 0, 0], atol=1e-12)

    def test_so2_matches_heisenberg(self):
        """so(2) on R^2 is R acting by -J; flipping the sign of e1 gives heisenberg(1)"""
        free = build_nilalgebra(catalog_get("free_two_step", {"n": 2})).n
        heis = build_nilalgebra(catalog_get("heisenberg", {"n": 1})).n
        flip = np.array([-1.0, 1.0, 1.0])
        np.testing.assert_allclose(np.einsum("ijk,i,j,k->ijk", free.constants, flip, flip, flip), heis.constants, atol=1e-12)
        np.testing.assert_allclose(free.gram, heis.gram, atol=1e-12)

    def test_only_v_brackets(self):
        construction = catalog_get("free_two_step", {"n": 3})
        c = nilalgebra_constants(construction.g, construction.rep)
        m = construction.g.dim
        self.assertEqual(np.abs(c[:m]).max(), 0.0)
        self.assertEqual(np.abs(c[:, :m]).max(), 0.0)
        self.assertEqual(np.abs(c[..., m:]).max(), 0.0)

    def test_certificate(self):
        for name, params in [("heisenberg", {"n": 2}), ("free_two_step", {"n": 4}), ("sp1_on_H", {})]:
            model = build_nilalgebra(catalog_get(name, params))
            report = certify_two_step(model)
            self.assertTrue(report.ok, msg=name)
            self.assertEqual(report.step, 2)
            self.assertLess(defining_identity_residual(model), 1e-12)

    def test_non_identity_gram(self):
        """Scaling the metric on g rescales the bracket by the inverse"""
        g = MetricLieAlgebra.abelian(1, gram=[[4.0]])
        rep = OrthogonalRepresentation(g, [J])
        model = build_nilalgebra(ConstructionInput.create(g, rep))
        np.testing.assert_allclose(bracket(model.n, [0, 1, 0], [0, 0, 1]), [0.25, 0, 0], atol=1e-12)
        self.assertTrue(certify_two_step(model).ok)

    def test_embeddings(self):
        model = build_nilalgebra(catalog_get("u2_on_C2"))
        self.assertEqual(model.center_in_n.dim, 1)
        self.assertEqual(model.gbar_in_n.dim, 3)
        self.assertEqual(model.v_in_n.dim, 4)
        np.testing.assert_allclose(model.embed_v([1, 0, 0, 0]), np.eye(8)[4])

    def test_seed_and_tol_recorded(self):
        model = build_nilalgebra(catalog_get("heisenberg", {"n": 1}), seed=7, tol=1e-10)
        self.assertEqual((model.seed, model.tol), (7, 1e-10))


if __name__ == "__main__":
    unittest.main()

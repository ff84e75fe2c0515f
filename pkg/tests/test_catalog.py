# tests/test_catalog.py
import unittest
import sys
from pathlib import Path

import numpy as np
import scipy.linalg

sys.path.insert(0, str(Path(__file__).parent.parent))
from nilsym.errors import InputError
from nilsym.utils import catalog as catalog_module
from nilsym.utils import config
from nilsym.utils.catalog import (
    catalog_expected,
    catalog_get,
    catalog_names,
    parse_params,
    register,
    sweep_entries,
)

J = np.array([[0.0, -1.0], [1.0, 0.0]])
BUILTIN = ["free_two_step", "heisenberg", "heisenberg_weighted", "sp1_on_H", "su2_adjoint", "u2_on_C2"]


class TestRegistry(unittest.TestCase):
    def setUp(self):
        config.reset()
        self._saved = dict(catalog_module._entries)

    def tearDown(self):
        catalog_module._entries.clear()
        catalog_module._entries.update(self._saved)

    def test_builtin_names(self):
        self.assertEqual(catalog_names(), BUILTIN)

    def test_unknown_entry_lists_available(self):
        with self.assertRaises(InputError) as ctx:
            catalog_get("heisenburg")
        self.assertIn("Available entries", str(ctx.exception))
        self.assertIn("heisenberg", str(ctx.exception))

    def test_unknown_parameter(self):
        with self.assertRaises(InputError):
            catalog_get("heisenberg", {"m": 2})

    def test_register_validation(self):
        with self.assertRaises(ValueError):
            register("", catalog_get, catalog_expected)
        with self.assertRaises(ValueError):
            register(" padded", catalog_get, catalog_expected)
        with self.assertRaises(ValueError):
            register("all", catalog_get, catalog_expected)
        with self.assertRaises(TypeError):
            register("custom", "not callable", catalog_expected)

    def test_register_custom_entry(self):
        expected = catalog_module.ExpectedResults(1, 1, 1)
        register("circle", lambda: catalog_get("heisenberg", {"n": 1}), lambda: expected)
        self.assertIn("circle", catalog_names())
        self.assertEqual(catalog_get("circle").dims["V"], 2)
        self.assertIs(catalog_expected("circle"), expected)

    def test_sweep_defaults(self):
        entries = sweep_entries()
        self.assertEqual(len(entries), 13)
        self.assertIn(("heisenberg", {"n": 4}), entries)
        self.assertIn(("heisenberg_weighted", {"weights": (1.0, 1.0)}), entries)
        self.assertIn(("free_two_step", {"n": 2}), entries)
        self.assertIn(("sp1_on_H", {}), entries)


class TestParams(unittest.TestCase):
    def test_integer(self):
        self.assertEqual(parse_params("heisenberg", ["n=3"]), {"n": 3})

    def test_weights(self):
        self.assertEqual(parse_params("heisenberg_weighted", ["weights=1,2.5"]), {"weights": (1.0, 2.5)})

    def test_bad_values(self):
        for name, item in [("heisenberg", "n=0"), ("heisenberg", "n=two"), ("heisenberg", "n"), ("heisenberg_weighted", "weights=1,-1")]:
            with self.assertRaises(InputError, msg=item):
                parse_params(name, [item])

    def test_unknown_key(self):
        with self.assertRaises(InputError):
            parse_params("su2_adjoint", ["n=2"])


class TestGenerators(unittest.TestCase):
    def setUp(self):
        config.reset()

    def test_heisenberg_dims(self):
        construction = catalog_get("heisenberg", {"n": 1})
        self.assertEqual((construction.g.dim, construction.rep.dim), (1, 2))

    def test_weighted_blocks(self):
        construction = catalog_get("heisenberg_weighted", {"weights": (1.0, 2.0)})
        np.testing.assert_allclose(construction.rep.matrices[0], scipy.linalg.block_diag(J, 2 * J))

    def test_free_two_step_is_standard(self):
        construction = catalog_get("free_two_step", {"n": 3})
        self.assertEqual((construction.g.dim, construction.rep.dim), (3, 3))
        np.testing.assert_allclose(construction.g.gram, np.eye(3), atol=1e-12)

    def test_free_two_step_needs_two(self):
        with self.assertRaises(InputError):
            catalog_get("free_two_step", {"n": 1})

    def test_every_entry_validates(self):
        for name, params in sweep_entries():
            self.assertTrue(catalog_get(name, params).validation.ok, msg=name)


class TestExpected(unittest.TestCase):
    def test_heisenberg(self):
        expected = catalog_expected("heisenberg", {"n": 3})
        self.assertEqual((expected.index, expected.isotropy_dim, expected.factor_count), (1, 9, 3))
        self.assertEqual(expected.provenance["index"], "literature")

    def test_weighted(self):
        self.assertEqual(catalog_expected("heisenberg_weighted", {"weights": (1.0, 2.0)}).isotropy_dim, 2)
        self.assertEqual(catalog_expected("heisenberg_weighted", {"weights": (1.0, 1.0)}).isotropy_dim, 4)

    def test_free_two_step(self):
        self.assertEqual(catalog_expected("free_two_step", {"n": 5}).as_dict()["isotropy_dim"], 10)
        self.assertEqual(catalog_expected("free_two_step", {"n": 2}).index, 1)


if __name__ == "__main__":
    unittest.main()

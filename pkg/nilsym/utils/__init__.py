from .catalog import catalog_expected, catalog_get, catalog_names, register as register_catalog, sweep_entries
from .isomcalc import killing_parallel_space, koszul_derivative, orthogonal_derivations, right_invariant_derivative_at_e
from .lauretbuild import ConstructionInput, build_nilalgebra
from .liecore import MetricLieAlgebra, matrix_lie_algebra
from .numkernel import SubspaceBasis, gram_orthonormalize, rank_revealing_nullspace, subspace_equal
from .repnlab import OrthogonalRepresentation, irreducible_decomposition, validate_representation
from .symindex import index_of_symmetry, isotropy_fixed_set, quotient_construction, verify_main_theorem

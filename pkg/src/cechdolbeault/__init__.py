"""Exact Čech–Dolbeault cohomology on finite bigraded models."""

from .cech import (CechDoubleComplex, CechElement, CoverDiagram, build_double_complex, canonical_map,
                   cech_cohomology, constant_diagram, glue_global, relative_complex, ses_of_pair,
                   total_complex, validate_diagram)
from .complexes import (Bidegree, BigradedComplex, ChainMap, CohomologyGroup, cohomology, cohomology_dims,
                        cone, euler_characteristic, induced_map, reindex, validate)
from .currents import (DualComplex, PairingData, compare_forms_currents, dualize, form_to_current,
                       pairing_from_model, relative_current_complex)
from .dga import DgaModel, validate_model
from .errors import CechDolbeaultError
from .linalg import SparseMatrix, Subspace, image_basis, kernel_basis, quotient_dim, rank, solve
from .models import (BlowupParams, ModelBundle, disjoint_cover_morphism, named_bundle, random_valid_diagram,
                     synthetic_blowup_bundle, torus_model)
from .morphisms import (CoverMorphism, InjectivityCertificate, blowup_decomposition, check_relative_injectivity,
                        compute_degree, projection_identity_check, relative_pullback, relative_pushforward)
from .scalars import Scalar
from .sequences import LesReport, ShortExactSequence, assemble_les, compare_les, connecting_map

__version__ = "0.1.0"

__all__ = [
    "assemble_les",
    "Bidegree",
    "BigradedComplex",
    "blowup_decomposition",
    "BlowupParams",
    "build_double_complex",
    "canonical_map",
    "cech_cohomology",
    "CechDolbeaultError",
    "CechDoubleComplex",
    "CechElement",
    "ChainMap",
    "check_relative_injectivity",
    "cohomology",
    "cohomology_dims",
    "CohomologyGroup",
    "compare_forms_currents",
    "compare_les",
    "compute_degree",
    "cone",
    "connecting_map",
    "constant_diagram",
    "CoverDiagram",
    "CoverMorphism",
    "DgaModel",
    "disjoint_cover_morphism",
    "DualComplex",
    "dualize",
    "euler_characteristic",
    "form_to_current",
    "glue_global",
    "image_basis",
    "induced_map",
    "InjectivityCertificate",
    "kernel_basis",
    "LesReport",
    "ModelBundle",
    "named_bundle",
    "pairing_from_model",
    "PairingData",
    "projection_identity_check",
    "quotient_dim",
    "random_valid_diagram",
    "rank",
    "reindex",
    "relative_complex",
    "relative_current_complex",
    "relative_pullback",
    "relative_pushforward",
    "Scalar",
    "ses_of_pair",
    "ShortExactSequence",
    "solve",
    "SparseMatrix",
    "Subspace",
    "synthetic_blowup_bundle",
    "torus_model",
    "total_complex",
    "validate",
    "validate_diagram",
    "validate_model",
]


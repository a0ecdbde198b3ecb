"""Calculus of the omni-Lie algebroid of a trivial line bundle and its Dirac-Jacobi structures."""

from .analysis import (
    PointReport,
    admissible_bracket,
    is_admissible_function,
    is_admissible_section,
    normalize_frame_at_point,
    point_report,
    reconstruction_check,
    transverse_structure_at,
)
from .dercomplex import LForm, cocycle_from_precontact, contract, differential, lie_derivative, precontact_from_cocycle
from .diracization import TangentCourantSection, characteristic_dimension_check, diracize, lift_omni, tangent_dorfman
from .linebundle import Derivation, Jet1, LineBundleMorphism, apply_derivation, commutator, jet_pairing, jet_prolong
from .morphisms import backward_image_projection, backward_image_slice, forward_image_pointwise, thicken
from .omni import OmniSection, StructureFrame, classify_subbundle, dorfman, omni_pairing
from .scalars import Chart, Oracle, Point, Scalar, differentiate, evaluate, parse_scalar, scalars_equal, to_text
from .spencer import classical_spencer, spencer_of_structure, verify_spencer_axioms
from .zoo import (
    HomogeneousPoissonData,
    JacobiMatrix,
    from_flat_connection,
    from_homogeneous_poisson,
    from_jacobi,
    from_lcps,
    from_two_cocycle,
    gauge_transform,
    lift_dirac,
    recognize,
    unit_structure,
)

__all__ = [name for name in dir() if not name.startswith("_")]

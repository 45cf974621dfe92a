"""Spin and Spin^C structures on flat manifolds with diagonal holonomy."""

from .clifford import PinElement, SpinCElement, lam, lift_diagonal, pin_multiply
from .crystal import (
    AffineElement,
    BieberbachGroup,
    GroupValidationError,
    betti,
    betti_profile,
    build_group,
    derived_relation_check,
    h1_elementary_divisors,
    holonomy_characters,
    is_hw,
    is_torsion_free,
    presentation,
)
from .hw_catalog import HwSpec, cyclic_hw, enumerate_hw, from_catalog, hw_5_1, hw_from_spec, torus
from .lifting import (
    Answer,
    Kind,
    StructureVerdict,
    cocycle_oracle_decide,
    decide_spin,
    decide_spinc,
    verify_certificate,
    verify_witness,
)

__version__ = "0.1.0"

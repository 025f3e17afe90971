"""n-ring configurations and the constructions built on them."""

from .arcs import Arc, circle_support
from .config import RingConfig, StarCertificate, Violation, free_group_probe, synthesize_ring, verify_star
from .dynamics import TorusPoint, lift_winding_check, torus_action, translation_number_estimate
from .small import (
    SmallFamily,
    SpecialElement,
    build_nu,
    build_small_family,
    find_contracting_word,
    generating_set_X,
    is_I_small,
    realize_generator_on,
    special_step,
)

__all__ = [
    "Arc", "circle_support", "RingConfig", "StarCertificate", "Violation", "free_group_probe",
    "synthesize_ring", "verify_star", "TorusPoint", "lift_winding_check", "torus_action",
    "translation_number_estimate", "SmallFamily", "SpecialElement", "build_nu",
    "build_small_family", "find_contracting_word", "generating_set_X", "is_I_small",
    "realize_generator_on", "special_step",
]

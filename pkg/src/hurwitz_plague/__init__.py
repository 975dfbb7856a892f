"""Hurwitz orbits of B3 on finite racks, their Schreier-graph quotients and
coverings, and minimal plagues of the associated monotone cellular automaton."""

from .automaton import (AutomatonRule, SubsetState, closure, is_plague, is_quarantine,
                        orbit_rule, step, zm_rule)
from .coverings import (LabeledCovering, LabelTemplate, check_constraints, covering_of,
                        derive_labels, enumerate_coverings, lift_covering)
from .metrics import (PlagueResult, check_conjecture, exhaustive_oracle, immunity, minimal_plague,
                      omega_prime, weight)
from .orbits import HurwitzOrbit, decompose_cube, enumerate_orbit, is_simply_intersecting
from .racks import InputError, Rack, builtin_rack, conjugation_quandle, validate_rack
from .robust import builtin_graph, pk_plague, robust_chain, span_graph, verify_section5
from .schreier import SchreierGraph, quotient, signature

__version__ = "0.1.0"

__all__ = [
    "AutomatonRule", "SubsetState", "closure", "is_plague", "is_quarantine", "orbit_rule", "step",
    "zm_rule", "LabeledCovering", "LabelTemplate", "check_constraints", "covering_of",
    "derive_labels", "enumerate_coverings", "lift_covering", "PlagueResult", "check_conjecture",
    "exhaustive_oracle", "immunity", "minimal_plague", "omega_prime", "weight", "HurwitzOrbit",
    "decompose_cube", "enumerate_orbit", "is_simply_intersecting", "InputError", "Rack",
    "builtin_rack", "conjugation_quandle", "validate_rack", "builtin_graph", "pk_plague",
    "robust_chain", "span_graph", "verify_section5", "SchreierGraph", "quotient", "signature",
]

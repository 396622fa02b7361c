"""Dynamic logic with a global box, credences over program valuations, and proofs."""

from .syntax import (
    parse_formula, parse_program, parse_credence, print_formula, print_program,
    print_credence, desugar, fl_closure, Signature,
)
from .kripke import KripkeModel, Frame, Relation, Valuation, satisfies, denote, validate_model
from .pedal import PedalModel, Cell, mu, satisfies_credence, validate_pedal
from .decision import atoms, decide_satisfiable, decide_valid, canonical_model, CapExceeded
from .bounds import BoundsQuery, solve_bounds, frechet_lower_bound, enumerate_valuations
from .proofcheck import check_proof, match_axiom, script_from_dict

__version__ = "0.1.0"

__all__ = [
    "parse_formula", "parse_program", "parse_credence", "print_formula", "print_program",
    "print_credence", "desugar", "fl_closure", "Signature",
    "KripkeModel", "Frame", "Relation", "Valuation", "satisfies", "denote", "validate_model",
    "PedalModel", "Cell", "mu", "satisfies_credence", "validate_pedal",
    "atoms", "decide_satisfiable", "decide_valid", "canonical_model", "CapExceeded",
    "BoundsQuery", "solve_bounds", "frechet_lower_bound", "enumerate_valuations",
    "check_proof", "match_axiom", "script_from_dict",
]

"""LF type checking, its erasure-based encoding into hereditary Harrop
formulas, and a uniform-proof engine to run the encoded programs."""

from .encoding import encode_signature, judgment_to_goal
from .kernel import check_object, check_signature, infer_object
from .parser import parse_judgment, parse_signature
from .prover import replay_trace, solve, solve_iterative

__version__ = "0.1.0"

__all__ = [
    "check_object", "check_signature", "encode_signature", "infer_object", "judgment_to_goal",
    "parse_judgment", "parse_signature", "replay_trace", "solve", "solve_iterative",
]

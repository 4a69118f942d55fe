"""Active membrane systems without charges or dissolution, and the family,
reduction and circuit constructions built on them."""

from .analysis import DepNode, Reachability, dependency_graph, eventually_evolves, predict, predict_verdict
from .core import (
    ENV, NO, YES, LabelTree, MembraneSystem, Multiset, Rule, RuleKind, canonical_key,
    initial_configuration, parse_multiset, parse_system, serialize_system, validate,
)
from .families import (
    Circuit, Family, build_family_dtt, build_family_m, compile_semiuniform, eval_circuit,
    load_family, parity_family, synthesize_circuit, uniform_to_ctt, uniform_to_dtt, uniform_to_m,
)
from .machines import build_config_graph, check_acyclic, complement_graph_oracle, parse_program
from .reductions import bin_to_unary, deinterleave, eval_reduction, interleave, unary_to_bin
from .semantics import Mode, Outcome, Verdict, apply_assignment, enumerate_maximal_assignments, explore, run

__version__ = "0.1.0"

"""Detectability analysis and design for networked control systems.

The package answers three questions about a distributed control network
under integrity attack. Can a given set of compromised agents and
sensors act without ever disturbing the detector residue? Is a topology
robust against every attack of bounded size? And what is the cheapest
topology, or sensor count, that achieves such robustness? The analysis
is structural: verdicts hold for almost every choice of edge weights,
and the simulation layer produces concrete weight matrices, stealthy
input sequences, and detector traces that witness them.
"""

from .design import (
    SynthesisResult,
    SynthesisSpec,
    lower_bound_check,
    min_links_value,
    optimal_sensor_count,
    synthesize,
    synthesize_platoon,
)
from .separators import (
    Counterexample,
    InfeasibilityError,
    LinkingResult,
    RobustnessReport,
    SeparatorResult,
    certify_robustness,
    is_structurally_left_invertible,
    max_disjoint_paths,
    max_linking,
)
from .simulation import (
    AttackTrace,
    FilterConvergenceError,
    NullspaceAmbiguityError,
    Realization,
    SimulationResult,
    evaluate_transfer,
    false_alarm_rate,
    find_perfect_attack,
    load_realization,
    normal_rank,
    realize,
    save_realization,
    simulate,
    spectral_radius,
    write_trace,
)
from .topology import (
    AttackScenario,
    DcsTopology,
    Digraph,
    StructuredSystem,
    TopologyFormatError,
    attack_output_pattern,
    attack_state_pattern,
    build_attack_graph,
    build_separator_graph,
    format_topology,
    load_topology,
    output_pattern,
    parse_topology,
    save_topology,
    state_pattern,
    topology_from_patterns,
    topology_graph,
    topology_to_json,
)

__version__ = "0.1.0"

__all__ = [
    "AttackScenario",
    "AttackTrace",
    "Counterexample",
    "DcsTopology",
    "Digraph",
    "FilterConvergenceError",
    "InfeasibilityError",
    "LinkingResult",
    "NullspaceAmbiguityError",
    "Realization",
    "RobustnessReport",
    "SeparatorResult",
    "SimulationResult",
    "StructuredSystem",
    "SynthesisResult",
    "SynthesisSpec",
    "TopologyFormatError",
    "attack_output_pattern",
    "attack_state_pattern",
    "build_attack_graph",
    "build_separator_graph",
    "certify_robustness",
    "evaluate_transfer",
    "false_alarm_rate",
    "find_perfect_attack",
    "format_topology",
    "is_structurally_left_invertible",
    "load_realization",
    "load_topology",
    "lower_bound_check",
    "max_disjoint_paths",
    "max_linking",
    "min_links_value",
    "normal_rank",
    "optimal_sensor_count",
    "output_pattern",
    "parse_topology",
    "realize",
    "save_realization",
    "save_topology",
    "simulate",
    "spectral_radius",
    "state_pattern",
    "synthesize",
    "synthesize_platoon",
    "topology_from_patterns",
    "topology_graph",
    "topology_to_json",
    "write_trace",
]

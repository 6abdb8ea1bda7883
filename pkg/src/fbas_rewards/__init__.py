"""Fair reward distribution for Federated Byzantine Agreement Systems.

Nodes are rewarded by their Shapley-Shubik power index in the simple game
whose winning coalitions are exactly those containing a quorum.
"""

__version__ = "0.1.0"

from .errors import (
    EnumerationCapExceeded, FbasError, FbasParseError, NoQuorumIntersection, NoQuorums,
    NoWinningCoalition,
)
from .fbas import (
    Fbas, NodeId, NodeSet, QuorumSet, find_minimal_quorums, greatest_quorum_within,
    has_quorum_intersection, is_quorum, is_quorum_set_satisfied, members, nodeset, top_tier,
)
from .game import CooperativeGame, characteristic_value, is_critical
from .generators import TopologySpec, byzantine_threshold, gen_organizational, gen_symmetric
from .power import (
    PowerIndexReport, approx_power_indices, exact_power_indices, reward_distribution,
)
from .experiments import (
    AccuracyReport, BenchReport, mean_percentage_error, run_accuracy_study, run_runtime_bench,
)
from .io import parse_fbas, serialize_fbas, write_report

__all__ = [
    "AccuracyReport", "BenchReport", "CooperativeGame", "EnumerationCapExceeded", "Fbas",
    "FbasError", "FbasParseError", "NoQuorumIntersection", "NoQuorums", "NoWinningCoalition",
    "NodeId", "NodeSet", "PowerIndexReport", "QuorumSet", "TopologySpec",
    "approx_power_indices", "byzantine_threshold", "characteristic_value",
    "exact_power_indices", "find_minimal_quorums", "gen_organizational", "gen_symmetric",
    "greatest_quorum_within", "has_quorum_intersection", "is_critical", "is_quorum",
    "is_quorum_set_satisfied", "mean_percentage_error", "members", "nodeset", "parse_fbas",
    "reward_distribution", "run_accuracy_study", "run_runtime_bench", "serialize_fbas",
    "top_tier", "write_report",
]

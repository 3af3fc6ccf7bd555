"""Link-based web rankings and the MaxRank spam-demotion solver.

The library computes PageRank, TrustRank and AntiTrustRank by sparse power
iteration, and solves an average-cost control problem over the web graph
in which a surfer pays for visiting spam pages and for removing
hyperlinks.  Its solution provides a spamicity score (the bias vector) and
a demoted ranking (the stationary distribution of the optimal chain).
"""

from .evaluation import (DemotionTable, Direction, PrecisionRecallCurve,
                         TableVariant, demotion_table, export_curves,
                         precision_recall, read_curve, read_table,
                         trapezoid_auc)
from .graph import (CostAssignment, FormatError, Label, Split, WebGraph,
                    load_costs, load_graph, reverse_graph)
from .kernels import HAVE_COMPILED
from .oracle import (ExplicitAction, PolytopeWitness, action_to_witness,
                     bias_linear_oracle, check_membership, enumerate_bellman,
                     enumerate_policies, monte_carlo_bias)
from .ranking import (ConvergenceError, ScoreKind, ScoreVector,
                      TeleportVector, antitrustrank, pagerank, read_scores,
                      trustrank, write_scores)
from .solver import (MaxRankParams, MaxRankSolution, PolicyChain, apply_T,
                     bellman_update_page, policy_certificate,
                     stationary_distribution, teleport_lambda,
                     value_iteration)
from .synthetic import planted_spam_farm

__version__ = "0.1.0"

__all__ = [
    "CostAssignment",
    "ConvergenceError",
    "DemotionTable",
    "Direction",
    "ExplicitAction",
    "FormatError",
    "HAVE_COMPILED",
    "Label",
    "MaxRankParams",
    "MaxRankSolution",
    "PolicyChain",
    "PolytopeWitness",
    "PrecisionRecallCurve",
    "ScoreKind",
    "ScoreVector",
    "Split",
    "TableVariant",
    "TeleportVector",
    "WebGraph",
    "action_to_witness",
    "antitrustrank",
    "apply_T",
    "bellman_update_page",
    "bias_linear_oracle",
    "check_membership",
    "demotion_table",
    "enumerate_bellman",
    "enumerate_policies",
    "export_curves",
    "load_costs",
    "load_graph",
    "monte_carlo_bias",
    "pagerank",
    "planted_spam_farm",
    "policy_certificate",
    "precision_recall",
    "read_curve",
    "read_scores",
    "read_table",
    "reverse_graph",
    "stationary_distribution",
    "teleport_lambda",
    "trapezoid_auc",
    "trustrank",
    "value_iteration",
    "write_scores",
]

"""Bond percolation experiments on finite windows of transitive graphs."""

from ._core import (
    MCResult,
    Window,
    azuma_bound,
    edge_label,
    est_azuma_event,
    est_capacity,
    est_cluster_tail,
    est_disconnect_prob,
    est_ir_prob,
    est_psi_sum,
    est_repulsion_tail,
    exact_capacity,
    exact_disconnect_prob,
    markov_lower_bound,
    run,
    version,
)

__all__ = [
    "MCResult",
    "Window",
    "azuma_bound",
    "edge_label",
    "est_azuma_event",
    "est_capacity",
    "est_cluster_tail",
    "est_disconnect_prob",
    "est_ir_prob",
    "est_psi_sum",
    "est_repulsion_tail",
    "exact_capacity",
    "exact_disconnect_prob",
    "markov_lower_bound",
    "run",
    "version",
]

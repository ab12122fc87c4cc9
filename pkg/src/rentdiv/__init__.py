"""Exact envy-free rent division with budget-aware preferences."""

from .model import (
    Allocation,
    BudgetSets,
    Economy,
    EnvyGraph,
    Linearization,
    MaxminCertificate,
    Preference,
    TieGraph,
    budget_sets,
    envy_graph,
    eval_utility,
    is_envy_free,
    is_maxmin,
    linearize,
    maxmin_certificate,
    tie_graph,
)

__all__ = [
    "Allocation",
    "BudgetSets",
    "Economy",
    "EnvyGraph",
    "Linearization",
    "MaxminCertificate",
    "Preference",
    "TieGraph",
    "budget_sets",
    "envy_graph",
    "eval_utility",
    "is_envy_free",
    "is_maxmin",
    "linearize",
    "maxmin_certificate",
    "tie_graph",
]

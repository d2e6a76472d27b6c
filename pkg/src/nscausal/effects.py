"""Closed-form direct and total causal effects under the linear model.

For an acyclic weight matrix ``B`` the direct effect of feature ``i`` on the
outcome is the stored coefficient ``B[i, outcome]``.  The total effect is
the sum over all directed paths from ``i`` to the outcome of the product of
edge weights along each path; because acyclic ``B`` is nilpotent this equals
the ``(i, outcome)`` entry of ``(I - B)^{-1} - I``, which is what the fast
implementation uses.  The explicit path sum is kept as the slow reference.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .graph import WeightedDag, enumerate_paths_to_outcome, is_acyclic
from .scm import Dataset

EFFECT_KINDS = ("te", "de")


def _check_node(g: WeightedDag, i: int):
    if not (0 <= i < g.dim):
        raise ValueError(f"node index {i} out of range for {g.dim} nodes")
    if i == g.outcome_index:
        raise ValueError("effects of the outcome on itself are undefined")


def direct_effect(g: WeightedDag, i: int) -> float:
    """Weight of the edge ``i -> outcome`` (0 when absent)."""
    _check_node(g, i)
    return float(g.weights[i, g.outcome_index])


def total_effects(g: WeightedDag) -> np.ndarray:
    """Total effect of every node on the outcome, by the matrix closed form.

    Entry ``outcome_index`` is set to 0 (no self effect).
    """
    if not is_acyclic(g):
        raise ValueError("total effects require an acyclic graph")
    dim = g.dim
    inv = np.linalg.inv(np.eye(dim) - g.weights)
    te = inv[:, g.outcome_index].copy()
    te[g.outcome_index] = 0.0
    return te


def total_effect(g: WeightedDag, i: int) -> float:
    _check_node(g, i)
    return float(total_effects(g)[i])


def total_effect_by_paths(g: WeightedDag, i: int) -> float:
    """Reference implementation: enumerate paths and sum weight products."""
    _check_node(g, i)
    total = 0.0
    for path in enumerate_paths_to_outcome(g, i):
        product = 1.0
        for a, b in zip(path[:-1], path[1:]):
            product *= g.weights[a, b]
        total += product
    return total


def total_effect_jacobian_entry(g: WeightedDag, i: int, k: int, l: int) -> float:
    """d(total effect of i)/d(weight of edge k->l), from the resolvent."""
    _check_node(g, i)
    inv = np.linalg.inv(np.eye(g.dim) - g.weights)
    return float(inv[i, k] * inv[l, g.outcome_index])


@dataclass(frozen=True)
class EffectRecord:
    node: int
    label: str
    direct: float
    total: float


@dataclass(frozen=True)
class EffectReport:
    """Per-feature direct and total effects plus a note on their source."""

    records: tuple[EffectRecord, ...]
    outcome_index: int
    source: str = ""


def effect_report(g: WeightedDag, source: str = "") -> EffectReport:
    """One record per non-outcome node."""
    te = total_effects(g)
    records = tuple(
        EffectRecord(i, g.labels[i], float(g.weights[i, g.outcome_index]), float(te[i]))
        for i in range(g.dim) if i != g.outcome_index)
    note = source or f"{g.dim}-node graph, outcome {g.labels[g.outcome_index]!r}"
    return EffectReport(records, g.outcome_index, note)


def delta_star(data: Dataset, fit: Callable[[Dataset], WeightedDag],
               effect_kind: str = "te") -> float:
    """Reference score: total absolute effect mass reachable with all features.

    Runs the supplied selection-free learner on the full dataset and sums
    ``|effect|`` over the non-outcome nodes of the pruned graph it returns.
    ``effect_kind`` picks total or direct effects.
    """
    if effect_kind not in EFFECT_KINDS:
        raise ValueError(f"effect_kind must be one of {EFFECT_KINDS}")
    g = fit(data)
    if effect_kind == "de":
        col = g.weights[:, g.outcome_index]
        mass = np.abs(col).sum() - abs(col[g.outcome_index])
    else:
        mass = np.abs(total_effects(g)).sum()
    return float(mass)

"""Weighted DAGs, random graph generators, paths, and structural metrics.

The central object is :class:`WeightedDag`: a dense weighted adjacency matrix
``weights[i, j]`` giving the weight of the edge ``i -> j`` (zero means no
edge), together with node labels and a designated outcome node.  By
convention the outcome sits at the last index and never has outgoing edges
(its row is all zeros); generators and the structure learner enforce this,
the container itself stays permissive so that arbitrary matrices (including
cyclic ones) can be inspected with :func:`is_acyclic`.
"""

from dataclasses import dataclass, field

import numpy as np

DEFAULT_WEIGHT_RANGE = (0.5, 2.0)


def default_labels(dim: int) -> tuple[str, ...]:
    """Feature labels ``z0 .. z{d-1}`` with the outcome labelled ``y``."""
    return tuple(f"z{i}" for i in range(dim - 1)) + ("y",)


@dataclass(frozen=True)
class WeightedDag:
    """Weighted adjacency matrix over labelled nodes with an outcome node.

    ``weights[i, j]`` is the weight of edge ``i -> j``; 0 encodes absence.
    """

    weights: np.ndarray
    labels: tuple[str, ...] = ()
    outcome_index: int = -1

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weights must be square, got shape {w.shape}")
        if not np.isfinite(w).all():
            raise ValueError("weights must be finite")
        dim = w.shape[0]
        labels = self.labels or default_labels(dim)
        if len(labels) != dim:
            raise ValueError(f"expected {dim} labels, got {len(labels)}")
        outcome = self.outcome_index % dim
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "labels", tuple(labels))
        object.__setattr__(self, "outcome_index", outcome)

    @property
    def dim(self) -> int:
        return self.weights.shape[0]


def topological_order(weights: np.ndarray) -> list[int] | None:
    """Kahn topological order of the nonzero pattern, or None on a cycle.

    Ties are broken by ascending node index so the order is deterministic.
    """
    pattern = np.asarray(weights) != 0
    dim = pattern.shape[0]
    indegree = pattern.sum(axis=0).astype(int)
    ready = sorted(i for i in range(dim) if indegree[i] == 0)
    order: list[int] = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        for child in np.flatnonzero(pattern[node]):
            indegree[child] -= 1
            if indegree[child] == 0:
                # insertion keeps `ready` sorted; graphs here are small
                ready.append(int(child))
                ready.sort()
    return order if len(order) == dim else None


def is_acyclic(g: WeightedDag) -> bool:
    """True iff the nonzero pattern of ``g`` admits a topological order."""
    return topological_order(g.weights) is not None


def ancestors_of(g: WeightedDag, node: int) -> set[int]:
    """All nodes with a directed path into ``node`` (excluding itself)."""
    pattern = g.weights != 0
    seen: set[int] = set()
    stack = [node]
    while stack:
        current = stack.pop()
        for parent in np.flatnonzero(pattern[:, current]):
            if parent not in seen:
                seen.add(int(parent))
                stack.append(int(parent))
    seen.discard(node)
    return seen


def enumerate_paths_to_outcome(g: WeightedDag, source: int) -> list[tuple[int, ...]]:
    """All directed paths from ``source`` to the outcome node.

    Depth-first enumeration over the nonzero pattern; requires an acyclic
    graph (path counts would otherwise be infinite).  Returns an empty list
    when the outcome is unreachable.
    """
    if not is_acyclic(g):
        raise ValueError("path enumeration requires an acyclic graph")
    pattern = g.weights != 0
    target = g.outcome_index
    paths: list[tuple[int, ...]] = []

    def walk(node: int, trail: list[int]):
        if node == target:
            paths.append(tuple(trail))
            return
        for child in np.flatnonzero(pattern[node]):
            walk(int(child), trail + [int(child)])

    if source != target:
        walk(source, [source])
    return paths


def prune(g: WeightedDag, threshold: float) -> WeightedDag:
    """Zero out entries with ``|weight| <= threshold``; keep the rest bit-exact."""
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    kept = np.where(np.abs(g.weights) > threshold, g.weights, 0.0)
    return WeightedDag(kept, g.labels, g.outcome_index)


def _validate_weight_range(weight_range) -> tuple[float, float]:
    lo, hi = float(weight_range[0]), float(weight_range[1])
    if lo > hi:
        raise ValueError("weight_range must be ordered (lo, hi)")
    if lo <= 0.0 <= hi:
        raise ValueError("weight_range must exclude 0")
    return lo, hi


def random_er(num_nodes: int, expected_degree: float, weight_range=DEFAULT_WEIGHT_RANGE,
              seed=0) -> WeightedDag:
    """Erdos-Renyi style random DAG with the outcome fixed as the last node.

    A uniformly random permutation of the feature nodes becomes the
    topological order (outcome last); every forward pair gets an edge
    independently with probability ``expected_degree / (num_nodes - 1)``,
    which makes the expected total degree of a node ``expected_degree``.
    """
    if num_nodes < 2:
        raise ValueError("need at least 2 nodes")
    if expected_degree < 0:
        raise ValueError("expected_degree must be nonnegative")
    if expected_degree >= num_nodes:
        raise ValueError(
            f"expected_degree {expected_degree} too large for {num_nodes} nodes")
    lo, hi = _validate_weight_range(weight_range)
    rng = np.random.default_rng(seed)
    order = np.concatenate([rng.permutation(num_nodes - 1), [num_nodes - 1]])
    prob = min(1.0, expected_degree / (num_nodes - 1))
    forward = np.triu(np.ones((num_nodes, num_nodes), dtype=bool), 1)
    present = (rng.random((num_nodes, num_nodes)) < prob) & forward
    draws = rng.uniform(lo, hi, size=(num_nodes, num_nodes))
    in_order = np.where(present, draws, 0.0)
    weights = np.zeros((num_nodes, num_nodes))
    weights[np.ix_(order, order)] = in_order
    return WeightedDag(weights, default_labels(num_nodes), num_nodes - 1)


def random_sf(num_nodes: int, attachment_degree: int, weight_range=DEFAULT_WEIGHT_RANGE,
              seed=0) -> WeightedDag:
    """Scale-free random DAG via preferential attachment, outcome last.

    Nodes arrive in index order; node ``k`` attaches to ``min(k, m)``
    distinct earlier nodes chosen proportionally to their current degree.
    Edges are oriented from the earlier node to the newcomer, so the result
    is acyclic by construction and the outcome (last arrival) is a sink.
    """
    if num_nodes < 2:
        raise ValueError("need at least 2 nodes")
    m = int(attachment_degree)
    if m < 1:
        raise ValueError("attachment_degree must be positive")
    if m >= num_nodes:
        raise ValueError(
            f"attachment_degree {m} too large for {num_nodes} nodes")
    lo, hi = _validate_weight_range(weight_range)
    rng = np.random.default_rng(seed)
    weights = np.zeros((num_nodes, num_nodes))
    # one list entry per edge endpoint: sampling from it is degree-weighted
    endpoints: list[int] = [0]
    for k in range(1, num_nodes):
        want = min(k, m)
        targets: set[int] = set()
        while len(targets) < want:
            targets.add(int(rng.choice(endpoints)))
        for t in sorted(targets):
            weights[t, k] = rng.uniform(lo, hi)
            endpoints.extend((t, k))
    return WeightedDag(weights, default_labels(num_nodes), num_nodes - 1)


@dataclass(frozen=True)
class EdgeSet:
    """Directed edge set materialized from a weighted graph."""

    dim: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"self-loop ({i}, {j}) not allowed")
            if not (0 <= i < self.dim and 0 <= j < self.dim):
                raise ValueError(f"edge ({i}, {j}) outside {self.dim} nodes")

    @classmethod
    def from_dag(cls, g: WeightedDag, threshold: float = 0.0) -> "EdgeSet":
        pairs = {(int(i), int(j))
                 for i, j in zip(*np.nonzero(np.abs(g.weights) > threshold))
                 if i != j}
        return cls(g.dim, frozenset(pairs))

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class GraphMetrics:
    fdr: float
    tpr: float
    shd: int


def metrics(estimated: EdgeSet, truth: EdgeSet) -> GraphMetrics:
    """FDR, TPR and structural Hamming distance of ``estimated`` vs ``truth``.

    A reversed edge counts once in the SHD and counts as a false discovery
    in the FDR numerator.  When both edge sets are empty the TPR is 1 (there
    is nothing to miss), which keeps ``metrics(a, a) == (0, 1, 0)`` for
    every edge set ``a``.
    """
    if estimated.dim != truth.dim:
        raise ValueError(
            f"node count mismatch: {estimated.dim} vs {truth.dim}")
    est, tru = estimated.edges, truth.edges
    true_pos = est & tru
    reversed_ = {(i, j) for (i, j) in est
                 if (i, j) not in tru and (j, i) in tru}
    false_pos = {(i, j) for (i, j) in est
                 if (i, j) not in tru and (j, i) not in tru}
    missing = {(i, j) for (i, j) in tru
               if (i, j) not in est and (j, i) not in est}
    fdr = (len(reversed_) + len(false_pos)) / max(1, len(est))
    if tru:
        tpr = len(true_pos) / len(tru)
    else:
        tpr = 1.0 if not est else 0.0
    shd = len(false_pos) + len(missing) + len(reversed_)
    return GraphMetrics(fdr=fdr, tpr=tpr, shd=shd)


def graph_metrics(estimated: WeightedDag, truth: WeightedDag,
                  threshold: float = 0.0) -> GraphMetrics:
    """Convenience wrapper: materialize edge sets at ``threshold`` and score."""
    return metrics(EdgeSet.from_dag(estimated, threshold),
                   EdgeSet.from_dag(truth, threshold))

"""Structural-equation data generators.

Two links are supported: the linear model ``x = W^T x + eps`` and a
rounded-log variant where a node's value is ``round(2*log(1 + s)) + eps``
for ``s`` the weighted sum of its parents.  Noise draws use one independent
substream per node (spawned from the seed), so a column's values depend only
on the noise of the node itself and its ancestors.
"""

from dataclasses import dataclass

import numpy as np

from .graph import WeightedDag, topological_order


@dataclass(frozen=True)
class BernoulliNoise:
    """Independent 0/1 noise; ``p`` is scalar or per-node."""

    p: object = 0.5

    def validate(self, dim: int) -> np.ndarray:
        p = np.broadcast_to(np.asarray(self.p, dtype=float), (dim,))
        if not ((p > 0) & (p < 1)).all():
            raise ValueError("bernoulli p must lie in (0, 1)")
        return p

    def sample(self, rng: np.random.Generator, n: int, p_i: float) -> np.ndarray:
        return (rng.random(n) < p_i).astype(float)


@dataclass(frozen=True)
class GaussianNoise:
    """Centered Gaussian noise; scalar ``sigma`` means equal variance."""

    sigma: object = 1.0

    def validate(self, dim: int) -> np.ndarray:
        s = np.broadcast_to(np.asarray(self.sigma, dtype=float), (dim,))
        if not (s > 0).all():
            raise ValueError("gaussian sigma must be positive")
        return s

    def sample(self, rng: np.random.Generator, n: int, sigma_i: float) -> np.ndarray:
        return rng.normal(0.0, sigma_i, size=n)


LINKS = ("linear", "rounded-log")


@dataclass(frozen=True)
class SemSpec:
    """Generative description: graph plus noise family plus link."""

    graph: WeightedDag
    noise: object = BernoulliNoise()
    link: str = "linear"

    def __post_init__(self):
        if self.link not in LINKS:
            raise ValueError(f"unknown link {self.link!r}, expected one of {LINKS}")
        self.noise.validate(self.graph.dim)


@dataclass(frozen=True)
class Dataset:
    """n x (d+1) observation matrix with column labels and an outcome column."""

    values: np.ndarray
    labels: tuple[str, ...]
    outcome_index: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ValueError(f"values must be 2-d, got shape {v.shape}")
        if not np.isfinite(v).all():
            raise ValueError("dataset contains non-finite entries")
        if len(self.labels) != v.shape[1]:
            raise ValueError("label count does not match column count")
        if not (0 <= self.outcome_index < v.shape[1]):
            raise ValueError("outcome_index out of range")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to the nearest integer, ties going away from zero."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def _noise_matrix(spec: SemSpec, n: int, seed) -> np.ndarray:
    dim = spec.graph.dim
    params = spec.noise.validate(dim)
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = root.spawn(dim)
    eps = np.empty((n, dim))
    for i in range(dim):
        eps[:, i] = spec.noise.sample(np.random.default_rng(children[i]), n, params[i])
    return eps


def _node_order(spec: SemSpec) -> list[int]:
    order = topological_order(spec.graph.weights)
    if order is None:
        raise ValueError("generative graph must be acyclic")
    return order


def sample_linear(spec: SemSpec, n: int, seed=0) -> Dataset:
    """Draw ``n`` observations of ``x = W^T x + eps`` in topological order."""
    if spec.link != "linear":
        raise ValueError(f"spec.link is {spec.link!r}, expected 'linear'")
    if n < 1:
        raise ValueError("n must be positive")
    order = _node_order(spec)
    eps = _noise_matrix(spec, n, seed)
    w = spec.graph.weights
    values = np.zeros((n, spec.graph.dim))
    for i in order:
        values[:, i] = values @ w[:, i] + eps[:, i]
    return Dataset(values, spec.graph.labels, spec.graph.outcome_index)


def sample_nonlinear(spec: SemSpec, n: int, seed=0) -> Dataset:
    """Draw from the rounded-log model ``round(2*log(1 + parent sum)) + eps``.

    The parent aggregate is the weighted sum of parent values; it must stay
    above -1 or the log leaves its domain, in which case the offending node
    is named in the error.
    """
    if spec.link != "rounded-log":
        raise ValueError(f"spec.link is {spec.link!r}, expected 'rounded-log'")
    if n < 1:
        raise ValueError("n must be positive")
    order = _node_order(spec)
    eps = _noise_matrix(spec, n, seed)
    w = spec.graph.weights
    values = np.zeros((n, spec.graph.dim))
    for i in order:
        agg = values @ w[:, i]
        if (agg <= -1.0 + 1e-12).any():
            raise ValueError(
                f"parent aggregate of node {spec.graph.labels[i]!r} (index {i}) "
                "fell to -1 or below; log(1 + s) undefined")
        values[:, i] = round_half_away(2.0 * np.log1p(agg)) + eps[:, i]
    return Dataset(values, spec.graph.labels, spec.graph.outcome_index)


def shift_nonnegative(data: Dataset) -> Dataset:
    """Shift the outcome column by its minimum when that minimum is negative."""
    y = data.values[:, data.outcome_index]
    low = y.min()
    if low >= 0:
        return data
    values = data.values.copy()
    values[:, data.outcome_index] = y - low
    return Dataset(values, data.labels, data.outcome_index)

"""Structure learner: least squares under acyclicity and relevance constraints.

The learner estimates a weighted adjacency matrix ``B`` for the model
``x = B^T x + eps`` by minimizing

    f(B) + lambda1*h1(B) + lambda2*h2(B; g) + c*h1(B)^2 + d*h2(B; g)^2

with dual ascent on the multipliers and geometric growth of the penalties.

* ``f`` is the scaled least-squares residual over the active columns.
* ``h1(B) = tr[(I + t * B∘B)^dim] - dim`` is zero exactly on acyclic
  patterns; ``t`` keeps the matrix power conditioned.
* ``h2(B; g) = delta_star - sum_i |CE_i(B)| + sum_j |B[outcome, j]|``
  compares the absolute causal-effect mass of the active features against
  the all-features reference ``delta_star`` and penalizes edges out of the
  outcome.  ``CE`` is the total or the direct effect, per configuration.

The feature mask ``g`` shrinks monotonically: once the iterate is nearly
acyclic, features whose pruned-graph effect falls below
``selection_tolerance * delta_star`` are deactivated (rows and columns
clamped to zero) provided the relevance constraint does not materially
degrade.  The outcome row is kept at zero by projection throughout, and the
inner minimization is Adam with a plateau-halved step size, returning the
best iterate seen so that each inner solve never increases the objective.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import effects as _effects
from .graph import WeightedDag, prune, topological_order
from .scm import Dataset

# iterate must be this close to acyclic before selection decisions are trusted
SELECTION_H1_GATE = 1e-5

_ADAM_BETA1 = 0.9
_ADAM_BETA2 = 0.999
_ADAM_EPS = 1e-8


@dataclass(frozen=True)
class FitConfig:
    """Hyperparameters of the learner; defaults follow the training recipe.

    ``selection_tolerance`` scales the deactivation cutoff relative to the
    reference score.  ``gamma`` is the nominal selector-size weight; with
    the subset selector realized as monotone shrinkage the size pressure
    comes from the cutoff itself, so gamma is carried in the configuration
    echo rather than entering the inner objective.  ``delta_star`` may hold
    a precomputed reference score; None means compute it from a pruned
    selection-free fit of the same data.
    """

    effect_kind: str = "te"
    t: object = "auto"
    prune_threshold: float = 0.3
    gamma: float = 0.0
    selection_tolerance: float = 0.01
    lambda1_init: float = 0.0
    lambda2_init: float = 0.0
    c_init: float = 1.0
    d_init: float = 1.0
    penalty_growth: float = 10.0
    progress_ratio: float = 0.25
    max_dual_steps: int = 100
    h1_tol: float = 1e-8
    h2_tol: float = 1e-6
    penalty_cap: float = 1e16
    l1_penalty: float = 0.0
    step_size: float = 0.05
    max_inner_iter: int = 1500
    grad_tol: float = 1e-7
    seed: int = 0
    delta_star: float | None = None

    def __post_init__(self):
        if self.effect_kind not in ("te", "de"):
            raise ValueError("effect_kind must be 'te' or 'de'")
        if self.t != "auto" and not (isinstance(self.t, (int, float)) and self.t > 0):
            raise ValueError("t must be 'auto' or a positive number")
        if self.penalty_growth <= 1:
            raise ValueError("penalty_growth must exceed 1")
        for name in ("h1_tol", "h2_tol", "grad_tol", "step_size"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.selection_tolerance < 0:
            raise ValueError("selection_tolerance must be nonnegative")


@dataclass(frozen=True)
class FitResult:
    """Learned graph, the selected feature mask, and the optimization trace."""

    graph: WeightedDag
    raw_graph: WeightedDag
    selected: np.ndarray
    diagnostics: tuple
    delta_star_used: float
    converged: bool
    config: FitConfig = field(repr=False, default=None)


# ---------------------------------------------------------------------------
# constraint functions


def _h1_value(w: np.ndarray, t: float) -> float:
    dim = w.shape[0]
    m = np.eye(dim) + t * (w * w)
    value = float(np.trace(np.linalg.matrix_power(m, dim)) - dim)
    if not math.isfinite(value):
        raise ValueError("acyclicity value overflowed; decrease t")
    return value


def _h1_with_grad(w: np.ndarray, t: float):
    dim = w.shape[0]
    m = np.eye(dim) + t * (w * w)
    p_minor = np.linalg.matrix_power(m, dim - 1)
    value = float(np.trace(p_minor @ m) - dim)
    if not math.isfinite(value):
        raise ValueError("acyclicity value overflowed; decrease t")
    grad = dim * t * p_minor.T * (2.0 * w)
    return value, grad


def acyclicity_value(g: WeightedDag, t: float) -> float:
    """Trace-power acyclicity score; zero exactly when the pattern is a DAG."""
    if t <= 0:
        raise ValueError("t must be positive")
    return _h1_value(g.weights, t)


def acyclicity_gradient(g: WeightedDag, t: float) -> np.ndarray:
    """Analytic gradient ``dim * t * [(I + t B∘B)^(dim-1)]^T ∘ 2B``."""
    if t <= 0:
        raise ValueError("t must be positive")
    return _h1_with_grad(g.weights, t)[1]


def _resolvent_is_safe(w: np.ndarray) -> bool:
    """Certified check that the power series sum_k B^k converges.

    ``rho(B) <= ||B^dim||^(1/dim)`` for any norm, and the bound is exact on
    acyclic patterns (the power vanishes), so near-feasible iterates always
    take the fast resolvent path.
    """
    dim = w.shape[0]
    norm = np.abs(np.linalg.matrix_power(w, dim)).sum(axis=1).max()
    if norm == 0.0:
        return True
    return norm ** (1.0 / dim) < 0.99


def _te_parts(w: np.ndarray, outcome: int, eye: np.ndarray | None = None):
    """Total-effect vector plus the factor needed for its Jacobian.

    Resolvent form when the series provably converges, otherwise the
    truncated series ``sum_{k<=dim-1} B^k`` (identical on acyclic patterns).
    """
    dim = w.shape[0]
    if eye is None:
        eye = np.eye(dim)
    if _resolvent_is_safe(w):
        try:
            m = np.linalg.inv(eye - w)
        except np.linalg.LinAlgError:
            m = None
        if m is not None and np.isfinite(m).all() and np.abs(m).max() < 1e8:
            te = m[:, outcome].copy()
            te[outcome] = 0.0
            return te, ("resolvent", m)
    powers = [eye]
    for _ in range(dim - 1):
        powers.append(powers[-1] @ w)
    te = np.zeros(dim)
    for k in range(1, dim):
        te += powers[k][:, outcome]
    te[outcome] = 0.0
    return te, ("series", powers)


def _te_jacobian(cache, signs: np.ndarray, outcome: int) -> np.ndarray:
    """d(sum_i signs_i * TE_i)/dB for either total-effect representation."""
    mode, payload = cache
    if mode == "resolvent":
        m = payload
        return np.outer(m.T @ signs, m[:, outcome])
    powers = payload
    dim = len(powers)
    prefix = np.zeros((dim, dim))  # prefix[r] = sum_{j<=r} (B^j)[:, outcome]
    running = np.zeros(dim)
    for r in range(dim):
        running = running + powers[r][:, outcome]
        prefix[r] = running
    jac = np.zeros((dim, dim))
    for m_idx in range(dim - 1):
        jac += np.outer(powers[m_idx].T @ signs, prefix[dim - 2 - m_idx])
    return jac


def _h2_pieces(w: np.ndarray, outcome: int, feature_active: np.ndarray,
               kind: str, delta_star: float):
    row_signs = np.sign(w[outcome, :])
    row_abs = float(np.abs(w[outcome, :]).sum())
    grad = np.zeros_like(w)
    if kind == "de":
        theta = w[:, outcome]
        signs = np.sign(theta)
        signs[~feature_active] = 0.0
        value = delta_star - float(np.abs(theta[feature_active]).sum()) + row_abs
        grad[:, outcome] -= signs
    else:
        te, cache = _te_parts(w, outcome)
        signs = np.sign(te)
        signs[~feature_active] = 0.0
        value = delta_star - float(np.abs(te[feature_active]).sum()) + row_abs
        grad -= _te_jacobian(cache, signs, outcome)
    grad[outcome, :] += row_signs
    return value, grad


def least_squares_loss(B: np.ndarray, data: Dataset, mask: np.ndarray):
    """Scaled residual ``(1/2n) ||W - B^T W||_F^2`` over the masked columns.

    The gradient is zeroed on the outcome row and on unselected rows and
    columns.  ``mask`` is a boolean vector over nodes and must include the
    outcome column.
    """
    w = np.asarray(B, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if data.n == 0:
        raise ValueError("dataset is empty")
    if not mask[data.outcome_index]:
        raise ValueError("mask must include the outcome column")
    gram = data.values.T @ data.values / data.n
    loss, grad = _ls_pieces(w, gram, mask)
    grad[~mask, :] = 0.0
    grad[:, ~mask] = 0.0
    grad[data.outcome_index, :] = 0.0
    return loss, grad


def _ls_pieces(w: np.ndarray, gram: np.ndarray, col_mask: np.ndarray):
    dim = w.shape[0]
    residual_factor = np.eye(dim) - w
    cols = np.flatnonzero(col_mask)
    rc = residual_factor[:, cols]
    gr = gram @ rc
    loss = 0.5 * float(np.sum(rc * gr))
    grad = np.zeros_like(w)
    grad[:, cols] = -gr
    return loss, grad


def relevance_constraint(B: np.ndarray, mask: np.ndarray, effect_kind: str,
                         delta_star: float, outcome_index: int = -1):
    """Value and subgradient of the causal-relevance constraint.

    ``value = delta_star - sum_{i in mask} |CE_i(B)| + sum_j |B[outcome, j]|``
    where CE is the total effect (resolvent form, power-series fallback) or
    the direct effect.  The subgradient of ``|x|`` at 0 is taken to be 0.
    """
    if effect_kind not in ("te", "de"):
        raise ValueError("effect_kind must be 'te' or 'de'")
    w = np.asarray(B, dtype=float)
    dim = w.shape[0]
    outcome = outcome_index % dim
    mask = np.asarray(mask, dtype=bool)
    feature_active = mask.copy()
    feature_active[outcome] = False
    try:
        return _h2_pieces(w, outcome, feature_active, effect_kind, delta_star)
    except np.linalg.LinAlgError as exc:
        raise ValueError(
            "I - B is numerically singular; use a smaller step size so the "
            "iterate stays away from spectral radius 1") from exc


# ---------------------------------------------------------------------------
# engine


def _resolve_t(setting, w: np.ndarray) -> float:
    if setting != "auto":
        return float(setting)
    e = w * w
    rho = float(np.max(np.abs(np.linalg.eigvals(e)))) if e.any() else 0.0
    return max(1.0 / (rho + w.shape[0]), 1e-4)


def _free_mask(active: np.ndarray, outcome: int) -> np.ndarray:
    free = np.outer(active, active).astype(float)
    free[outcome, :] = 0.0
    np.fill_diagonal(free, 0.0)
    return free


class _Objective:
    """Augmented-Lagrangian value and gradient at fixed multipliers and mask.

    The inner loop calls this tens of thousands of times, so the identity
    matrix, active-column index, and projection mask are cached up front and
    the constraint pieces are inlined rather than routed through the public
    single-shot operations.
    """

    def __init__(self, gram, outcome, active, t, lam1, c, relevance,
                 lam2, d_pen, kind, delta_star, l1):
        self.gram = gram
        self.outcome = outcome
        self.feature_active = active.copy()
        self.feature_active[outcome] = False
        self.cols = np.flatnonzero(active)
        self.free = _free_mask(active, outcome)
        self.dim = gram.shape[0]
        self.eye = np.eye(self.dim)
        self.t = t
        self.lam1, self.c = lam1, c
        self.relevance = relevance
        self.lam2, self.d_pen = lam2, d_pen
        self.kind = kind
        self.delta_star = delta_star
        self.l1 = l1

    def _ls(self, w):
        rc = self.eye[:, self.cols] - w[:, self.cols]
        gr = self.gram @ rc
        loss = 0.5 * float(np.sum(rc * gr))
        grad = np.zeros_like(w)
        grad[:, self.cols] = -gr
        return loss, grad

    def _h1(self, w):
        m = self.eye + self.t * (w * w)
        p_minor = np.linalg.matrix_power(m, self.dim - 1)
        value = float((p_minor @ m).trace() - self.dim)
        if not math.isfinite(value):
            raise FloatingPointError("acyclicity value overflowed")
        grad = (self.dim * self.t * 2.0) * p_minor.T * w
        return value, grad

    def _h2(self, w):
        outcome = self.outcome
        row_abs = float(np.abs(w[outcome, :]).sum())
        if self.kind == "de":
            theta = w[:, outcome]
            signs = np.where(self.feature_active, np.sign(theta), 0.0)
            value = self.delta_star - float(np.abs(theta * signs).sum()) + row_abs
            grad = np.zeros_like(w)
            grad[:, outcome] = -signs
        else:
            te, cache = _te_parts(w, outcome, self.eye)
            signs = np.where(self.feature_active, np.sign(te), 0.0)
            value = self.delta_star - float(np.abs(te * signs).sum()) + row_abs
            grad = -_te_jacobian(cache, signs, outcome)
        grad[outcome, :] += np.sign(w[outcome, :])
        return value, grad

    def __call__(self, w: np.ndarray):
        f, grad = self._ls(w)
        h1v, gh1 = self._h1(w)
        total = f + self.lam1 * h1v + self.c * h1v * h1v
        grad += (self.lam1 + 2.0 * self.c * h1v) * gh1
        h2v = 0.0
        if self.relevance:
            h2v, gh2 = self._h2(w)
            total += self.lam2 * h2v + self.d_pen * h2v * h2v
            grad += (self.lam2 + 2.0 * self.d_pen * h2v) * gh2
        if self.l1:
            total += self.l1 * float(np.abs(w).sum())
            grad += self.l1 * np.sign(w)
        grad *= self.free
        return total, grad, f, h1v, h2v


def _adam_minimize(w0: np.ndarray, objective: _Objective, lr: float,
                   max_iter: int, grad_tol: float):
    """Deterministic full-batch Adam; returns the best iterate seen.

    The step size halves whenever a 25-iteration window brings no
    improvement (the solve then restarts from the best iterate with fresh
    moments), which lets the same loop handle both the loose early solves
    and the stiff late ones where the penalty weights are enormous.  The
    final step size is returned so the caller can warm-start the next,
    stiffer solve with it.
    """
    w = w0 * objective.free
    total, grad, *_ = objective(w)
    best_total, best_w = total, w.copy()
    m = np.zeros_like(w)
    v = np.zeros_like(w)
    window = 25
    window_anchor = best_total
    adam_t = 0
    it = 0
    while it < max_iter:
        if np.max(np.abs(grad)) <= grad_tol:
            break
        it += 1
        adam_t += 1
        m = _ADAM_BETA1 * m + (1 - _ADAM_BETA1) * grad
        v = _ADAM_BETA2 * v + (1 - _ADAM_BETA2) * grad * grad
        m_hat = m / (1 - _ADAM_BETA1 ** adam_t)
        v_hat = v / (1 - _ADAM_BETA2 ** adam_t)
        w = (w - lr * m_hat / (np.sqrt(v_hat) + _ADAM_EPS)) * objective.free
        total, grad, *_ = objective(w)
        if not math.isfinite(total) or not np.isfinite(w).all():
            raise FloatingPointError("non-finite iterate in the inner solve")
        if total < best_total:
            best_total, best_w = total, w.copy()
        if it % window == 0:
            improved = window_anchor - best_total \
                > 1e-14 * max(1.0, abs(window_anchor))
            if not improved:
                lr *= 0.5
                if lr < 1e-10:
                    break
                w = best_w.copy()
                total, grad, *_ = objective(w)
                m[:] = 0.0
                v[:] = 0.0
                adam_t = 0
            window_anchor = best_total
    return best_w, best_total, it, lr


def _pruned_effects(w: np.ndarray, outcome: int, threshold: float, kind: str):
    """Per-node |effect| on the pruned pattern, or None when it is cyclic."""
    pruned = np.where(np.abs(w) > threshold, w, 0.0)
    if topological_order(pruned) is None:
        return None
    if kind == "de":
        ce = np.abs(pruned[:, outcome].copy())
    else:
        dim = w.shape[0]
        ce = np.abs(np.linalg.inv(np.eye(dim) - pruned)[:, outcome])
    ce[outcome] = 0.0
    return ce


def _raw_effects(w: np.ndarray, outcome: int, kind: str):
    if kind == "de":
        ce = np.abs(w[:, outcome].copy())
    else:
        te, _ = _te_parts(w, outcome)
        ce = np.abs(te)
    ce[outcome] = 0.0
    return ce


def _selection_update(w, active, outcome, config, delta_star):
    """Deactivate low-effect features, smallest first, guarding the constraint.

    Effects are read off the pruned current iterate so that sub-threshold
    noise edges cannot keep a feature alive.  A feature whose unpruned
    effect is still at the edge-threshold scale is spared: a borderline true
    edge dipping under the prune threshold for one round must not eliminate
    its source for good (deactivation is monotone).
    """
    ce = _pruned_effects(w, outcome, config.prune_threshold, config.effect_kind)
    if ce is None:
        return []
    raw = _raw_effects(w, outcome, config.effect_kind)
    cutoff = config.selection_tolerance * delta_star
    guard = max(cutoff, config.prune_threshold)
    candidates = [i for i in np.flatnonzero(active) if i != outcome
                  and ce[i] <= cutoff and raw[i] <= guard]
    candidates.sort(key=lambda i: (ce[i], i))
    live = [i for i in np.flatnonzero(active) if i != outcome]
    h2_now = delta_star - float(sum(ce[i] for i in live))
    slack = cutoff + config.h1_tol
    dropped = []
    for i in candidates:
        h2_after = h2_now + ce[i]
        if h2_after <= abs(h2_now) + slack:
            active[i] = False
            dropped.append(int(i))
            h2_now = h2_after
    return dropped


def _engine(data: Dataset, config: FitConfig, *, relevance: bool,
            select: bool, delta_star_value: float,
            init: tuple | None = None) -> FitResult:
    values = data.values
    dim = data.dim
    outcome = data.outcome_index
    if data.n == 0 or dim < 2:
        raise ValueError("dataset must have observations and at least 2 columns")
    # column means act as implicit intercepts: the noise need not be centered
    centered = values - values.mean(axis=0)
    gram = centered.T @ centered / data.n

    if init is None:
        w = np.zeros((dim, dim))
        lam1 = config.lambda1_init
        c = config.c_init
    else:
        w, lam1, c = init
        w = w.copy()
    active = np.ones(dim, dtype=bool)
    lam2 = config.lambda2_init
    d_pen = config.d_init
    cap = config.penalty_cap
    h1_prev = math.inf
    h2_prev = math.inf
    diagnostics = []
    converged = False
    stall = 0

    for step in range(config.max_dual_steps):
        t = _resolve_t(config.t, w)
        objective = _Objective(gram, outcome, active, t, lam1, c, relevance,
                               lam2, d_pen, config.effect_kind,
                               delta_star_value, config.l1_penalty)
        obj_start = objective(w)[0]
        try:
            w, obj_end, inner_iters, _ = _adam_minimize(
                w, objective, config.step_size, config.max_inner_iter,
                config.grad_tol)
        except FloatingPointError as exc:
            raise RuntimeError(
                f"optimizer diverged at dual step {step} "
                f"(lambda1={lam1:.3g}, lambda2={lam2:.3g}, c={c:.3g}, "
                f"d={d_pen:.3g}); trace so far: {diagnostics}") from exc
        _, _, f_val, h1v, h2v = objective(w)

        dropped = []
        if select and h1v <= SELECTION_H1_GATE:
            dropped = _selection_update(w, active, outcome, config,
                                        delta_star_value)
            if dropped:
                w = w * _free_mask(active, outcome)
                objective = _Objective(gram, outcome, active, t, lam1, c,
                                       relevance, lam2, d_pen,
                                       config.effect_kind, delta_star_value,
                                       config.l1_penalty)
                _, _, f_val, h1v, h2v = objective(w)

        diagnostics.append({
            "step": step, "f": f_val, "h1": h1v, "h2": h2v,
            "lambda1": lam1, "lambda2": lam2, "c": c, "d": d_pen, "t": t,
            "inner_iterations": inner_iters,
            "objective_start": obj_start, "objective_end": obj_end,
            "n_active": int(active.sum()) - 1, "dropped": tuple(dropped),
        })

        ok1 = h1v <= config.h1_tol
        ok2 = (not relevance) or abs(h2v) <= config.h2_tol
        if ok1 and ok2 and not dropped:
            converged = True
            break

        lam1 = min(lam1 + 2.0 * c * h1v, cap)
        if relevance:
            lam2 = float(np.clip(lam2 + 2.0 * d_pen * h2v, -cap, cap))
        if not ok1 and h1v > config.progress_ratio * h1_prev:
            c = min(c * config.penalty_growth, cap)
        if relevance and not ok2 and abs(h2v) > config.progress_ratio * h2_prev:
            d_pen = min(d_pen * config.penalty_growth, cap)

        improved = (h1v <= config.progress_ratio * h1_prev
                    or (relevance and abs(h2v) <= config.progress_ratio * h2_prev)
                    or bool(dropped))
        saturated = ((ok1 or c >= cap)
                     and ((not relevance) or ok2 or d_pen >= cap))
        stall = stall + 1 if (saturated and not improved) else 0
        if stall >= 3:
            break
        h1_prev = max(h1v, 1e-300)
        h2_prev = max(abs(h2v), 1e-300)

    w = w * _free_mask(active, outcome)
    raw = WeightedDag(w, data.labels, outcome)
    features = [i for i in range(dim) if i != outcome]
    return FitResult(
        graph=prune(raw, config.prune_threshold),
        raw_graph=raw,
        selected=active[features].copy(),
        diagnostics=tuple(diagnostics),
        delta_star_used=float(delta_star_value),
        converged=converged,
        config=config,
    )


def fit_baseline(data: Dataset, config: FitConfig = FitConfig()) -> FitResult:
    """Selection-free structural fit: the relevance machinery is disabled."""
    return _engine(data, config, relevance=False, select=False,
                   delta_star_value=0.0)


def _warm_init(result: FitResult) -> tuple:
    last = result.diagnostics[-1] if result.diagnostics else {}
    return (result.raw_graph.weights,
            float(last.get("lambda1", 0.0)),
            float(last.get("c", 1.0)))


def fit(data: Dataset, config: FitConfig = FitConfig(),
        warm_start: FitResult | None = None) -> FitResult:
    """Joint structure learning and feature selection.

    When ``config.delta_star`` is None the reference score is computed up
    front from a pruned selection-free fit of the same data and then frozen
    for the constrained run; that fit also warm-starts the constrained one.
    A caller that already holds the selection-free result can pass it as
    ``warm_start`` together with a precomputed ``config.delta_star``.
    """
    init = None
    if config.delta_star is None:
        base = fit_baseline(data, config)
        dstar = _effects.delta_star(data, lambda _: base.graph,
                                    config.effect_kind)
        init = _warm_init(base)
    else:
        dstar = float(config.delta_star)
        if warm_start is not None:
            init = _warm_init(warm_start)
    resolved = replace(config, delta_star=dstar)
    return _engine(data, resolved, relevance=True, select=True,
                   delta_star_value=dstar, init=init)

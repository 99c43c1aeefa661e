"""Label-noise-robust supervised training.

The base learner is an L2-regularized logistic model trained by damped
Newton steps on the weighted log-loss.  Wrapping it in the alternating fit
downweights training instances the classifier cannot explain, which is
where randomly flipped labels end up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit
from scipy.stats import rankdata

from .core import EosConfig, FitResult, check_weights, fit
from .data import Dataset
from .exceptions import (
    InvalidConfigError,
    InvalidInputError,
    NonConvergenceError,
)

__all__ = [
    "ClassifierParams",
    "decision_function",
    "predict_proba",
    "train_weighted_classifier",
    "classifier_loss_error",
    "ClassifierLossModel",
    "robust_fit",
    "inject_label_flips",
    "auc",
    "MislabelExperimentConfig",
    "SplitOutcome",
    "two_gaussian_dataset",
    "mislabel_experiment",
]

# Predicted probabilities are clamped into this range before taking logs so
# per-sample losses stay finite for any parameter vector.
PROB_CLAMP = 1e-12


@dataclass(frozen=True)
class ClassifierParams:
    """Linear log-odds classifier: p(y=1 | x) = sigmoid(coef . x + intercept)."""

    coefficients: np.ndarray
    intercept: float
    l2_strength: float

    def __post_init__(self) -> None:
        coef = np.array(self.coefficients, dtype=float, copy=True)
        if coef.ndim != 1:
            raise InvalidInputError(f"coefficients must be a vector, got shape {coef.shape}")
        if not (np.all(np.isfinite(coef)) and math.isfinite(self.intercept)):
            raise InvalidInputError("classifier parameters must be finite")
        if not (self.l2_strength >= 0.0):
            raise InvalidInputError(f"l2_strength must be non-negative, got {self.l2_strength!r}")
        coef.setflags(write=False)
        object.__setattr__(self, "coefficients", coef)
        object.__setattr__(self, "intercept", float(self.intercept))
        object.__setattr__(self, "l2_strength", float(self.l2_strength))


def decision_function(params: ClassifierParams, instances: np.ndarray) -> np.ndarray:
    x = np.asarray(instances, dtype=float)
    return x @ params.coefficients + params.intercept


def predict_proba(params: ClassifierParams, instances: np.ndarray) -> np.ndarray:
    return expit(decision_function(params, instances))


def _require_labels(dataset: Dataset) -> np.ndarray:
    if dataset.labels is None:
        raise InvalidInputError("this operation requires a labeled dataset")
    return dataset.labels


def _solve_damped(hessian: np.ndarray, grad: np.ndarray) -> np.ndarray:
    damping = 0.0
    base = max(1.0, float(np.abs(np.diag(hessian)).max()))
    for _ in range(12):
        try:
            step = np.linalg.solve(hessian + damping * np.eye(hessian.shape[0]), grad)
        except np.linalg.LinAlgError:
            step = None
        if step is not None and np.all(np.isfinite(step)):
            return step
        damping = base * 1e-12 if damping == 0.0 else damping * 100.0
    return np.linalg.lstsq(hessian, grad, rcond=None)[0]


def train_weighted_classifier(
    dataset: Dataset,
    weights: np.ndarray,
    l2_strength: float = 1e-4,
    *,
    grad_tol: float = 1e-8,
    max_iters: int = 100,
    initial: ClassifierParams | None = None,
) -> ClassifierParams:
    """Minimize sum_t w_t * logloss_t + l2_strength * ||coef||^2.

    Damped Newton iterations with a backtracking line search, run until the
    gradient norm drops to ``grad_tol``.  ``initial`` warm-starts the solver;
    since the line search only ever accepts decreases, the returned
    parameters can never score worse than the starting point.  With
    ``l2_strength=0`` and separable classes the optimum is at infinity; that
    surfaces as ``NonConvergenceError`` advising a positive l2 strength.
    """
    y = _require_labels(dataset).astype(float)
    w = check_weights(weights, dataset.n_instances)
    if not (math.isfinite(l2_strength) and l2_strength >= 0.0):
        raise InvalidConfigError(f"l2_strength must be non-negative, got {l2_strength!r}")

    x = dataset.instances
    n, d = x.shape
    design = np.hstack([x, np.ones((n, 1))])
    penalty = np.zeros(d + 1)
    penalty[:d] = 2.0 * l2_strength
    if initial is not None:
        if initial.coefficients.shape != (d,):
            raise InvalidInputError(
                f"initial coefficients must have length {d}, got {initial.coefficients.shape}"
            )
        theta = np.concatenate([initial.coefficients, [initial.intercept]])
    else:
        theta = np.zeros(d + 1)

    def value_grad(t: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        z = design @ t
        p = expit(z)
        nll = np.logaddexp(0.0, z) - y * z
        val = float(w @ nll + l2_strength * (t[:d] @ t[:d]))
        grad = design.T @ (w * (p - y)) + penalty * t
        return val, grad, p

    val, grad, p = value_grad(theta)
    for _ in range(max_iters):
        if float(np.linalg.norm(grad)) <= grad_tol:
            break
        curvature = w * p * (1.0 - p)
        hessian = (design * curvature[:, None]).T @ design
        hessian[np.diag_indices_from(hessian)] += penalty
        step = _solve_damped(hessian, grad)
        slope = float(grad @ step)
        stepsize = 1.0
        for _ in range(60):
            cand = theta - stepsize * step
            cval, cgrad, cp = value_grad(cand)
            if cval <= val - 1e-4 * stepsize * slope:
                theta, val, grad, p = cand, cval, cgrad, cp
                break
            stepsize *= 0.5
        else:
            break  # no further float-representable progress

    if l2_strength == 0.0:
        # With every weighted margin strictly positive, doubling theta halves
        # the loss, so no finite minimizer exists.
        margins = (2.0 * y - 1.0) * (design @ theta)
        if bool(np.all(margins[w > 0] > 0.0)):
            raise NonConvergenceError(
                "the weighted classes are perfectly separable and l2_strength is 0, "
                "so the optimum is unbounded; set l2_strength > 0 (default 1e-4)"
            )
    gnorm = float(np.linalg.norm(grad))
    if gnorm > grad_tol:
        raise NonConvergenceError(
            f"weighted classifier did not reach gradient norm {grad_tol:g} "
            f"(got {gnorm:.3e}); with separable classes set l2_strength > 0 "
            "(default 1e-4)"
        )
    return ClassifierParams(
        coefficients=theta[:d], intercept=float(theta[d]), l2_strength=float(l2_strength)
    )


def classifier_loss_error(dataset: Dataset, params: ClassifierParams) -> np.ndarray:
    """Per-sample negative log-likelihood of the observed label.

    Probabilities are clamped to [1e-12, 1 - 1e-12] so every loss is finite.
    """
    y = _require_labels(dataset)
    p = predict_proba(params, dataset.instances)
    p_true = np.where(y == 1, p, 1.0 - p)
    p_true = np.clip(p_true, PROB_CLAMP, 1.0 - PROB_CLAMP)
    return -np.log(p_true)


@dataclass
class ClassifierLossModel:
    """Adapter exposing the weighted classifier as a pluggable error model.

    ``evaluate`` adds the l2 penalty (a weight-independent constant) to each
    per-sample loss.  Since the weights sum to one, the evaluated weighted
    error then equals exactly what ``update_theta`` minimizes, which makes
    the descent contract hold; the weight update itself is unchanged because
    it is invariant to uniform shifts of the error vector.

    Each update warm-starts the solver from the previous parameters, so the
    weighted objective can never increase between updates even though the
    solver stops at a finite gradient tolerance.  The warm-start cache makes
    an instance stateful: use one instance per fit, not across concurrent
    fits.
    """

    l2_strength: float = 1e-4

    def __post_init__(self) -> None:
        self._warm: ClassifierParams | None = None

    def update_theta(self, dataset: Dataset, weights: np.ndarray) -> ClassifierParams:
        params = train_weighted_classifier(
            dataset, weights, self.l2_strength, initial=self._warm
        )
        self._warm = params
        return params

    def evaluate(self, dataset: Dataset, theta: ClassifierParams) -> np.ndarray:
        penalty = self.l2_strength * float(theta.coefficients @ theta.coefficients)
        return classifier_loss_error(dataset, theta) + penalty


def robust_fit(dataset: Dataset, config: EosConfig, l2_strength: float = 1e-4) -> FitResult:
    """Alternating fit with the classifier-loss error model.

    Instances the classifier cannot explain (mislabeled points in
    particular) end up with depressed weights; ``result.theta`` is the
    final ``ClassifierParams``.
    """
    _require_labels(dataset)
    return fit(dataset, ClassifierLossModel(l2_strength=l2_strength), config)


def inject_label_flips(
    dataset: Dataset, p: float, seed: int
) -> tuple[Dataset, frozenset[int]]:
    """Flip floor(p*T) uniformly chosen labels; return the corrupted copy.

    The returned index set is the ground truth of which labels were flipped.
    """
    labels = _require_labels(dataset)
    if not (0.0 <= p < 0.5):
        raise InvalidInputError(f"flip proportion must lie in [0, 0.5), got {p!r}")
    n = dataset.n_instances
    k = int(math.floor(p * n + 1e-9))
    rng = np.random.default_rng(seed)
    idx = rng.choice(n, size=k, replace=False)
    flipped = labels.copy()
    flipped[idx] = 1 - flipped[idx]
    return dataset.with_labels(flipped), frozenset(int(i) for i in idx)


def auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Area under the ROC curve as the Mann-Whitney rank statistic.

    Ties contribute 1/2 through average ranks.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels)
    if s.ndim != 1 or s.shape != y.shape:
        raise InvalidInputError("scores and labels must be 1-D vectors of equal length")
    if not np.all(np.isfinite(s)):
        raise InvalidInputError("scores must be finite")
    if not np.all(np.isin(np.unique(y), (0, 1))):
        raise InvalidInputError("labels must be binary 0/1")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise InvalidInputError("both classes must be present to compute AUC")
    ranks = rankdata(s)
    u = float(np.sum(ranks[y == 1])) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


@dataclass(frozen=True)
class MislabelExperimentConfig:
    """Protocol knobs for the repeated label-flip experiment.

    ``alpha_grid`` entries are multipliers: each candidate alpha is the
    multiplier times the mean per-sample loss of the plain fit on that
    split, so the grid tracks the loss scale of the data at hand.
    """

    flip_proportion: float
    n_splits: int = 50
    train_fraction: float = 0.75
    seed: int = 0
    alpha_grid: tuple[float, ...] = (0.1, 0.3, 1.0, 3.0, 10.0)
    l2_strength: float = 1e-4

    def __post_init__(self) -> None:
        if not (0.0 <= self.flip_proportion < 0.5):
            raise InvalidConfigError(
                f"flip proportion must lie in [0, 0.5), got {self.flip_proportion!r}"
            )
        if not (isinstance(self.n_splits, int) and self.n_splits >= 1):
            raise InvalidConfigError(f"n_splits must be a positive integer, got {self.n_splits!r}")
        if not (0.0 < self.train_fraction < 1.0):
            raise InvalidConfigError(
                f"train_fraction must lie in (0, 1), got {self.train_fraction!r}"
            )
        grid = tuple(float(a) for a in self.alpha_grid)
        if not grid or any(not (math.isfinite(a) and a > 0) for a in grid):
            raise InvalidConfigError("alpha_grid must be non-empty with positive entries")
        object.__setattr__(self, "alpha_grid", grid)
        if not (self.l2_strength >= 0.0):
            raise InvalidConfigError(f"l2_strength must be non-negative, got {self.l2_strength!r}")


@dataclass(frozen=True)
class SplitOutcome:
    """Per-split results of the mislabeling comparison."""

    auc_plain: float
    auc_robust: float
    alpha_selected: float
    mean_weight_flipped: float | None
    mean_weight_clean: float
    n_flipped: int


def two_gaussian_dataset(
    n: int, dim: int, rng: np.random.Generator, mean_scale: float = 2.0
) -> Dataset:
    """Balanced binary task: two unit-covariance Gaussians at +-mean_scale/sqrt(D)."""
    n_pos = n // 2
    n_neg = n - n_pos
    offset = mean_scale / math.sqrt(dim)
    x = np.vstack(
        [
            rng.standard_normal((n_neg, dim)) - offset,
            rng.standard_normal((n_pos, dim)) + offset,
        ]
    )
    y = np.concatenate([np.zeros(n_neg, dtype=int), np.ones(n_pos, dtype=int)])
    perm = rng.permutation(n)
    return Dataset(x[perm], y[perm])


def _select_alpha(
    corrupted: Dataset,
    reference: Dataset,
    cfg: MislabelExperimentConfig,
    *,
    tol: float = 1e-12,
    max_iters: int = 500,
) -> tuple[ClassifierParams, float, FitResult]:
    """Plain fit plus grid selection of alpha by the clean training objective.

    ``reference`` carries uncorrupted labels; the selected alpha minimizes
    the mean per-sample loss of the converged classifier on it.
    """
    n = corrupted.n_instances
    uniform = np.full(n, 1.0 / n)
    plain = train_weighted_classifier(corrupted, uniform, cfg.l2_strength)
    loss_scale = max(float(classifier_loss_error(corrupted, plain).mean()), 1e-6)

    best_alpha = math.nan
    best_loss = math.inf
    best_result: FitResult | None = None
    for multiplier in cfg.alpha_grid:
        alpha = multiplier * loss_scale
        result = robust_fit(
            corrupted,
            EosConfig(alpha=alpha, tol=tol, max_iters=max_iters),
            l2_strength=cfg.l2_strength,
        )
        clean_loss = float(classifier_loss_error(reference, result.theta).mean())
        if clean_loss < best_loss:
            best_alpha, best_loss, best_result = alpha, clean_loss, result
    assert best_result is not None
    return plain, best_alpha, best_result


def _run_split(data: Dataset, cfg: MislabelExperimentConfig, rng: np.random.Generator) -> SplitOutcome:
    n = data.n_instances
    n_train = int(cfg.train_fraction * n + 1e-9)
    if n_train < 4 or n - n_train < 2:
        raise InvalidInputError(f"split of T={n} leaves too few instances on one side")
    perm = rng.permutation(n)
    train = data.subset(perm[:n_train])
    test = data.subset(perm[n_train:])

    flip_seed = int(rng.integers(0, 2**63 - 1))
    corrupted, flipped = inject_label_flips(train, cfg.flip_proportion, flip_seed)

    plain, alpha_selected, robust = _select_alpha(corrupted, train, cfg)

    auc_plain = auc(predict_proba(plain, test.instances), test.labels)
    auc_robust = auc(predict_proba(robust.theta, test.instances), test.labels)

    weights = robust.weights
    clean_mask = np.ones(n_train, dtype=bool)
    if flipped:
        flipped_idx = np.fromiter(flipped, dtype=np.intp)
        clean_mask[flipped_idx] = False
        mean_flipped = float(weights[flipped_idx].mean())
    else:
        mean_flipped = None
    return SplitOutcome(
        auc_plain=auc_plain,
        auc_robust=auc_robust,
        alpha_selected=alpha_selected,
        mean_weight_flipped=mean_flipped,
        mean_weight_clean=float(weights[clean_mask].mean()),
        n_flipped=len(flipped),
    )


def mislabel_experiment(
    cfg: MislabelExperimentConfig,
    dataset: Dataset | None = None,
    *,
    task_size: int = 400,
    task_dim: int = 5,
) -> list[SplitOutcome]:
    """Run the repeated flip-train-evaluate protocol.

    With ``dataset`` given, each split re-partitions it into train and test;
    otherwise a fresh two-Gaussian task is drawn per split.  Test labels are
    never corrupted.  Split randomness is derived from ``cfg.seed`` so the
    whole experiment is reproducible.
    """
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_splits)
    outcomes: list[SplitOutcome] = []
    for child in children:
        rng = np.random.default_rng(child)
        data = dataset if dataset is not None else two_gaussian_dataset(task_size, task_dim, rng)
        outcomes.append(_run_split(data, cfg, rng))
    return outcomes

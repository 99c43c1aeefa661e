"""Synthetic data, baseline detectors, metrics, and timing probes."""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import chi2

from .anomaly import FlagRule, calibrate_alpha, detect
from .core import EosConfig, w_step
from .data import Dataset
from .exceptions import InvalidConfigError, InvalidInputError
from .models import mahalanobis_squared, weighted_gaussian_mle

__all__ = [
    "SyntheticSpec",
    "MetricReport",
    "generate",
    "mahalanobis_chi2_baseline",
    "precision",
    "ci95",
    "metric_report",
    "timing_probe_wstep",
    "timing_ratios",
    "run_synth_benchmark",
]


@dataclass(frozen=True)
class SyntheticSpec:
    """Gaussian inliers plus a box of uniform outliers, asymmetrically placed.

    Scalars for the box bounds and mean broadcast across all D coordinates.
    """

    T: int = 1000
    D: int = 10
    outlier_fraction: float = 0.05
    inlier_mean: np.ndarray | float = 0.0
    inlier_cov: np.ndarray | None = None
    outlier_box_low: np.ndarray | float = 5.0
    outlier_box_high: np.ndarray | float = 9.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not (isinstance(self.T, int) and self.T >= 1):
            raise InvalidConfigError(f"T must be a positive integer, got {self.T!r}")
        if not (isinstance(self.D, int) and self.D >= 1):
            raise InvalidConfigError(f"D must be a positive integer, got {self.D!r}")
        if not (0.0 <= self.outlier_fraction < 0.5):
            raise InvalidConfigError(
                f"outlier_fraction must lie in [0, 0.5), got {self.outlier_fraction!r}"
            )
        mean = np.broadcast_to(np.asarray(self.inlier_mean, dtype=float), (self.D,)).copy()
        cov = (
            np.eye(self.D)
            if self.inlier_cov is None
            else np.array(self.inlier_cov, dtype=float, copy=True)
        )
        if cov.shape != (self.D, self.D):
            raise InvalidConfigError(f"inlier_cov must be {self.D}x{self.D}, got {cov.shape}")
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            raise InvalidInputError("inlier_cov must be symmetric positive definite") from None
        low = np.broadcast_to(np.asarray(self.outlier_box_low, dtype=float), (self.D,)).copy()
        high = np.broadcast_to(np.asarray(self.outlier_box_high, dtype=float), (self.D,)).copy()
        if not np.all(low < high):
            raise InvalidConfigError("outlier box must satisfy low < high coordinatewise")
        if self.n_outliers + self.D + 2 > self.T:
            raise InvalidConfigError(
                f"T={self.T} too small for {self.n_outliers} outliers in D={self.D}"
            )
        for name, value in (("inlier_mean", mean), ("inlier_cov", cov),
                            ("outlier_box_low", low), ("outlier_box_high", high)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def n_outliers(self) -> int:
        return int(math.floor(self.outlier_fraction * self.T + 1e-9))


def generate(spec: SyntheticSpec) -> tuple[Dataset, frozenset[int]]:
    """Draw the planted dataset and return it with the true outlier indices."""
    rng = np.random.default_rng(spec.seed)
    k = spec.n_outliers
    inliers = rng.multivariate_normal(spec.inlier_mean, spec.inlier_cov, size=spec.T - k)
    outliers = rng.uniform(spec.outlier_box_low, spec.outlier_box_high, size=(k, spec.D))
    stacked = np.vstack([inliers, outliers])
    perm = rng.permutation(spec.T)
    truth = frozenset(int(i) for i in np.flatnonzero(perm >= spec.T - k))
    return Dataset(stacked[perm]), truth


@dataclass(frozen=True)
class MetricReport:
    """Per-seed metric values with a normal-approximation 95% interval.

    ``None`` entries mark seeds where the metric was undefined; they are
    excluded from the mean and interval.
    """

    metric_name: str
    per_seed_values: tuple[float | None, ...]
    mean: float
    ci_low: float
    ci_high: float


def ci95(values: np.ndarray) -> tuple[float, float, float]:
    """Mean and mean +- 1.96 * sample std (n-1 denominator) / sqrt(n)."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise InvalidInputError(f"need at least two values for an interval, got {v.size}")
    mean = float(v.mean())
    half = 1.96 * float(v.std(ddof=1)) / math.sqrt(v.size)
    return mean, mean - half, mean + half


def metric_report(name: str, values: list[float | None]) -> MetricReport:
    defined = [v for v in values if v is not None]
    if not defined:
        raise InvalidInputError(f"metric {name!r} has no defined values")
    if len(defined) == 1:
        mean = lo = hi = float(defined[0])
    else:
        mean, lo, hi = ci95(np.asarray(defined))
    return MetricReport(
        metric_name=name,
        per_seed_values=tuple(values),
        mean=mean,
        ci_low=lo,
        ci_high=hi,
    )


def precision(flags: np.ndarray, truth: frozenset[int]) -> float | None:
    """Correctly flagged outliers over all flagged points; None if no flags."""
    f = np.asarray(flags, dtype=bool)
    n_flagged = int(f.sum())
    if n_flagged == 0:
        return None
    flagged = np.flatnonzero(f)
    hits = sum(1 for i in flagged if int(i) in truth)
    return hits / n_flagged


def mahalanobis_chi2_baseline(
    dataset: Dataset, quantile: float = 0.975, robust: bool = False
) -> np.ndarray:
    """Flag instances whose squared Mahalanobis distance exceeds a chi2 quantile.

    robust=False uses the classical MLE mean/covariance (subject to masking
    under heavy contamination); robust=True uses the coordinatewise median
    and a MAD-rescaled diagonal covariance.
    """
    if not (0.0 < quantile < 1.0):
        raise InvalidConfigError(f"quantile must lie in (0, 1), got {quantile!r}")
    n, d = dataset.n_instances, dataset.n_features
    if n < d + 2:
        raise InvalidInputError(f"need at least D+2 = {d + 2} instances, got T={n}")
    x = dataset.instances
    if robust:
        center = np.median(x, axis=0)
        mad = np.median(np.abs(x - center), axis=0) * 1.4826
        var = mad**2
        floor = 1e-8 * max(float(var.mean()), float(x.var()), 1e-8)
        var = np.maximum(var, floor)
        maha = np.sum((x - center) ** 2 / var, axis=1)
    else:
        params = weighted_gaussian_mle(dataset, np.full(n, 1.0 / n))
        maha = mahalanobis_squared(dataset, params)
    return maha > chi2.ppf(quantile, d)


def timing_probe_wstep(
    t_grid: list[int],
    d_grid: list[int],
    repeats: int = 9,
    *,
    fixed_t: int = 100_000,
    alpha: float = 1.0,
    seed: int = 0,
    warmup: int = 3,
) -> list[dict]:
    """Median wall time of the weight update alone, per grid cell.

    T rows time the update on error vectors of length T.  D rows keep the
    statistics size at ``fixed_t`` and precompute the errors from
    D-dimensional data, so the dimension can only affect work done outside
    the timed region.  Runs on a single thread of execution.
    """
    if not t_grid or not d_grid:
        raise InvalidInputError("t_grid and d_grid must be non-empty")
    if repeats < 5:
        raise InvalidInputError(f"repeats must be at least 5, got {repeats}")
    rng = np.random.default_rng(seed)

    def time_cell(errors: np.ndarray) -> tuple[float, float]:
        samples = []
        for i in range(warmup + repeats):
            start = time.perf_counter()
            w_step(errors, alpha)
            elapsed = time.perf_counter() - start
            if i >= warmup:
                samples.append(elapsed)
        arr = np.asarray(samples)
        q75, q25 = np.percentile(arr, [75, 25])
        return float(np.median(arr)), float(q75 - q25)

    rows: list[dict] = []
    for t in t_grid:
        median, iqr = time_cell(rng.standard_normal(int(t)))
        rows.append({"axis": "T", "T": int(t), "D": None,
                     "median_s": median, "iqr_s": iqr, "repeats": repeats})
    for d in d_grid:
        data = rng.standard_normal((int(fixed_t), int(d)))
        errors = np.einsum("ij,ij->i", data, data)
        median, iqr = time_cell(errors)
        rows.append({"axis": "D", "T": int(fixed_t), "D": int(d),
                     "median_s": median, "iqr_s": iqr, "repeats": repeats})
    return rows


def timing_ratios(rows: list[dict]) -> dict:
    """Consecutive T-scaling ratios and the D-axis max/min spread."""
    t_rows = sorted((r for r in rows if r["axis"] == "T"), key=lambda r: r["T"])
    d_rows = [r for r in rows if r["axis"] == "D"]
    t_ratios = [
        t_rows[i + 1]["median_s"] / t_rows[i]["median_s"] for i in range(len(t_rows) - 1)
    ]
    d_medians = [r["median_s"] for r in d_rows]
    d_spread = max(d_medians) / min(d_medians) if d_medians else math.nan
    return {"t_ratios": t_ratios, "d_max_over_min": d_spread}


def _synth_seed_row(
    spec: SyntheticSpec, config: EosConfig, ess_target: float, quantile: float
) -> dict:
    data, truth = generate(spec)
    calibration = calibrate_alpha(data, ess_target, config)
    report = detect(
        data,
        replace(config, alpha=calibration.alpha),
        FlagRule.TOP_K,
        len(truth),
    )
    return {
        "seed": spec.seed,
        "alpha": calibration.alpha,
        "ess_fraction": calibration.attained_fraction,
        "precision_eos_topk": precision(report.flags, truth),
        "precision_chi2_mle": precision(
            mahalanobis_chi2_baseline(data, quantile, robust=False), truth
        ),
        "precision_chi2_robust": precision(
            mahalanobis_chi2_baseline(data, quantile, robust=True), truth
        ),
    }


def run_synth_benchmark(
    spec: SyntheticSpec,
    n_seeds: int,
    *,
    ess_target: float = 0.95,
    quantile: float = 0.975,
    config: EosConfig | None = None,
    max_workers: int = 1,
) -> dict:
    """Planted-outlier precision of the entropic detector vs chi2 baselines.

    Seeds run independently (optionally in a thread pool); results are
    merged in seed order so the output does not depend on scheduling.
    """
    if n_seeds < 1:
        raise InvalidInputError(f"n_seeds must be positive, got {n_seeds}")
    cfg = config if config is not None else EosConfig(alpha=1.0)
    specs = [replace(spec, seed=spec.seed + i) for i in range(n_seeds)]

    def job(s: SyntheticSpec) -> dict:
        return _synth_seed_row(s, cfg, ess_target, quantile)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(job, specs))
    else:
        rows = [job(s) for s in specs]

    methods = ("precision_eos_topk", "precision_chi2_mle", "precision_chi2_robust")
    reports = {m: metric_report(m, [r[m] for r in rows]) for m in methods}
    return {"rows": rows, "reports": reports}

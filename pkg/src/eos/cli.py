"""Command-line experiment runner with serialized, reproducible reports.

A single JSON config selects one of six commands (detect, affinity,
robust-train, synth-bench, mislabel-bench, timing) and carries one section
per module.  Unknown keys are rejected.  Every run writes ``report.json``
with the full effective config, plus command-specific CSVs; identical
config and seed reproduce identical numeric outputs (wall-clock timings
and timestamps excluded).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .affinity import affinity_rows, calibrate_row_alpha
from .anomaly import AlphaCalibration, FlagRule, calibrate_alpha, detect
from .bench import (
    SyntheticSpec,
    MetricReport,
    metric_report,
    run_synth_benchmark,
    timing_probe_wstep,
    timing_ratios,
)
from .core import EosConfig, InitPolicy
from .data import Dataset
from .dataio import parse_csv_dataset
from .exceptions import EosError, InvalidConfigError, ParseError
from .supervised import (
    MislabelExperimentConfig,
    SplitOutcome,
    _select_alpha,
    auc,
    mislabel_experiment,
    predict_proba,
)

COMMANDS = ("detect", "affinity", "robust-train", "synth-bench", "mislabel-bench", "timing")

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# config sections (strict parsing: unknown keys are errors)
# ---------------------------------------------------------------------------

def _require_mapping(data, path: str) -> dict:
    if not isinstance(data, dict):
        raise InvalidConfigError(f"config section {path!r} must be an object")
    return data


def _check_keys(data: dict, cls, path: str) -> None:
    allowed = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise InvalidConfigError(f"unknown key(s) {unknown} in config section {path!r}")


def _as_float(data: dict, key: str, default: float, path: str) -> float:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidConfigError(f"{path}.{key} must be a number, got {value!r}")
    return float(value)


def _as_opt_float(data: dict, key: str, default: float | None, path: str) -> float | None:
    value = data.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidConfigError(f"{path}.{key} must be a number or null, got {value!r}")
    return float(value)


def _as_int(data: dict, key: str, default: int, path: str) -> int:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidConfigError(f"{path}.{key} must be an integer, got {value!r}")
    return value


def _as_str(data: dict, key: str, default: str, path: str) -> str:
    value = data.get(key, default)
    if not isinstance(value, str):
        raise InvalidConfigError(f"{path}.{key} must be a string, got {value!r}")
    return value


def _as_opt_str(data: dict, key: str, default: str | None, path: str) -> str | None:
    value = data.get(key, default)
    if value is not None and not isinstance(value, str):
        raise InvalidConfigError(f"{path}.{key} must be a string or null, got {value!r}")
    return value


def _as_float_tuple(data: dict, key: str, default: tuple, path: str) -> tuple[float, ...]:
    value = data.get(key, list(default))
    if not isinstance(value, (list, tuple)) or any(
        isinstance(v, bool) or not isinstance(v, (int, float)) for v in value
    ):
        raise InvalidConfigError(f"{path}.{key} must be a list of numbers, got {value!r}")
    return tuple(float(v) for v in value)


def _as_int_tuple(data: dict, key: str, default: tuple, path: str) -> tuple[int, ...]:
    value = data.get(key, list(default))
    if not isinstance(value, (list, tuple)) or any(
        isinstance(v, bool) or not isinstance(v, int) for v in value
    ):
        raise InvalidConfigError(f"{path}.{key} must be a list of integers, got {value!r}")
    return tuple(int(v) for v in value)


def _as_str_tuple(data: dict, key: str, default: tuple, path: str) -> tuple[str, ...]:
    value = data.get(key, list(default))
    if not isinstance(value, (list, tuple)) or any(not isinstance(v, str) for v in value):
        raise InvalidConfigError(f"{path}.{key} must be a list of strings, got {value!r}")
    return tuple(value)


@dataclass(frozen=True)
class EosSection:
    alpha: float = 1.0
    tol: float = 1e-12
    max_iters: int = 500
    init_policy: str = "uniform"

    @classmethod
    def from_dict(cls, data: dict, path: str = "eos") -> "EosSection":
        _check_keys(data, cls, path)
        init = _as_str(data, "init_policy", "uniform", path)
        if init not in (p.value for p in InitPolicy):
            raise InvalidConfigError(
                f"{path}.init_policy must be one of {[p.value for p in InitPolicy]}, got {init!r}"
            )
        return cls(
            alpha=_as_float(data, "alpha", 1.0, path),
            tol=_as_float(data, "tol", 1e-12, path),
            max_iters=_as_int(data, "max_iters", 500, path),
            init_policy=init,
        )

    def build(self, seed: int) -> EosConfig:
        return EosConfig(
            alpha=self.alpha,
            tol=self.tol,
            max_iters=self.max_iters,
            init_policy=InitPolicy(self.init_policy),
            seed=seed,
        )


@dataclass(frozen=True)
class CsvSection:
    label_column: str | None = None
    drop_columns: tuple[str, ...] = ()
    label_map: dict[str, int] | None = None

    @classmethod
    def from_dict(cls, data: dict, path: str = "csv") -> "CsvSection":
        _check_keys(data, cls, path)
        label_map = data.get("label_map")
        if label_map is not None:
            if not isinstance(label_map, dict) or any(
                not isinstance(k, str) or isinstance(v, bool) or not isinstance(v, int)
                for k, v in label_map.items()
            ):
                raise InvalidConfigError(
                    f"{path}.label_map must map strings to integers, got {label_map!r}"
                )
            label_map = {k: int(v) for k, v in label_map.items()}
        return cls(
            label_column=_as_opt_str(data, "label_column", None, path),
            drop_columns=_as_str_tuple(data, "drop_columns", (), path),
            label_map=label_map,
        )


@dataclass(frozen=True)
class DetectSection:
    rule: str = "relative_threshold"
    rule_param: float = 0.1
    calibrate_ess_fraction: float | None = None

    @classmethod
    def from_dict(cls, data: dict, path: str = "detect") -> "DetectSection":
        _check_keys(data, cls, path)
        rule = _as_str(data, "rule", "relative_threshold", path)
        if rule not in (r.value for r in FlagRule):
            raise InvalidConfigError(
                f"{path}.rule must be one of {[r.value for r in FlagRule]}, got {rule!r}"
            )
        return cls(
            rule=rule,
            rule_param=_as_float(data, "rule_param", 0.1, path),
            calibrate_ess_fraction=_as_opt_float(data, "calibrate_ess_fraction", None, path),
        )


@dataclass(frozen=True)
class AffinitySection:
    sigma_sq: float | None = None
    alpha: float | None = None
    perplexity: float | None = None

    @classmethod
    def from_dict(cls, data: dict, path: str = "affinity") -> "AffinitySection":
        _check_keys(data, cls, path)
        return cls(
            sigma_sq=_as_opt_float(data, "sigma_sq", None, path),
            alpha=_as_opt_float(data, "alpha", None, path),
            perplexity=_as_opt_float(data, "perplexity", None, path),
        )


@dataclass(frozen=True)
class RobustTrainSection:
    l2_strength: float = 1e-4
    alpha: float | None = None
    alpha_grid: tuple[float, ...] = (0.1, 0.3, 1.0, 3.0, 10.0)

    @classmethod
    def from_dict(cls, data: dict, path: str = "robust_train") -> "RobustTrainSection":
        _check_keys(data, cls, path)
        return cls(
            l2_strength=_as_float(data, "l2_strength", 1e-4, path),
            alpha=_as_opt_float(data, "alpha", None, path),
            alpha_grid=_as_float_tuple(data, "alpha_grid", (0.1, 0.3, 1.0, 3.0, 10.0), path),
        )


@dataclass(frozen=True)
class SynthBenchSection:
    t: int = 1000
    d: int = 10
    outlier_fraction: float = 0.05
    box_low: float = 5.0
    box_high: float = 9.0
    n_seeds: int = 50
    quantile: float = 0.975
    ess_target: float = 0.95

    @classmethod
    def from_dict(cls, data: dict, path: str = "synth_bench") -> "SynthBenchSection":
        _check_keys(data, cls, path)
        return cls(
            t=_as_int(data, "t", 1000, path),
            d=_as_int(data, "d", 10, path),
            outlier_fraction=_as_float(data, "outlier_fraction", 0.05, path),
            box_low=_as_float(data, "box_low", 5.0, path),
            box_high=_as_float(data, "box_high", 9.0, path),
            n_seeds=_as_int(data, "n_seeds", 50, path),
            quantile=_as_float(data, "quantile", 0.975, path),
            ess_target=_as_float(data, "ess_target", 0.95, path),
        )


@dataclass(frozen=True)
class MislabelSection:
    flip_proportions: tuple[float, ...] = (0.0, 0.1, 0.2, 0.3)
    n_splits: int = 50
    train_fraction: float = 0.75
    alpha_grid: tuple[float, ...] = (0.1, 0.3, 1.0, 3.0, 10.0)
    l2_strength: float = 1e-4
    task_size: int = 400
    task_dim: int = 5

    @classmethod
    def from_dict(cls, data: dict, path: str = "mislabel_bench") -> "MislabelSection":
        _check_keys(data, cls, path)
        return cls(
            flip_proportions=_as_float_tuple(data, "flip_proportions", (0.0, 0.1, 0.2, 0.3), path),
            n_splits=_as_int(data, "n_splits", 50, path),
            train_fraction=_as_float(data, "train_fraction", 0.75, path),
            alpha_grid=_as_float_tuple(data, "alpha_grid", (0.1, 0.3, 1.0, 3.0, 10.0), path),
            l2_strength=_as_float(data, "l2_strength", 1e-4, path),
            task_size=_as_int(data, "task_size", 400, path),
            task_dim=_as_int(data, "task_dim", 5, path),
        )


@dataclass(frozen=True)
class TimingSection:
    t_grid: tuple[int, ...] = (100_000, 200_000, 400_000)
    d_grid: tuple[int, ...] = (2, 20, 200)
    repeats: int = 9
    fixed_t: int = 100_000

    @classmethod
    def from_dict(cls, data: dict, path: str = "timing") -> "TimingSection":
        _check_keys(data, cls, path)
        return cls(
            t_grid=_as_int_tuple(data, "t_grid", (100_000, 200_000, 400_000), path),
            d_grid=_as_int_tuple(data, "d_grid", (2, 20, 200), path),
            repeats=_as_int(data, "repeats", 9, path),
            fixed_t=_as_int(data, "fixed_t", 100_000, path),
        )


@dataclass(frozen=True)
class RunConfig:
    command: str
    output_dir: str = "eos-output"
    input_path: str | None = None
    seed: int = 0
    eos: EosSection = field(default_factory=EosSection)
    csv: CsvSection = field(default_factory=CsvSection)
    detect: DetectSection = field(default_factory=DetectSection)
    affinity: AffinitySection = field(default_factory=AffinitySection)
    robust_train: RobustTrainSection = field(default_factory=RobustTrainSection)
    synth_bench: SynthBenchSection = field(default_factory=SynthBenchSection)
    mislabel_bench: MislabelSection = field(default_factory=MislabelSection)
    timing: TimingSection = field(default_factory=TimingSection)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        _require_mapping(data, "<root>")
        _check_keys(data, cls, "<root>")
        command = _as_str(data, "command", "", "<root>")
        if command not in COMMANDS:
            raise InvalidConfigError(f"command must be one of {list(COMMANDS)}, got {command!r}")
        seed = _as_int(data, "seed", 0, "<root>")
        if seed < 0:
            raise InvalidConfigError(f"seed must be non-negative, got {seed}")
        return cls(
            command=command,
            output_dir=_as_str(data, "output_dir", "eos-output", "<root>"),
            input_path=_as_opt_str(data, "input_path", None, "<root>"),
            seed=seed,
            eos=EosSection.from_dict(_require_mapping(data.get("eos", {}), "eos")),
            csv=CsvSection.from_dict(_require_mapping(data.get("csv", {}), "csv")),
            detect=DetectSection.from_dict(_require_mapping(data.get("detect", {}), "detect")),
            affinity=AffinitySection.from_dict(
                _require_mapping(data.get("affinity", {}), "affinity")
            ),
            robust_train=RobustTrainSection.from_dict(
                _require_mapping(data.get("robust_train", {}), "robust_train")
            ),
            synth_bench=SynthBenchSection.from_dict(
                _require_mapping(data.get("synth_bench", {}), "synth_bench")
            ),
            mislabel_bench=MislabelSection.from_dict(
                _require_mapping(data.get("mislabel_bench", {}), "mislabel_bench")
            ),
            timing=TimingSection.from_dict(_require_mapping(data.get("timing", {}), "timing")),
        )

    def to_dict(self) -> dict:
        return _jsonify(dataclasses.asdict(self))


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (AlphaCalibration, MetricReport, SplitOutcome)):
        return _jsonify(dataclasses.asdict(obj))
    return obj


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _atomic_write(path, buffer.getvalue())


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_report(out_dir: Path, config: RunConfig, results: dict) -> None:
    report = {
        "schema_version": SCHEMA_VERSION,
        "software_version": __version__,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "command": config.command,
        "config": config.to_dict(),
        "results": _jsonify(results),
    }
    _atomic_write(out_dir / "report.json", json.dumps(report, indent=2, sort_keys=True) + "\n")


def _env_threads() -> int:
    raw = os.environ.get("EOS_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise InvalidConfigError(f"EOS_THREADS must be an integer, got {raw!r}") from None
    if value < 1:
        raise InvalidConfigError(f"EOS_THREADS must be >= 1, got {value}")
    return value


def _load_input(config: RunConfig, *, require_labels: bool) -> Dataset:
    if config.input_path is None:
        raise InvalidConfigError(f"command {config.command!r} requires input_path")
    data = parse_csv_dataset(
        config.input_path,
        label_column=config.csv.label_column,
        drop_columns=config.csv.drop_columns,
        label_map=config.csv.label_map,
    )
    if require_labels and data.labels is None:
        raise InvalidConfigError(
            f"command {config.command!r} requires a label column (set csv.label_column)"
        )
    return data


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _run_detect(config: RunConfig, out_dir: Path) -> dict:
    data = _load_input(config, require_labels=False)
    eos_cfg = config.eos.build(config.seed)
    calibration = None
    if config.detect.calibrate_ess_fraction is not None:
        calibration = calibrate_alpha(data, config.detect.calibrate_ess_fraction, eos_cfg)
        eos_cfg = replace(eos_cfg, alpha=calibration.alpha)
    report = detect(data, eos_cfg, FlagRule(config.detect.rule), config.detect.rule_param)
    _write_csv(
        out_dir / "weights.csv",
        ["index", "weight", "flag"],
        [[i, _fmt(float(w)), int(f)] for i, (w, f) in enumerate(zip(report.weights, report.flags))],
    )
    return {
        "T": data.n_instances,
        "D": data.n_features,
        "alpha_used": report.alpha_used,
        "calibration": calibration,
        "rule": report.rule.value,
        "rule_param": report.rule_param,
        "n_flagged": report.n_flagged,
        "flagged_indices": np.flatnonzero(report.flags),
        "gaussian": {
            "mu": report.gaussian.mu,
            "sigma": report.gaussian.sigma,
            "ridge": report.gaussian.ridge,
        },
    }


def _run_affinity(config: RunConfig, out_dir: Path) -> dict:
    data = _load_input(config, require_labels=False)
    section = config.affinity
    rows = affinity_rows(
        data, sigma_sq=section.sigma_sq, alpha=section.alpha, perplexity=section.perplexity
    )
    csv_rows = []
    for row in rows:
        for j, value in zip(row.neighbor_indices(), row.values):
            csv_rows.append([row.anchor_index, int(j), _fmt(float(value))])
    _write_csv(out_dir / "affinity.csv", ["row_index", "col_index", "value"], csv_rows)
    mode = (
        "perplexity" if section.perplexity is not None
        else "alpha" if section.alpha is not None
        else "sigma_sq"
    )
    return {
        "T": data.n_instances,
        "mode": mode,
        "row_sigma_sq": [row.sigma_sq for row in rows],
    }


def _run_robust_train(config: RunConfig, out_dir: Path) -> dict:
    data = _load_input(config, require_labels=True)
    section = config.robust_train
    if section.alpha is not None:
        from .supervised import robust_fit

        result = robust_fit(
            data, replace(config.eos.build(config.seed), alpha=section.alpha), section.l2_strength
        )
        alpha_selected = section.alpha
    else:
        cfg = MislabelExperimentConfig(
            flip_proportion=0.0,
            n_splits=1,
            seed=config.seed,
            alpha_grid=section.alpha_grid,
            l2_strength=section.l2_strength,
        )
        _, alpha_selected, result = _select_alpha(data, data, cfg)
    params = result.theta
    training_auc = auc(predict_proba(params, data.instances), data.labels)
    _write_csv(
        out_dir / "weights.csv",
        ["index", "weight"],
        [[i, _fmt(float(w))] for i, w in enumerate(result.weights)],
    )
    return {
        "T": data.n_instances,
        "D": data.n_features,
        "alpha_selected": alpha_selected,
        "coefficients": params.coefficients,
        "intercept": params.intercept,
        "l2_strength": params.l2_strength,
        "training_auc": training_auc,
        "iterations": result.iterations,
        "termination": result.termination.value,
    }


def _run_synth_bench(config: RunConfig, out_dir: Path) -> dict:
    section = config.synth_bench
    spec = SyntheticSpec(
        T=section.t,
        D=section.d,
        outlier_fraction=section.outlier_fraction,
        outlier_box_low=section.box_low,
        outlier_box_high=section.box_high,
        seed=config.seed,
    )
    outcome = run_synth_benchmark(
        spec,
        section.n_seeds,
        ess_target=section.ess_target,
        quantile=section.quantile,
        config=config.eos.build(config.seed),
        max_workers=_env_threads(),
    )
    csv_rows = []
    for row in outcome["rows"]:
        for metric in ("precision_eos_topk", "precision_chi2_mle", "precision_chi2_robust", "alpha"):
            csv_rows.append(["synth-bench", row["seed"], metric, _fmt(row[metric])])
    _write_csv(out_dir / "metrics.csv", ["experiment", "seed", "metric", "value"], csv_rows)
    return {"spec": dataclasses.asdict(spec), "rows": outcome["rows"], "reports": outcome["reports"]}


def _run_mislabel_bench(config: RunConfig, out_dir: Path) -> dict:
    section = config.mislabel_bench
    data = _load_input(config, require_labels=True) if config.input_path is not None else None
    max_workers = _env_threads()

    per_p: dict[str, dict] = {}
    csv_rows: list[list] = []
    for p in section.flip_proportions:
        cfg = MislabelExperimentConfig(
            flip_proportion=p,
            n_splits=section.n_splits,
            train_fraction=section.train_fraction,
            seed=config.seed,
            alpha_grid=section.alpha_grid,
            l2_strength=section.l2_strength,
        )
        if max_workers > 1:
            from concurrent.futures import ThreadPoolExecutor

            children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_splits)

            def job(child):
                from .supervised import _run_split, two_gaussian_dataset

                rng = np.random.default_rng(child)
                local = data if data is not None else two_gaussian_dataset(
                    section.task_size, section.task_dim, rng
                )
                return _run_split(local, cfg, rng)

            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                outcomes = list(pool.map(job, children))
        else:
            outcomes = mislabel_experiment(
                cfg, data, task_size=section.task_size, task_dim=section.task_dim
            )

        plain = [o.auc_plain for o in outcomes]
        robust = [o.auc_robust for o in outcomes]
        wins = sum(1 for o in outcomes if o.auc_robust >= o.auc_plain)
        suppressed = [
            o.mean_weight_flipped < o.mean_weight_clean
            for o in outcomes
            if o.mean_weight_flipped is not None
        ]
        key = f"{p:g}"
        per_p[key] = {
            "auc_plain": metric_report("auc_plain", list(plain)),
            "auc_robust": metric_report("auc_robust", list(robust)),
            "win_fraction": wins / len(outcomes),
            "mean_improvement": float(np.mean(np.asarray(robust) - np.asarray(plain))),
            "suppression_fraction": (
                sum(suppressed) / len(suppressed) if suppressed else None
            ),
            "outcomes": outcomes,
        }
        experiment = f"mislabel_p={key}"
        for split, o in enumerate(outcomes):
            csv_rows.append([experiment, split, "auc_plain", _fmt(o.auc_plain)])
            csv_rows.append([experiment, split, "auc_robust", _fmt(o.auc_robust)])
            csv_rows.append([experiment, split, "alpha_selected", _fmt(o.alpha_selected)])
    _write_csv(out_dir / "metrics.csv", ["experiment", "seed", "metric", "value"], csv_rows)
    return {"per_p": per_p, "source": "csv" if data is not None else "synthetic"}


def _run_timing(config: RunConfig, out_dir: Path) -> dict:
    section = config.timing
    rows = timing_probe_wstep(
        list(section.t_grid),
        list(section.d_grid),
        section.repeats,
        fixed_t=section.fixed_t,
        seed=config.seed,
    )
    _write_csv(
        out_dir / "timing.csv",
        ["axis", "T", "D", "median_s", "iqr_s", "repeats"],
        [[r["axis"], r["T"], _fmt(r["D"]), _fmt(r["median_s"]), _fmt(r["iqr_s"]), r["repeats"]]
         for r in rows],
    )
    return {"rows": rows, "ratios": timing_ratios(rows)}


_RUNNERS = {
    "detect": _run_detect,
    "affinity": _run_affinity,
    "robust-train": _run_robust_train,
    "synth-bench": _run_synth_bench,
    "mislabel-bench": _run_mislabel_bench,
    "timing": _run_timing,
}


def run(config: RunConfig, quiet: bool = False) -> int:
    """Execute the configured command, writing report.json and CSVs."""
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not quiet:
        print(f"eos {config.command}: seed={config.seed} output={out_dir}")
    results = _RUNNERS[config.command](config, out_dir)
    _write_report(out_dir, config, results)
    if not quiet:
        print(f"eos {config.command}: wrote {out_dir / 'report.json'}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="eos",
        description="Run entropic-outlier-sparsification experiments from a JSON config.",
    )
    parser.add_argument("--config", required=True, help="path to the JSON run config")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--output", default=None, help="override the output directory")
    parser.add_argument("--alpha", type=float, default=None, help="override the fit alpha")
    parser.add_argument("--quiet", action="store_true", help="suppress progress lines")
    args = parser.parse_args(argv)

    try:
        try:
            with open(args.config, encoding="utf-8") as handle:
                raw = json.load(handle)
        except FileNotFoundError:
            raise ParseError(f"config file not found: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise ParseError(f"config file {args.config} is not valid JSON: {exc}") from None
        config = RunConfig.from_dict(raw)
        if args.seed is not None:
            if args.seed < 0:
                raise InvalidConfigError(f"--seed must be non-negative, got {args.seed}")
            config = replace(config, seed=args.seed)
        if args.output is not None:
            config = replace(config, output_dir=args.output)
        if args.alpha is not None:
            config = replace(config, eos=replace(config.eos, alpha=args.alpha))
        return run(config, quiet=args.quiet)
    except EosError as exc:
        payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        print(json.dumps(payload), file=sys.stderr)
        return 2 if isinstance(exc, (InvalidConfigError, ParseError)) else 1


if __name__ == "__main__":
    sys.exit(main())

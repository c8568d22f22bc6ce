"""Monte Carlo benchmark driver, metrics, aggregation, and path/dataset export.

A benchmark case fixes the problem geometry (d, n, the true coefficient
vector, an optional engineered collinearity between columns 2 and 3) and
runs m independent trials.  Each trial draws a fresh standard-normal design,
normalizes it, draws the response at the true coefficients *on the
normalized design*, fits the configured path methods, applies the configured
information criteria, and scores three things against an independently drawn
evaluation set of the same shape:

* generalization — mean squared difference between fresh responses and the
  predicted means (optionally misclassification rate for binary responses);
* model selection — whether the chosen support equals the true support,
  plus "seq": whether the true support appears anywhere along the path;
* parameter estimation — squared l2 error of the selected estimate.

Trials are deterministic functions of (base_seed, trial_index), so a report
is byte-identical across repeat runs and across worker counts.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import DesignMatrix, ResponseVector, normalize_design, write_dataset_csv
from .errors import RankDeficient, TanlarsError, ZeroVarianceColumn
from .families import get_family
from .l1 import L1Path, LambdaGrid, l1_glm_path
from .lars import SolutionPath
from .mle import MleOptions
from .selection import active_set, select_many
from .tangent import tlars, tlasso1, tlasso2

ALL_METHODS = ("tlars", "tlasso1", "tlasso2", "l1")
ALL_CRITERIA = ("aic1", "aic2", "bic1", "bic2")

export_dataset = write_dataset_csv


def _case_theta0(name: str) -> tuple[np.ndarray, int, int, str, float]:
    """(theta0, d, n, correlation_structure, noise_sd) for a named case."""
    if name.startswith("A"):
        theta0 = np.array([10.0, 10.0, 10.0, -10.0, -10.0, -10.0, 0, 0, 0, 0])
        return theta0, 10, 100 if name == "A1" else 1000, "independent", 0.1
    if name.startswith("B"):
        theta0 = np.zeros(10)
        theta0[:2] = 10.0
        return theta0, 10, 100 if name == "B1" else 1000, "b_case", 0.1
    if name.startswith("C"):
        theta0 = np.concatenate([np.full(10, 10.0), np.full(10, -10.0), np.zeros(30)])
        return theta0, 50, 100 if name == "C1" else 1000, "independent", 0.1
    raise ValueError(f"unknown case {name!r}")


@dataclass(frozen=True)
class CaseConfig:
    """Full description of one benchmark case."""

    d: int
    n: int
    theta0: np.ndarray
    m_trials: int
    family: str = "binomial"
    correlation_structure: str = "independent"  # or "b_case"
    noise_sd: float = 0.1
    methods: tuple[str, ...] = ALL_METHODS
    criteria: tuple[str, ...] = ALL_CRITERIA
    base_seed: int = 0
    ridge: float = 1e-6
    gen_metric: str = "squared"  # or "misclass"
    nlambda: int = 100
    lambda_ratio: float = 1e-4
    mle_max_iter: int = 100
    mle_grad_tol: float = 1e-8

    def __post_init__(self):
        theta0 = np.asarray(self.theta0, dtype=float)
        theta0.setflags(write=False)
        object.__setattr__(self, "theta0", theta0)
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "criteria", tuple(self.criteria))
        if len(theta0) != self.d:
            raise ValueError("theta0 must have length d")
        if self.m_trials < 1:
            raise ValueError("m_trials must be >= 1")
        if self.correlation_structure not in ("independent", "b_case"):
            raise ValueError(f"bad correlation_structure {self.correlation_structure!r}")
        if self.correlation_structure == "b_case" and not self.noise_sd > 0:
            raise ValueError("noise_sd must be positive for b_case")
        for m in self.methods:
            if m not in ALL_METHODS:
                raise ValueError(f"unknown method {m!r}")
        for c in self.criteria:
            if c not in ALL_CRITERIA:
                raise ValueError(f"unknown criterion {c!r}")
        if self.gen_metric not in ("squared", "misclass"):
            raise ValueError(f"bad gen_metric {self.gen_metric!r}")
        get_family(self.family)  # validates the name

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "theta0": [float(v) for v in self.theta0],
            "m_trials": self.m_trials,
            "family": self.family,
            "correlation_structure": self.correlation_structure,
            "noise_sd": self.noise_sd,
            "methods": list(self.methods),
            "criteria": list(self.criteria),
            "base_seed": self.base_seed,
            "ridge": self.ridge,
            "gen_metric": self.gen_metric,
            "nlambda": self.nlambda,
            "lambda_ratio": self.lambda_ratio,
            "mle_max_iter": self.mle_max_iter,
            "mle_grad_tol": self.mle_grad_tol,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CaseConfig":
        data = dict(data)
        data["theta0"] = np.asarray(data["theta0"], dtype=float)
        data["methods"] = tuple(data.get("methods", ALL_METHODS))
        data["criteria"] = tuple(data.get("criteria", ALL_CRITERIA))
        return cls(**data)


def case_config(name: str, **overrides) -> CaseConfig:
    """Preset configuration for the named benchmark case (A1..C2)."""
    theta0, d, n, structure, noise_sd = _case_theta0(name)
    defaults = dict(
        d=d,
        n=n,
        theta0=theta0,
        m_trials=1000 if name == "C2" else 10000,
        family="binomial",
        correlation_structure=structure,
        noise_sd=noise_sd,
    )
    defaults.update(overrides)
    return CaseConfig(**defaults)


@dataclass
class TrialSummary:
    """Metrics of one trial; per_method maps method name to its results."""

    trial_index: int
    failed: bool = False
    error: str | None = None
    per_method: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "trial_index": self.trial_index,
            "failed": self.failed,
            "error": self.error,
            "per_method": self.per_method,
        }


@dataclass
class CaseReport:
    """Aggregated results of one case, mirroring the benchmark table layout."""

    config: dict
    m_trials: int
    failed_trials: int
    failed_trial_indices: list[int]
    methods: dict

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "m_trials": self.m_trials,
            "failed_trials": self.failed_trials,
            "failed_trial_indices": self.failed_trial_indices,
            "methods": self.methods,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "CaseReport":
        data = json.loads(text)
        return cls(
            config=data["config"],
            m_trials=data["m_trials"],
            failed_trials=data["failed_trials"],
            failed_trial_indices=data["failed_trial_indices"],
            methods=data["methods"],
        )


# ----------------------------------------------------------------------
# Data generation
# ----------------------------------------------------------------------


def _draw_design(rng, config: CaseConfig) -> DesignMatrix:
    raw = rng.standard_normal((config.n, config.d))
    if config.correlation_structure == "b_case":
        # engineered collinearity, injected into the raw data: column 3 is
        # column 2 plus small noise, before normalization
        raw[:, 2] = raw[:, 1] + config.noise_sd * rng.standard_normal(config.n)
    return normalize_design(raw)


def _draw_response(rng, family_kind: str, mu: np.ndarray) -> ResponseVector:
    if family_kind == "binomial":
        return ResponseVector((rng.random(len(mu)) < mu).astype(float), "binary01")
    if family_kind == "poisson":
        return ResponseVector(rng.poisson(mu).astype(float), "nonneg_integer")
    return ResponseVector(mu + rng.standard_normal(len(mu)), "real")


def generate_trial(config: CaseConfig, trial_index: int):
    """Deterministic training and evaluation draws for one trial.

    The random stream is seeded by (base_seed, trial_index, attempt) and
    consumed in a fixed order, so the same arguments always reproduce the
    same bits.  A draw whose design fails normalization is retried with a
    bumped attempt counter, at most 10 times.

    Returns
    -------
    (X, y, (X_fresh, y_fresh))
    """
    if not 0 <= trial_index < config.m_trials:
        raise ValueError("trial_index out of range")
    family = get_family(config.family)
    last_exc = None
    for attempt in range(10):
        ss = np.random.SeedSequence((config.base_seed, trial_index, attempt))
        rng = np.random.default_rng(ss)
        try:
            X = _draw_design(rng, config)
            y = _draw_response(rng, family.kind, family.mean_response(X, config.theta0))
            X_fresh = _draw_design(rng, config)
            y_fresh = _draw_response(
                rng, family.kind, family.mean_response(X_fresh, config.theta0)
            )
            return X, y, (X_fresh, y_fresh)
        except (ZeroVarianceColumn, RankDeficient) as exc:
            last_exc = exc
    raise RankDeficient(
        f"trial {trial_index}: no full-rank design in 10 attempts"
    ) from last_exc


def generalization_error(theta_hat, fresh, family, metric: str = "squared", intercept: float = 0.0) -> float:
    """Prediction error of theta_hat on an independent evaluation set.

    The default is the mean squared difference between the fresh responses
    and the predicted means; "misclass" thresholds the predicted mean at 1/2
    (only meaningful for binary responses).
    """
    X_fresh, y_fresh = fresh
    mu = family.mean_response(X_fresh, np.asarray(theta_hat, dtype=float), offset=intercept)
    yv = y_fresh.values
    if metric == "squared":
        return float(np.mean((yv - mu) ** 2))
    if metric == "misclass":
        return float(np.mean((mu > 0.5).astype(float) != yv))
    raise ValueError(f"unknown metric {metric!r}")


# ----------------------------------------------------------------------
# Trial execution and aggregation
# ----------------------------------------------------------------------


def _fit_path(method, X, y, family, config):
    opts = MleOptions(
        max_iter=config.mle_max_iter, grad_tol=config.mle_grad_tol, ridge=config.ridge
    )
    if method == "tlars":
        return tlars(X, y, family, mle_opts=opts)
    if method == "tlasso1":
        return tlasso1(X, y, family, mle_opts=opts)
    if method == "tlasso2":
        return tlasso2(X, y, family)
    if method == "l1":
        grid = LambdaGrid.default(X, y, family, count=config.nlambda, ratio=config.lambda_ratio)
        return l1_glm_path(X, y, family, grid=grid)
    raise ValueError(f"unknown method {method!r}")


def path_supports(path) -> list[tuple[int, ...]]:
    """Supports of every estimate along a path, in path order."""
    if isinstance(path, SolutionPath):
        return [active_set(bp.theta) for bp in path.breakpoints]
    if isinstance(path, L1Path):
        return [active_set(c) for c in path.coefficients]
    raise TypeError(f"unsupported path type {type(path).__name__}")


def run_trial(config: CaseConfig, trial_index: int) -> TrialSummary:
    """Fit every configured method on one trial and score every criterion."""
    family = get_family(config.family)
    opts = MleOptions(
        max_iter=config.mle_max_iter, grad_tol=config.mle_grad_tol, ridge=config.ridge
    )
    summary = TrialSummary(trial_index=trial_index)
    try:
        X, y, fresh = generate_trial(config, trial_index)
        true_support = active_set(config.theta0)
        for method in config.methods:
            path = _fit_path(method, X, y, family, config)
            supports = path_supports(path)
            seq = true_support in supports
            selections = select_many(path, X, y, family, config.criteria, mle_opts=opts)
            crit_results = {}
            for crit in config.criteria:
                res = selections[crit]
                theta_m = res.theta_for_metrics
                chosen_support = active_set(res.theta_selected)
                selected_true = chosen_support == true_support
                # chosen estimates always come from the path, so a selected
                # true model must also appear in the support sequence
                assert not selected_true or seq
                crit_results[crit] = {
                    "generalization_error": generalization_error(
                        theta_m, fresh, family, metric=config.gen_metric
                    ),
                    "selected_true_model": selected_true,
                    "parameter_sq_error": float(
                        np.sum((np.asarray(theta_m) - config.theta0) ** 2)
                    ),
                }
            summary.per_method[method] = {
                "seq_contains_truth": seq,
                "separation_flag": bool(path.meta.get("separation", False)),
                "criteria": crit_results,
            }
    except TanlarsError as exc:
        summary.failed = True
        summary.error = f"{type(exc).__name__}: {exc}"
        summary.per_method = {}
    return summary


def _trial_worker(args):
    config_dict, trial_index = args
    return run_trial(CaseConfig.from_dict(config_dict), trial_index)


def run_case(config: CaseConfig, workers: int = 1) -> CaseReport:
    """Run every trial of a case and aggregate the results.

    Trials are independent work items; with workers > 1 they are distributed
    over a process pool and reduced in trial-index order, so the report does
    not depend on the worker count.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    indices = range(config.m_trials)
    if workers == 1:
        summaries = [run_trial(config, t) for t in indices]
    else:
        cfg = config.to_dict()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_trial_worker, [(cfg, t) for t in indices]))
    return aggregate(config, summaries)


def aggregate(config: CaseConfig, summaries: list[TrialSummary]) -> CaseReport:
    """Reduce per-trial summaries to the case report, skipping failed trials."""
    ok = [s for s in summaries if not s.failed]
    failed = [s.trial_index for s in summaries if s.failed]
    methods_out = {}
    for method in config.methods:
        crit_out = {}
        for crit in config.criteria:
            rows = [s.per_method[method]["criteria"][crit] for s in ok]
            crit_out[crit] = {
                "generalization": float(np.mean([r["generalization_error"] for r in rows]))
                if rows
                else float("nan"),
                "model_selection": float(np.mean([r["selected_true_model"] for r in rows]))
                if rows
                else float("nan"),
                "parameter_sq_error": float(np.mean([r["parameter_sq_error"] for r in rows]))
                if rows
                else float("nan"),
            }
        methods_out[method] = {
            "seq": float(np.mean([s.per_method[method]["seq_contains_truth"] for s in ok]))
            if ok
            else float("nan"),
            "separation_rate": float(
                np.mean([s.per_method[method]["separation_flag"] for s in ok])
            )
            if ok
            else float("nan"),
            "criteria": crit_out,
        }
    return CaseReport(
        config=config.to_dict(),
        m_trials=config.m_trials,
        failed_trials=len(failed),
        failed_trial_indices=failed,
        methods=methods_out,
    )


# ----------------------------------------------------------------------
# Export
# ----------------------------------------------------------------------


def path_export(path, out) -> None:
    """Write a path as CSV (step, lambda, active_size, one column per
    coefficient) plus a JSON metadata sidecar at <out>.meta.json.

    Values use 17 significant digits so coefficients survive the text round
    trip exactly.
    """
    out = Path(out)
    if isinstance(path, SolutionPath):
        lambdas = path.lambdas
        coefs = path.coefficients
        meta = {"type": "lars", "mode": path.mode, **path.meta}
    elif isinstance(path, L1Path):
        lambdas = path.lambdas
        coefs = path.coefficients
        meta = {
            "type": "l1",
            "converged": [bool(v) for v in path.converged],
            **path.meta,
        }
    else:
        raise TypeError(f"unsupported path type {type(path).__name__}")
    d = coefs.shape[1]
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "lambda", "active_size"] + [f"coef_{j}" for j in range(d)])
        for k in range(coefs.shape[0]):
            size = int(np.sum(coefs[k] != 0.0))
            row = [str(k), f"{lambdas[k]:.17g}", str(size)]
            row += [f"{v:.17g}" for v in coefs[k]]
            writer.writerow(row)
    sidecar = out.with_name(out.name + ".meta.json")
    sidecar.write_text(json.dumps(meta, sort_keys=True, indent=2), encoding="utf-8")


def load_path_csv(path):
    """Read back a path_export CSV; returns (steps, lambdas, active_sizes,
    coefficients, meta)."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    d = len(header) - 3
    steps = np.array([int(r[0]) for r in rows])
    lambdas = np.array([float(r[1]) for r in rows])
    sizes = np.array([int(r[2]) for r in rows])
    coefs = np.array([[float(v) for v in r[3:]] for r in rows]).reshape(len(rows), d)
    sidecar = path.with_name(path.name + ".meta.json")
    meta = json.loads(sidecar.read_text(encoding="utf-8")) if sidecar.exists() else {}
    return steps, lambdas, sizes, coefs, meta

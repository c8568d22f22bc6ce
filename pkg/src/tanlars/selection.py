"""Information-criterion selection over a path of estimates.

Four criterion variants are supported, differing in the penalty (AIC adds
2 d', BIC adds d' log n, d' = number of fitted parameters) and in where the
log-likelihood is evaluated:

* aic1 / bic1 — at the maximum-likelihood refit on the candidate's support;
* aic2 / bic2 — at the path estimate itself.

Ties are broken toward the smaller support, then the earlier path index.
The gaussian log-likelihood omits the same data-only constant everywhere, so
criterion differences (and hence the minimizer) are unaffected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import DesignMatrix, ResponseVector
from .errors import Separation, TanlarsError
from .families import GlmFamily
from .l1 import L1Path
from .lars import SolutionPath
from .mle import MleOptions, fit_mle

_KIND_NAMES = {
    "aic1": ("aic", "refit_mle"),
    "aic2": ("aic", "path_estimate"),
    "bic1": ("bic", "refit_mle"),
    "bic2": ("bic", "path_estimate"),
}


@dataclass(frozen=True)
class CriterionKind:
    """One of the four criterion variants."""

    base: str  # "aic" | "bic"
    evaluate_at: str  # "refit_mle" | "path_estimate"

    def __post_init__(self):
        if self.base not in ("aic", "bic"):
            raise ValueError(f"base must be 'aic' or 'bic', got {self.base!r}")
        if self.evaluate_at not in ("refit_mle", "path_estimate"):
            raise ValueError(f"bad evaluate_at {self.evaluate_at!r}")

    @classmethod
    def from_name(cls, name: str) -> "CriterionKind":
        try:
            base, at = _KIND_NAMES[name.lower()]
        except KeyError:
            raise ValueError(f"unknown criterion {name!r}; choose from {sorted(_KIND_NAMES)}") from None
        return cls(base=base, evaluate_at=at)

    @property
    def name(self) -> str:
        return self.base + ("1" if self.evaluate_at == "refit_mle" else "2")


@dataclass
class SelectionResult:
    """Outcome of minimizing one criterion over a path."""

    kind: str
    chosen_index: int
    candidate_indices: list[int]
    criterion_values: np.ndarray
    d_prime: np.ndarray
    theta_selected: np.ndarray
    theta_refit: np.ndarray | None = None
    refit_intercept: float = 0.0
    failed_indices: list[int] | None = None

    @property
    def support(self) -> tuple[int, ...]:
        return active_set(self.theta_selected)

    @property
    def theta_for_metrics(self) -> np.ndarray:
        """The selected estimate: the refit for *1 variants, else the path estimate."""
        return self.theta_refit if self.theta_refit is not None else self.theta_selected


def active_set(theta: np.ndarray) -> tuple[int, ...]:
    """0-based indices of the exactly nonzero coefficients."""
    return tuple(int(j) for j in np.flatnonzero(np.asarray(theta) != 0.0))


def criterion_value(loglik: float, d_prime: int, n: int, base: str) -> float:
    """-2 loglik + 2 d' (aic) or -2 loglik + d' log n (bic)."""
    if base == "aic":
        return -2.0 * loglik + 2.0 * d_prime
    if base == "bic":
        return -2.0 * loglik + d_prime * math.log(n)
    raise ValueError(f"base must be 'aic' or 'bic', got {base!r}")


def _intercept_only(y: ResponseVector, family: GlmFamily) -> float:
    """Closed-form intercept-only MLE for the canonical links."""
    ybar = float(np.mean(y.values))
    if family.kind == "gaussian":
        return ybar
    if family.kind == "binomial":
        if ybar <= 0.0 or ybar >= 1.0:
            raise Separation("intercept-only MLE diverges (all-0 or all-1 response)")
        return math.log(ybar / (1.0 - ybar))
    if family.kind == "poisson":
        if ybar <= 0.0:
            raise Separation("intercept-only MLE diverges (all-zero response)")
        return math.log(ybar)
    raise ValueError(f"unknown family {family.kind!r}")


def _refit(X, y, family, support, opts, intercept):
    """MLE restricted to a support; returns (theta_full, b0, loglik)."""
    support = tuple(support)
    theta_full = np.zeros(X.d)
    if not support:
        b0 = _intercept_only(y, family) if intercept else 0.0
        loglik = family.log_likelihood(X, y, theta_full, offset=b0)
        return theta_full, b0, loglik
    xs = X.restrict(support)
    res = fit_mle(xs, y, family, opts=opts, intercept=intercept)
    theta_full[list(support)] = res.theta_hat
    loglik = family.log_likelihood(xs, y, res.theta_hat, offset=res.intercept)
    return theta_full, res.intercept, loglik


def refit_mle_on_support(
    X: DesignMatrix,
    y: ResponseVector,
    family: GlmFamily,
    support,
    mle_opts: MleOptions | None = None,
    intercept: bool = False,
) -> np.ndarray:
    """Full-length coefficient vector of the MLE with all off-support entries 0."""
    theta_full, _, _ = _refit(X, y, family, support, mle_opts, intercept)
    return theta_full


def _candidates(path):
    """(original_index, theta, intercept) triples for every path candidate."""
    if isinstance(path, SolutionPath):
        return [(k, bp.theta, 0.0) for k, bp in enumerate(path.breakpoints)]
    if isinstance(path, L1Path):
        b0s = path.intercepts if path.intercepts is not None else np.zeros(len(path))
        return [(i, path.coefficients[i], float(b0s[i])) for i in range(len(path))]
    raise TypeError(f"unsupported path type {type(path).__name__}")


def select_many(
    path,
    X: DesignMatrix,
    y: ResponseVector,
    family: GlmFamily,
    kinds,
    mle_opts: MleOptions | None = None,
    intercept: bool = False,
) -> dict[str, SelectionResult]:
    """Run several criteria over one path, sharing support refits.

    Candidates are the path breakpoints (lar/lasso paths) or the grid
    solutions (l1 paths); for the latter, runs of consecutive candidates
    with identical supports are collapsed to the best-scoring one so a dense
    grid does not multiply identical models.  A candidate whose refit fails
    is skipped and reported in ``failed_indices``.
    """
    kinds = [CriterionKind.from_name(k) if isinstance(k, str) else k for k in kinds]
    cands = _candidates(path)
    dedup = isinstance(path, L1Path)
    n = X.n
    supports = [active_set(theta) for _, theta, _ in cands]
    d_primes = [len(s) + (1 if intercept else 0) for s in supports]

    need_refit = any(k.evaluate_at == "refit_mle" for k in kinds)
    refit_cache: dict[tuple[int, ...], tuple] = {}
    refit_failures: set[tuple[int, ...]] = set()
    if need_refit:
        for s in supports:
            if s in refit_cache or s in refit_failures:
                continue
            try:
                refit_cache[s] = _refit(X, y, family, s, mle_opts, intercept)
            except TanlarsError:
                refit_failures.add(s)

    path_logliks = None
    if any(k.evaluate_at == "path_estimate" for k in kinds):
        path_logliks = [
            family.log_likelihood(X, y, theta, offset=b0) for _, theta, b0 in cands
        ]

    out = {}
    for kind in kinds:
        values = np.empty(len(cands))
        failed = []
        for i, (orig, theta, b0) in enumerate(cands):
            s = supports[i]
            if kind.evaluate_at == "refit_mle":
                if s in refit_failures:
                    values[i] = np.inf
                    failed.append(orig)
                    continue
                loglik = refit_cache[s][2]
            else:
                loglik = path_logliks[i]
            values[i] = criterion_value(loglik, d_primes[i], n, kind.base)

        order = range(len(cands))
        if dedup:
            reps = []
            for i in order:
                if reps and supports[reps[-1]] == supports[i]:
                    if (values[i], d_primes[i]) < (values[reps[-1]], d_primes[reps[-1]]):
                        reps[-1] = i
                else:
                    reps.append(i)
            order = reps

        best = None
        for i in order:
            key = (values[i], d_primes[i], cands[i][0])
            if best is None or key < best[0]:
                best = (key, i)
        if best is None or not np.isfinite(best[0][0]):
            raise TanlarsError("no usable candidate on the path (all refits failed)")
        i_best = best[1]
        orig_best, theta_best, _ = cands[i_best]
        theta_refit, b0_refit = None, 0.0
        if kind.evaluate_at == "refit_mle":
            rf = refit_cache[supports[i_best]]
            theta_refit, b0_refit = rf[0], rf[1]
        out[kind.name] = SelectionResult(
            kind=kind.name,
            chosen_index=orig_best,
            candidate_indices=[cands[i][0] for i in order],
            criterion_values=values[list(order)],
            d_prime=np.array([d_primes[i] for i in order]),
            theta_selected=theta_best.copy(),
            theta_refit=theta_refit,
            refit_intercept=b0_refit,
            failed_indices=failed,
        )
    return out


def select(
    path,
    X: DesignMatrix,
    y: ResponseVector,
    family: GlmFamily,
    kind,
    mle_opts: MleOptions | None = None,
    intercept: bool = False,
) -> SelectionResult:
    """Minimize one criterion over the path's candidates."""
    kind = CriterionKind.from_name(kind) if isinstance(kind, str) else kind
    return select_many(path, X, y, family, [kind], mle_opts=mle_opts, intercept=intercept)[
        kind.name
    ]

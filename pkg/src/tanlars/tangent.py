"""The three path estimators that run LARS/LASSO on a likelihood surrogate.

All three replace the raw response by a surrogate living in the column space
of X, then run the classical path algorithm:

* ``tlars``   — LARS on y^ = X theta^_MLE (full-model maximum likelihood).
* ``tlasso1`` — lasso mode on the same y^; each breakpoint solves
  min ||y^ - X theta||^2 + lambda ||theta||_1 at lambda = 2 * max_corr.
* ``tlasso2`` — lasso mode on alpha * X theta~, where theta~ solves the
  normal equations and alpha = 1/h~(0); no likelihood maximization needed.

Because X'y^ = X'X theta^_MLE, the surrogate reproduces every correlation
the path algorithm consumes, and the breakpoint coefficient vectors are
themselves the model estimates (the identification with model parameters is
the identity on coordinates).  For the gaussian family theta^_MLE = theta~,
so tlars coincides with LARS on the raw response and both lasso variants
coincide with the classical lasso path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DesignMatrix, ResponseVector
from .families import GlmFamily
from .lars import SolutionPath, lars_path
from .mle import MleOptions, fit_mle, solve_theta_tilde


@dataclass(frozen=True)
class VirtualResponse:
    """A surrogate response X theta, guaranteed to lie in the span of X."""

    values: np.ndarray
    source: str  # "mle" or "alpha_theta_tilde"


def virtual_response(X: DesignMatrix, theta_hat: np.ndarray) -> VirtualResponse:
    """y^ = X theta_hat."""
    theta_hat = np.asarray(theta_hat, dtype=float)
    if not np.all(np.isfinite(theta_hat)):
        raise ValueError("theta_hat must be finite")
    return VirtualResponse(values=X.values @ theta_hat, source="mle")


def _meta(family: GlmFamily, method: str, mle_result=None) -> dict:
    meta = {"method": method, "family": family.kind, "separation": False, "ridge_used": 0.0}
    if mle_result is not None:
        meta["separation"] = bool(mle_result.separation_flag)
        meta["ridge_used"] = float(mle_result.ridge_used)
    return meta


def tlars(
    X: DesignMatrix,
    y: ResponseVector,
    family: GlmFamily,
    mle_opts: MleOptions | None = None,
    intercept: bool = False,
) -> SolutionPath:
    """LARS path on the virtual response of the full-model MLE.

    The terminal breakpoint equals theta^_MLE.  Propagates fit_mle errors;
    when the MLE needed the ridge fallback, the path's meta carries the
    separation flag.
    """
    res = fit_mle(X, y, family, opts=mle_opts, intercept=intercept)
    path = lars_path(X, virtual_response(X, res.theta_hat).values, mode="lar")
    path.meta.update(_meta(family, "tlars", res))
    return path


def tlasso1(
    X: DesignMatrix,
    y: ResponseVector,
    family: GlmFamily,
    mle_opts: MleOptions | None = None,
    intercept: bool = False,
) -> SolutionPath:
    """Lasso path on the virtual response of the full-model MLE."""
    res = fit_mle(X, y, family, opts=mle_opts, intercept=intercept)
    path = lars_path(X, virtual_response(X, res.theta_hat).values, mode="lasso")
    path.meta.update(_meta(family, "tlasso1", res))
    return path


def tlasso2(X: DesignMatrix, y: ResponseVector, family: GlmFamily) -> SolutionPath:
    """Lasso path on alpha * X theta~; needs no likelihood maximization.

    theta~ always exists (full-rank design), so this variant cannot fail on
    separable data.
    """
    family.check_response(y)
    tt = solve_theta_tilde(X, y)
    surrogate = family.alpha * (X.values @ tt.value)
    path = lars_path(X, surrogate, mode="lasso")
    path.meta.update(_meta(family, "tlasso2"))
    return path

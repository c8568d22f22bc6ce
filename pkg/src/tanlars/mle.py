"""Full-model maximum likelihood and the quadratic likelihood surrogate.

``fit_mle`` runs damped Newton (IRLS) with a step-halving line search.
Canonical-link likelihoods are concave, so any accepted ascent step is safe.
Logistic regression on separable data has no finite optimum; the solver
detects the blow-up (coefficient cap) and either fails loudly or restarts
with a small ridge penalty, flagging the result.

``solve_theta_tilde`` computes the least-squares coefficient vector
theta~ with X'X theta~ = X'y, and ``quadratic_loglik`` evaluates the
second-order expansion of the log-likelihood around the origin,

    q(theta) = -(1/2a)(theta - a theta~)' X'X (theta - a theta~)
               + (a/2) theta~' X'X theta~ - psi(0),

with a = alpha = 1/h~(0).  q agrees with the exact log-likelihood up to a
cubic remainder (exactly, for the gaussian family), and its maximizer
a*theta~ approximates the MLE near the origin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .data import DesignMatrix, ResponseVector
from .errors import NotConverged, Separation
from .families import GlmFamily

#: coefficient magnitude treated as evidence of a diverging MLE
SEPARATION_CAP = 1e3


@dataclass(frozen=True)
class MleOptions:
    """Solver controls for fit_mle."""

    max_iter: int = 100
    grad_tol: float = 1e-8
    #: fallback ridge applied only after separation is detected; 0 disables
    ridge: float = 0.0


@dataclass(frozen=True)
class MleResult:
    theta_hat: np.ndarray
    iterations: int
    final_gradient_norm: float
    converged: bool
    separation_flag: bool
    ridge_used: float
    intercept: float = 0.0


@dataclass(frozen=True)
class ThetaTilde:
    """Least-squares solution of X'X theta = X'y."""

    value: np.ndarray


class _SeparationDetected(Exception):
    """Internal: ridge-free Newton hit the coefficient cap."""


def solve_theta_tilde(X: DesignMatrix, y) -> ThetaTilde:
    """Solve the normal equations X'X theta = X'y by Cholesky factorization."""
    yv = y.values if isinstance(y, ResponseVector) else np.asarray(y, dtype=float)
    xty = X.values.T @ yv
    cf = scipy.linalg.cho_factor(X.gram.values)
    theta = scipy.linalg.cho_solve(cf, xty)
    resid = X.gram.values @ theta - xty
    if np.linalg.norm(resid) > 1e-8 * max(1.0, np.linalg.norm(xty)):
        raise NotConverged("normal-equations residual unexpectedly large")
    return ThetaTilde(value=theta)


def _penalized_loglik(family, A, yv, beta, ridge, mask):
    eta = A @ beta
    ll = float(yv @ eta - np.sum(family._potential_terms(eta)))
    if ridge > 0:
        ll -= ridge * float(np.sum((mask * beta) ** 2))
    return ll


def _newton(family, A, yv, ridge, mask, max_iter, grad_tol, cap):
    """Damped Newton on the (optionally ridge-penalized) log-likelihood.

    A is the working design (possibly with a leading intercept column);
    mask marks the penalized coordinates; cap, when not None, triggers
    _SeparationDetected once any coordinate exceeds it in magnitude.
    """
    p = A.shape[1]
    beta = np.zeros(p)
    ll = _penalized_loglik(family, A, yv, beta, ridge, mask)
    for it in range(1, max_iter + 1):
        eta = A @ beta
        mu = family.inverse_link(eta)
        grad = A.T @ (yv - mu)
        if ridge > 0:
            grad = grad - 2.0 * ridge * (mask * beta)
        gnorm = float(np.max(np.abs(grad)))
        if gnorm < grad_tol:
            return beta, it - 1, gnorm
        w = family.inverse_link_derivative(eta)
        hess = (A * w[:, None]).T @ A
        if ridge > 0:
            hess = hess + 2.0 * ridge * np.diag(mask)
        try:
            delta = scipy.linalg.cho_solve(scipy.linalg.cho_factor(hess), grad)
        except scipy.linalg.LinAlgError:
            # Weights underflow only when coefficients diverge; treat a
            # failed factorization like the coefficient cap tripping.
            raise _SeparationDetected from None
        step = 1.0
        for _ in range(60):
            cand = beta + step * delta
            cand_ll = _penalized_loglik(family, A, yv, cand, ridge, mask)
            if cand_ll >= ll:
                break
            step *= 0.5
        else:
            raise NotConverged(
                f"line search failed at iteration {it} (gradient norm {gnorm:.3e})"
            )
        beta, ll = cand, cand_ll
        if cap is not None and np.max(np.abs(beta)) > cap:
            raise _SeparationDetected
    eta = A @ beta
    grad = A.T @ (yv - family.inverse_link(eta))
    if ridge > 0:
        grad = grad - 2.0 * ridge * (mask * beta)
    gnorm = float(np.max(np.abs(grad)))
    if gnorm < grad_tol:
        return beta, max_iter, gnorm
    raise NotConverged(f"no convergence in {max_iter} iterations (gradient norm {gnorm:.3e})")


def fit_mle(
    X: DesignMatrix,
    y: ResponseVector,
    family: GlmFamily,
    opts: MleOptions | None = None,
    intercept: bool = False,
) -> MleResult:
    """Maximum-likelihood fit of the full model.

    The gaussian family reduces to the normal equations and is solved in
    closed form.  Otherwise damped Newton iterates until the gradient
    X'(y - mu) drops below ``opts.grad_tol`` in max norm.

    Raises
    ------
    NotConverged
        Iteration budget exhausted without separation.
    Separation
        Coefficients diverged and no fallback ridge was configured.
    """
    opts = opts or MleOptions()
    family.check_response(y)
    yv = y.values
    if family.kind == "gaussian" and not intercept:
        theta = solve_theta_tilde(X, y).value
        gnorm = float(np.max(np.abs(X.values.T @ (yv - X.values @ theta))))
        return MleResult(
            theta_hat=theta,
            iterations=0,
            final_gradient_norm=gnorm,
            converged=gnorm < opts.grad_tol,
            separation_flag=False,
            ridge_used=0.0,
        )
    if intercept:
        A = np.hstack([np.ones((X.n, 1)), X.values])
        mask = np.ones(X.d + 1)
        mask[0] = 0.0  # intercept never penalized
    else:
        A = X.values
        mask = np.ones(X.d)
    try:
        beta, iters, gnorm = _newton(
            family, A, yv, 0.0, mask, opts.max_iter, opts.grad_tol, SEPARATION_CAP
        )
        sep, ridge_used = False, 0.0
    except _SeparationDetected:
        if opts.ridge <= 0:
            raise Separation(
                "MLE diverged (coefficient cap exceeded); "
                "set a positive ridge to stabilize"
            ) from None
        beta, iters, gnorm = _newton(
            family, A, yv, opts.ridge, mask, opts.max_iter, opts.grad_tol, None
        )
        sep, ridge_used = True, opts.ridge
    if intercept:
        b0, theta = float(beta[0]), beta[1:]
    else:
        b0, theta = 0.0, beta
    return MleResult(
        theta_hat=theta,
        iterations=iters,
        final_gradient_norm=gnorm,
        converged=True,
        separation_flag=sep,
        ridge_used=ridge_used,
        intercept=b0,
    )


def quadratic_loglik(
    X: DesignMatrix, family: GlmFamily, theta_tilde: ThetaTilde, theta: np.ndarray
) -> float:
    """Second-order expansion of the log-likelihood around the origin.

    Exact for the gaussian family; cubic remainder otherwise.
    """
    theta = np.asarray(theta, dtype=float)
    alpha = family.alpha
    tt = theta_tilde.value
    diff = theta - alpha * tt
    g = X.gram.values
    quad = -float(diff @ (g @ diff)) / (2.0 * alpha)
    const = 0.5 * alpha * float(tt @ (g @ tt)) - family.potential(X, np.zeros(X.d))
    return quad + const

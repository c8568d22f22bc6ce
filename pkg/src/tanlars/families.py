"""Canonical-link exponential-family descriptors.

Each family bundles the inverse link h^-1, its derivative h~ = (h^-1)', the
curvature constant alpha = 1/h~(0), the potential (log-partition) function
psi, and the log-likelihood l(theta) = y'X theta - psi(theta).  Only the
canonical links are supported: identity (gaussian), logit (binomial), log
(poisson).
"""

from __future__ import annotations

import numpy as np

from .data import DesignMatrix, ResponseVector
from .errors import DomainError

# Linear predictors are clipped here before exponentiation; 710 overflows a
# double, so this only affects pathological inputs.
ETA_CLAMP = 700.0


class GlmFamily:
    """Base class; concrete families override the scalar maps."""

    kind: str = ""
    #: response-domain tag required by the family; None accepts any domain
    domain: str | None = None
    #: 1 / h~(0), exact for each family
    alpha: float = 1.0

    def inverse_link(self, eta):
        raise NotImplementedError

    def inverse_link_derivative(self, eta):
        raise NotImplementedError

    def _potential_terms(self, eta):
        """Per-sample contributions to psi at linear predictor eta."""
        raise NotImplementedError

    # ------------------------------------------------------------------
    # Vector operations on a design matrix
    # ------------------------------------------------------------------

    def check_response(self, y: ResponseVector) -> None:
        if self.domain is not None and y.family_domain != self.domain:
            raise DomainError(
                f"{self.kind} family requires a {self.domain} response, "
                f"got {y.family_domain}"
            )

    def mean_response(self, X: DesignMatrix, theta: np.ndarray, offset: float = 0.0) -> np.ndarray:
        """mu(theta) = h^-1(X theta), componentwise."""
        eta = X.values @ np.asarray(theta, dtype=float) + offset
        return self.inverse_link(eta)

    def potential(self, X: DesignMatrix, theta: np.ndarray) -> float:
        """psi(theta); its gradient is X' mu(theta)."""
        eta = X.values @ np.asarray(theta, dtype=float)
        return float(np.sum(self._potential_terms(eta)))

    def log_likelihood(self, X: DesignMatrix, y, theta: np.ndarray, offset: float = 0.0) -> float:
        """l(theta) = y'X theta - psi(theta).

        For the gaussian family this omits the data-only constant
        -y'y/2 - (n/2) log 2pi, so only differences in theta are meaningful.
        ``offset`` shifts every linear predictor (used by the optional
        unpenalized-intercept extension).
        """
        yv = y.values if isinstance(y, ResponseVector) else np.asarray(y, dtype=float)
        theta = np.asarray(theta, dtype=float)
        eta = X.values @ theta + offset
        return float(yv @ eta - np.sum(self._potential_terms(eta)))

    def fisher_metric(self, X: DesignMatrix, theta: np.ndarray) -> np.ndarray:
        """G(theta) = X' diag(h~(X theta)) X, the Hessian of psi.

        At theta = 0 this equals h~(0) X'X.
        """
        eta = X.values @ np.asarray(theta, dtype=float)
        w = self.inverse_link_derivative(eta)
        return (X.values * w[:, None]).T @ X.values


class GaussianFamily(GlmFamily):
    kind = "gaussian"
    domain = None  # identity link accepts any real response
    alpha = 1.0

    def inverse_link(self, eta):
        return np.asarray(eta, dtype=float)

    def inverse_link_derivative(self, eta):
        return np.ones_like(np.asarray(eta, dtype=float))

    def _potential_terms(self, eta):
        return 0.5 * np.square(eta)


class BinomialFamily(GlmFamily):
    kind = "binomial"
    domain = "binary01"
    alpha = 4.0

    def inverse_link(self, eta):
        # exp(+-700) stays finite, so the clamp makes the plain form safe
        eta = np.clip(np.asarray(eta, dtype=float), -ETA_CLAMP, ETA_CLAMP)
        return 1.0 / (1.0 + np.exp(-eta))

    def inverse_link_derivative(self, eta):
        p = self.inverse_link(eta)
        return p * (1.0 - p)

    def _potential_terms(self, eta):
        # log(1 + exp(eta)) without overflow
        eta = np.clip(np.asarray(eta, dtype=float), -ETA_CLAMP, ETA_CLAMP)
        return np.logaddexp(0.0, eta)


class PoissonFamily(GlmFamily):
    kind = "poisson"
    domain = "nonneg_integer"
    alpha = 1.0

    def inverse_link(self, eta):
        return np.exp(np.clip(eta, -ETA_CLAMP, ETA_CLAMP))

    def inverse_link_derivative(self, eta):
        return self.inverse_link(eta)

    def _potential_terms(self, eta):
        return self.inverse_link(eta)


GAUSSIAN = GaussianFamily()
BINOMIAL = BinomialFamily()
POISSON = PoissonFamily()

_FAMILIES = {f.kind: f for f in (GAUSSIAN, BINOMIAL, POISSON)}


def get_family(kind: str) -> GlmFamily:
    """Look a family up by name ('gaussian', 'binomial', 'poisson')."""
    try:
        return _FAMILIES[kind]
    except KeyError:
        raise ValueError(f"unknown family {kind!r}; choose from {sorted(_FAMILIES)}") from None

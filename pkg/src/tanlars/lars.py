"""Least-angle regression path engine, in plain ("lar") and lasso modes.

The algorithm tracks correlations c = X'(response - X theta).  At each
vertex the active set holds every index whose |correlation| ties the maximum
C; the coefficient vector then moves along the equiangular direction of the
signed active columns until either an inactive index catches up (it enters)
or, in lasso mode, an active coefficient crosses zero (it drops).  With a
full-rank design both modes terminate at the least-squares solution, where
all correlations vanish.

A breakpoint stores a self-consistent snapshot of one path vertex: the
coefficient vector theta_k, the correlations evaluated *at* theta_k, and the
data of the outgoing move (active set, signs, equiangular normalization A,
weights w, direction correlations a, step length gamma).  The terminal
vertex has no outgoing move, so those fields are None there.  Under this
convention the maximum correlation is strictly decreasing along the
breakpoint sequence and every lasso-mode vertex satisfies the stationarity
conditions of

    min ||response - X theta||^2 + lambda ||theta||_1

at lambda = 2 * max_corr, which is why paths are parameterized by that
implied lambda.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .data import DesignMatrix
from .errors import NumericalBreakdown

#: relative tolerance deciding that several correlations tie for the maximum
TIE_TOL = 1e-12
#: candidates below this (scaled) threshold do not count as positive steps
STEP_TOL = 1e-12


@dataclass(frozen=True)
class LarsState:
    """One path vertex; move-related fields describe the outgoing segment."""

    k: int
    theta: np.ndarray
    active: tuple[int, ...]
    signs: np.ndarray
    residual_corr: np.ndarray
    max_corr: float
    A: float | None = None
    w: np.ndarray | None = None
    a: np.ndarray | None = None
    gamma: float | None = None


@dataclass
class SolutionPath:
    """Ordered breakpoints of a lar/lasso path, from theta = 0 to least squares."""

    breakpoints: list[LarsState]
    mode: str
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.breakpoints)

    @property
    def terminal_theta(self) -> np.ndarray:
        return self.breakpoints[-1].theta

    @property
    def lambdas(self) -> np.ndarray:
        """Implied penalty level 2 * max_corr at each breakpoint."""
        return np.array([2.0 * bp.max_corr for bp in self.breakpoints])

    @property
    def coefficients(self) -> np.ndarray:
        """Breakpoint coefficients stacked into a (num_breakpoints, d) array."""
        return np.vstack([bp.theta for bp in self.breakpoints])

    def interpolate(self, lam: float) -> np.ndarray:
        """Coefficients at an arbitrary penalty level.

        Coefficients are piecewise linear in the path parameter, hence in the
        implied lambda; values above the first breakpoint's lambda clamp to
        zero, values below the terminal lambda clamp to the terminal estimate.
        """
        lams = self.lambdas
        if lam >= lams[0]:
            return self.breakpoints[0].theta.copy()
        for k in range(len(lams) - 1):
            lo, hi = lams[k + 1], lams[k]
            if lam >= lo:
                t = 0.0 if hi == lo else (hi - lam) / (hi - lo)
                return (1 - t) * self.breakpoints[k].theta + t * self.breakpoints[k + 1].theta
        return self.terminal_theta.copy()


def equiangular(g_active: np.ndarray, ones: np.ndarray | None = None):
    """Normalization A and weights w of the equiangular direction.

    Given the sign-adjusted active Gram matrix G, the direction
    u = sum_i s_i w_i x_i satisfies x_i' u = A for every signed active column
    and has unit norm; A = (1' G^-1 1)^{-1/2} and w = A G^-1 1.
    """
    m = g_active.shape[0]
    if ones is None:
        ones = np.ones(m)
    try:
        cf = scipy.linalg.cho_factor(g_active)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalBreakdown("active Gram factorization failed") from exc
    sol = scipy.linalg.cho_solve(cf, ones)
    s = float(ones @ sol)
    if s <= 0:
        raise NumericalBreakdown("active Gram matrix is not positive definite")
    big_a = 1.0 / np.sqrt(s)
    return big_a, big_a * sol


def step_length(C: float, A: float, c: np.ndarray, a: np.ndarray, inactive):
    """Smallest positive step at which an inactive correlation ties the max.

    Candidates for each inactive j are (C - c_j)/(A - a_j) and
    (C + c_j)/(A + a_j); nonpositive values are excluded.  With no inactive
    indices the step is C/A, which drives every correlation to zero.

    Returns
    -------
    (gamma, entering)
        The step length and the list of inactive indices attaining it
        (within 1e-12); entering is empty on the terminal step.
    """
    inactive = list(inactive)
    if not inactive:
        return C / A, []
    tiny = STEP_TOL * max(1.0, C / A)
    best = C / A
    cand_by_j = {}
    for j in inactive:
        cands = []
        for num, den in ((C - c[j], A - a[j]), (C + c[j], A + a[j])):
            if den != 0.0:
                val = num / den
                if val > tiny:
                    cands.append(val)
        if cands:
            val = min(cands)
            cand_by_j[j] = val
            if val < best:
                best = val
    entering = [j for j, val in cand_by_j.items() if val <= best + STEP_TOL]
    return best, sorted(entering)


def lasso_drop(theta_active: np.ndarray, direction: np.ndarray):
    """First positive zero crossing of the active coefficients, if any.

    Along the segment theta_i(gamma) = theta_i + gamma * direction_i, a
    coefficient moving toward zero crosses it at gamma~_i = -theta_i /
    direction_i.  Returns (gamma~, positions) for the earliest crossing
    (positions index into the active vector, ties within 1e-12 grouped), or
    None when no coefficient heads through zero.
    """
    gammas = []
    for pos, (t, dr) in enumerate(zip(theta_active, direction)):
        if dr != 0.0:
            g = -t / dr
            if g > 0.0:
                gammas.append((g, pos))
    if not gammas:
        return None
    g_min = min(g for g, _ in gammas)
    positions = [pos for g, pos in gammas if g <= g_min + STEP_TOL]
    return g_min, positions


def lars_path(X: DesignMatrix, response, mode: str = "lar") -> SolutionPath:
    """Compute the full lar or lasso path for (X, response).

    Parameters
    ----------
    X : DesignMatrix
        Normalized design.
    response : ndarray of shape (n,)
        Any finite response vector (real responses, virtual responses, ...).
    mode : {"lar", "lasso"}
        Plain least-angle steps, or the lasso modification that removes an
        active index the moment its coefficient reaches zero.

    Raises
    ------
    NumericalBreakdown
        If an active factorization fails or the path fails to terminate,
        both signs of near-collinearity slipping past the rank check.
    """
    if mode not in ("lar", "lasso"):
        raise ValueError(f"mode must be 'lar' or 'lasso', got {mode!r}")
    response = np.asarray(response, dtype=float)
    if response.shape != (X.n,):
        raise ValueError(f"response must have shape ({X.n},)")
    if not np.all(np.isfinite(response)):
        raise ValueError("response must be finite")
    d = X.d
    g = X.gram.values
    xty = X.values.T @ response

    theta = np.zeros(d)
    c = xty.copy()
    C = float(np.max(np.abs(c)))
    if C <= 1e-14 * (1.0 + np.linalg.norm(response)):
        state = LarsState(0, theta, (), np.array([]), c, C)
        return SolutionPath(breakpoints=[state], mode=mode)

    active = [int(j) for j in np.flatnonzero(np.abs(c) >= C - TIE_TOL * (1.0 + C))]
    signs = [1.0 if c[j] >= 0 else -1.0 for j in active]
    states: list[LarsState] = []
    k = 0
    max_steps = 8 * d + 16
    while True:
        if k > max_steps:
            raise NumericalBreakdown("path failed to terminate (near-collinear design?)")
        idx = np.array(active)
        sgn = np.array(signs)
        g_active = g[np.ix_(idx, idx)] * np.outer(sgn, sgn)
        A, w = equiangular(g_active)
        sw = sgn * w  # coefficient-space velocity on the active coordinates
        a = g[:, idx] @ sw
        inactive = [j for j in range(d) if j not in set(active)]
        gamma_hat, entering = step_length(C, A, c, a, inactive)
        drop = lasso_drop(theta[idx], sw) if mode == "lasso" else None
        if drop is not None and drop[0] < gamma_hat:
            gamma, drop_positions = drop[0], drop[1]
            entering = []
        else:
            gamma, drop_positions = gamma_hat, None
        states.append(
            LarsState(k, theta.copy(), tuple(active), sgn, c.copy(), C, A, w, a, gamma)
        )
        theta = theta.copy()
        theta[idx] += gamma * sw
        if drop_positions is not None:
            for pos in drop_positions:
                theta[active[pos]] = 0.0
        c = xty - g @ theta
        C = float(np.max(np.abs(c)))
        terminal_move = not inactive and drop_positions is None
        if drop_positions is not None:
            for pos in sorted(drop_positions, reverse=True):
                del active[pos]
                del signs[pos]
        else:
            for j in entering:
                active.append(j)
                signs.append(1.0 if c[j] >= 0 else -1.0)
        k += 1
        if terminal_move:
            break
    states.append(LarsState(k, theta, tuple(active), np.array(signs), c, C))
    return SolutionPath(breakpoints=states, mode=mode)

"""Dataset representation: normalized design matrices, responses, CSV ingestion.

Every estimator in the library assumes the design matrix has centered,
unit-l2-norm, linearly independent columns.  ``DesignMatrix`` enforces those
invariants at construction time and remembers the affine transform
(per-column centers and scales) so fitted coefficients can be reported on the
original scale of the data.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import DomainError, ParseError, RankDeficient, ZeroVarianceColumn

# Relative threshold on the smallest singular value used as the numeric proxy
# for "columns linearly independent".
RANK_TOL = 1e-10

#: Valid response-domain tags.
FAMILY_DOMAINS = ("real", "binary01", "nonneg_integer")


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric positive-definite correlation matrix X'X of a normalized design."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"Gram matrix must be square, got shape {v.shape}")
        if np.max(np.abs(v - v.T)) > 1e-12:
            raise ValueError("Gram matrix is not symmetric within 1e-12")
        if np.max(np.abs(np.diag(v) - 1.0)) > 1e-10:
            raise ValueError("Gram matrix diagonal deviates from 1 (columns not unit norm?)")
        try:
            scipy.linalg.cholesky(v, lower=True)
        except scipy.linalg.LinAlgError as exc:
            raise ValueError("Gram matrix is not positive definite") from exc

    @property
    def d(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class DesignMatrix:
    """An n x d design matrix with centered, unit-norm, full-rank columns.

    Attributes
    ----------
    values : ndarray of shape (n, d)
        The normalized matrix itself.
    centers : ndarray of shape (d,)
        Column means of the raw data that were subtracted.
    scales : ndarray of shape (d,)
        l2 norms of the centered raw columns that were divided out.
    column_names : tuple of str, optional
        Labels for the d predictors.
    """

    values: np.ndarray
    centers: np.ndarray
    scales: np.ndarray
    column_names: tuple[str, ...] | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        c = np.asarray(self.centers, dtype=float)
        s = np.asarray(self.scales, dtype=float)
        if v.ndim != 2:
            raise ValueError("design matrix must be 2-dimensional")
        n, d = v.shape
        if n < 2 or d < 1:
            raise ValueError(f"need n >= 2 and d >= 1, got n={n}, d={d}")
        if c.shape != (d,) or s.shape != (d,):
            raise ValueError("centers/scales must have length d")
        if np.any(s <= 0):
            raise ValueError("scales must be positive")
        if self.column_names is not None and len(self.column_names) != d:
            raise ValueError("column_names must have length d")
        col_sums = v.sum(axis=0)
        if np.max(np.abs(col_sums)) > 1e-10 * n:
            raise ValueError("columns are not centered within tolerance")
        norms = np.linalg.norm(v, axis=0)
        if np.max(np.abs(norms - 1.0)) > 1e-10:
            raise ValueError("columns do not have unit l2 norm within tolerance")
        sv = scipy.linalg.svdvals(v)
        if sv[-1] <= RANK_TOL * sv[0]:
            raise RankDeficient(
                f"smallest singular value {sv[-1]:.3e} below rank threshold "
                f"({RANK_TOL:.0e} relative)"
            )
        for arr in (v, c, s):
            arr.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "scales", s)
        if self.column_names is not None:
            object.__setattr__(self, "column_names", tuple(self.column_names))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @cached_property
    def gram(self) -> GramMatrix:
        """Cached X'X (the correlation matrix, columns being normalized)."""
        g = self.values.T @ self.values
        # Enforce exact symmetry so downstream Cholesky solves are stable.
        return GramMatrix(0.5 * (g + g.T))

    def restrict(self, indices) -> "DesignMatrix":
        """A DesignMatrix holding the given column subset (already normalized)."""
        idx = list(indices)
        if not idx:
            raise ValueError("cannot restrict to an empty column set")
        names = None
        if self.column_names is not None:
            names = tuple(self.column_names[i] for i in idx)
        return DesignMatrix(
            values=self.values[:, idx].copy(),
            centers=self.centers[idx].copy(),
            scales=self.scales[idx].copy(),
            column_names=names,
        )

    def original_scale_coefficients(self, theta: np.ndarray) -> tuple[np.ndarray, float]:
        """Map normalized-scale coefficients to the raw-data scale.

        Returns ``(slopes, offset)`` such that for a raw predictor row x,
        ``slopes @ x + offset`` equals ``theta @ x_normalized``.
        """
        theta = np.asarray(theta, dtype=float)
        slopes = theta / self.scales
        offset = -float(np.dot(self.centers, slopes))
        return slopes, offset


@dataclass(frozen=True)
class ResponseVector:
    """A length-n response with a domain tag checked at construction."""

    values: np.ndarray
    family_domain: str = "real"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("response must be 1-dimensional")
        if not np.all(np.isfinite(v)):
            raise DomainError("response contains non-finite entries")
        if self.family_domain not in FAMILY_DOMAINS:
            raise ValueError(f"unknown family_domain {self.family_domain!r}")
        if self.family_domain == "binary01":
            if not np.all((v == 0.0) | (v == 1.0)):
                raise DomainError("binary01 response must contain only 0 and 1")
        elif self.family_domain == "nonneg_integer":
            if np.any(v < 0) or np.any(v != np.round(v)):
                raise DomainError("nonneg_integer response must be nonnegative integers")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def normalize_design(raw: np.ndarray, labels=None) -> DesignMatrix:
    """Center each column and scale it to unit l2 norm.

    Parameters
    ----------
    raw : ndarray of shape (n, d)
        Raw predictor matrix.
    labels : sequence of str, optional
        Column names carried through to the result.

    Raises
    ------
    ZeroVarianceColumn
        If any column is constant.
    RankDeficient
        If the normalized matrix has rank < d.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 2:
        raise ValueError("raw design must be 2-dimensional")
    n, d = raw.shape
    if n < 2:
        raise ValueError("need at least two rows")
    centers = raw.mean(axis=0)
    centered = raw - centers
    scales = np.linalg.norm(centered, axis=0)
    raw_norms = np.linalg.norm(raw, axis=0)
    dead = scales <= 1e-12 * np.maximum(1.0, raw_norms)
    if np.any(dead):
        bad = int(np.flatnonzero(dead)[0])
        raise ZeroVarianceColumn(f"column {bad} is constant")
    values = centered / scales
    names = tuple(labels) if labels is not None else None
    return DesignMatrix(values=values, centers=centers, scales=scales, column_names=names)


def gram(X: DesignMatrix) -> GramMatrix:
    """The (cached) correlation matrix X'X of a normalized design."""
    return X.gram


def load_dataset(path, response_column, family_domain: str = "real"):
    """Read a CSV file into a normalized design and a response vector.

    Parameters
    ----------
    path : path-like
        CSV file with one header row; every cell numeric.
    response_column : str or int
        Header name or 0-based column index of the response.
    family_domain : {"real", "binary01", "nonneg_integer"}
        Domain tag the response must satisfy.

    Returns
    -------
    (DesignMatrix, ResponseVector)
        Predictor columns normalized in file order; row order preserved.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ParseError(f"{path}: empty file") from None
            rows = list(reader)
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    header = [h.strip() for h in header]
    if isinstance(response_column, int):
        resp_idx = response_column
        if not 0 <= resp_idx < len(header):
            raise ParseError(f"response index {resp_idx} out of range")
    else:
        try:
            resp_idx = header.index(response_column)
        except ValueError:
            raise ParseError(f"response column {response_column!r} not in header {header}") from None
    data = np.empty((len(rows), len(header)), dtype=float)
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise ParseError(f"row {i + 2}: expected {len(header)} cells, got {len(row)}")
        for j, cell in enumerate(row):
            try:
                data[i, j] = float(cell)
            except ValueError:
                raise ParseError(f"row {i + 2}, column {header[j]!r}: non-numeric cell {cell!r}") from None
    y = ResponseVector(data[:, resp_idx], family_domain=family_domain)
    pred_idx = [j for j in range(len(header)) if j != resp_idx]
    if not pred_idx:
        raise ParseError("no predictor columns besides the response")
    labels = [header[j] for j in pred_idx]
    X = normalize_design(data[:, pred_idx], labels=labels)
    return X, y


def write_dataset_csv(X: DesignMatrix, y: ResponseVector, path, response_name: str = "y") -> None:
    """Write (X, y) as a CSV that round-trips through load_dataset.

    Values are formatted with 17 significant digits, so IEEE-754 doubles
    survive the text round trip exactly.
    """
    names = X.column_names or tuple(f"x{j}" for j in range(X.d))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(names) + [response_name])
        for i in range(X.n):
            row = [f"{v:.17g}" for v in X.values[i]]
            row.append(f"{y.values[i]:.17g}")
            writer.writerow(row)

"""Complex-valued general linear model with permutation inference.

The model is ``X = D @ theta + E`` fitted by least squares through the
pseudoinverse of the encoded design.  Effect matrices are reconstructed
per term from that term's coding columns, sums of squares are the real
traces ``Tr(A A^H)``, and the F-ratio for a term is its mean square over
the residual mean square.  Significance comes from permuting whole rows of
the response against the fixed design and counting permuted F-ratios at or
above the nominal one:

    ``p = (#{F_perm >= F_nominal} + 1) / (n_perms + 1)``

Ties within 1e-12 relative count toward the numerator.  When the requested
permutation count covers all ``n! - 1`` non-identity permutations, the
engine enumerates them exactly instead of sampling.

Missing values in peak tables are handled by permutational cell-mean
replacement: every missing entry is imputed with the mean of the observed
entries that currently share its design cell, and the imputation is redone
inside every permutation iteration because the mask travels with the data
rows while the design stays fixed.
"""

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .design import MEAN_TERM, permute_rows
from .errors import (
    DimensionMismatch,
    EmptyCellWarning,
    RankWarning,
    UnknownTerm,
    ZeroResidual,
)
from .linalg import as_complex_matrix, numerical_rank, pinv, ssq

__all__ = [
    "GlmDecomposition",
    "AnovaRow",
    "AnovaTable",
    "MissingMask",
    "fit",
    "f_ratio",
    "permutation_test",
    "pcmr_permutation_test",
    "impute_cell_means",
    "zeros_to_missing",
]

# relative window within which two F values count as tied
F_TIE_REL = 1e-12


@dataclass(frozen=True)
class GlmDecomposition:
    """Fitted model: coefficients, per-term effect matrices and residuals."""

    theta_hat: np.ndarray
    effects: dict
    residuals: np.ndarray
    dof: dict
    residual_dof: int
    grand_mean_row: np.ndarray

    def effect(self, term):
        try:
            return self.effects[term]
        except KeyError:
            raise UnknownTerm(f"no term '{term}' in this fit") from None


def fit(x, dmatrix):
    """Least-squares fit of ``x`` (N x M) against an encoded design.

    Returns a GlmDecomposition whose parts satisfy the exact identity
    ``ones*mu + sum(effects) + residuals == x``.
    """
    x = as_complex_matrix(x)
    d = dmatrix.matrix
    if x.shape[0] != d.shape[0]:
        raise DimensionMismatch(
            f"data has {x.shape[0]} rows but the design encodes {d.shape[0]} samples"
        )
    rank = numerical_rank(d)
    if rank < d.shape[1]:
        warnings.warn(
            "design matrix is column-rank deficient; fitting by pseudoinverse",
            RankWarning,
            stacklevel=2,
        )
    theta = pinv(d) @ x
    effects = {}
    for term in dmatrix.terms:
        span = dmatrix.column_spans[term]
        effects[term] = d[:, span] @ theta[span]
    residuals = x - d @ theta
    return GlmDecomposition(
        theta_hat=theta,
        effects=effects,
        residuals=residuals,
        dof={t: dmatrix.dof[t] for t in dmatrix.terms},
        residual_dof=x.shape[0] - rank,
        grand_mean_row=theta[dmatrix.column_spans[MEAN_TERM]].copy(),
    )


def f_ratio(decomp, term):
    """F-ratio of one term: (effect ssq / nu1) / (residual ssq / nu2)."""
    effect = decomp.effect(term)
    res_ssq = ssq(decomp.residuals)
    if res_ssq == 0.0:
        raise ZeroResidual("residual sum of squares is zero (saturated model)")
    nu1 = decomp.dof[term]
    nu2 = decomp.residual_dof
    return (ssq(effect) / nu1) / (res_ssq / nu2)


@dataclass(frozen=True)
class AnovaRow:
    term: str
    sum_sq: float
    perc_sum_sq: float
    df: int
    mean_sq: float
    f: float = None
    p_value: float = None


@dataclass(frozen=True)
class AnovaTable:
    """Rows: Mean, one per model term, Residuals, Total.

    F and p are absent on the Mean, Residuals and Total rows; p is absent
    for terms that were not permutation-tested.
    """

    rows: tuple
    n_permutations: int

    COLUMNS = ("term", "SumSq", "PercSumSq", "df", "MeanSq", "F", "Pvalue")

    def row(self, term):
        for r in self.rows:
            if r.term == term:
                return r
        raise UnknownTerm(f"no row '{term}' in this table")

    def to_csv(self):
        lines = [",".join(self.COLUMNS)]
        for r in self.rows:
            cells = [
                r.term,
                f"{r.sum_sq:.17g}",
                f"{r.perc_sum_sq:.17g}",
                str(r.df),
                f"{r.mean_sq:.17g}",
                "" if r.f is None else f"{r.f:.17g}",
                "" if r.p_value is None else f"{r.p_value:.17g}",
            ]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_text(self):
        cells = [list(self.COLUMNS)]
        for r in self.rows:
            cells.append([
                r.term,
                f"{r.sum_sq:.4g}",
                f"{r.perc_sum_sq:.3g}",
                str(r.df),
                f"{r.mean_sq:.4g}",
                "--" if r.f is None else f"{r.f:.4g}",
                "--" if r.p_value is None else f"{r.p_value:.4g}",
            ])
        widths = [max(len(row[j]) for row in cells) for j in range(len(self.COLUMNS))]
        lines = []
        for i, row in enumerate(cells):
            lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
            if i == 0:
                lines.append("-" * (sum(widths) + 2 * (len(widths) - 1)))
        return "\n".join(lines) + "\n"


def zeros_to_missing(x):
    """Split a real peak table into (values, mask); mask is True at zeros."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D peak table, got shape {x.shape}")
    return x, x == 0.0


def _check_mask(x, mask):
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != x.shape:
        raise DimensionMismatch(
            f"mask shape {mask.shape} does not match data shape {x.shape}"
        )
    return mask


def _grand_means(x, mask):
    """Per-variable mean over observed entries; 0 where nothing is observed."""
    counts = (~mask).sum(axis=0)
    sums = np.where(mask, 0.0, x).sum(axis=0)
    return np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)


def _impute(x, mask, cell_rows, grand_means):
    """Replace masked entries with their current design-cell means."""
    out = x.copy()
    observed = np.where(mask, 0.0, x)
    for rows in cell_rows:
        cell_mask = mask[rows]
        if not cell_mask.any():
            continue
        counts = (~cell_mask).sum(axis=0)
        sums = observed[rows].sum(axis=0)
        means = np.divide(sums, counts, out=grand_means.astype(x.dtype, copy=True),
                          where=counts > 0)
        block = out[rows]
        block[cell_mask] = np.broadcast_to(means, block.shape)[cell_mask]
        out[rows] = block
    return out


def impute_cell_means(x, mask, dmatrix, warn_empty=True):
    """One-shot cell-mean imputation against the unpermuted design.

    A cell with no observed value for some variable falls back to that
    variable's grand mean over all observed entries (and to zero if the
    variable is never observed); a warning is emitted unless suppressed.
    """
    x = as_complex_matrix(x)
    mask = _check_mask(x, mask)
    if x.shape[0] != dmatrix.n_samples:
        raise DimensionMismatch("data rows do not match the design")
    cell_rows = [np.flatnonzero(dmatrix.cell_ids == c)
                 for c in range(int(dmatrix.cell_ids.max()) + 1)]
    if warn_empty:
        for c, rows in enumerate(cell_rows):
            empty = (~mask[rows]).sum(axis=0) == 0
            if mask[rows].any() and empty.any():
                cols = np.flatnonzero(empty)
                warnings.warn(
                    f"cell {c} has no observed value for variable(s) "
                    f"{cols.tolist()[:5]}; using the grand mean",
                    EmptyCellWarning,
                    stacklevel=2,
                )
    return _impute(x, mask, cell_rows, _grand_means(x, mask))


def _gram_ssq(theta, gram):
    """ssq of ``D_block @ theta`` computed as Tr(theta^H G theta)."""
    val = np.einsum("rm,rs,sm->", theta.conj(), gram, theta)
    return float(val.real)


def _worker_count():
    raw = os.environ.get("FFTASCA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _count_at_or_above(f_perm, f_nominal):
    tie = F_TIE_REL * np.maximum(np.abs(f_perm), abs(f_nominal))
    return int(np.count_nonzero(f_perm - f_nominal >= -tie))


def _permutation_engine(x, dmatrix, terms, n_permutations, seed, mask):
    x = as_complex_matrix(x)
    n = x.shape[0]
    d = dmatrix.matrix
    if n != d.shape[0]:
        raise DimensionMismatch(
            f"data has {n} rows but the design encodes {d.shape[0]} samples"
        )
    if n_permutations < 1:
        raise ValueError("need at least one permutation")

    all_terms = dmatrix.terms
    tested = all_terms if terms is None else list(terms)
    for t in tested:
        if t not in all_terms:
            raise UnknownTerm(f"no term '{t}' in the design")

    rank = numerical_rank(d)
    if rank < d.shape[1]:
        warnings.warn(
            "design matrix is column-rank deficient; fitting by pseudoinverse",
            RankWarning,
            stacklevel=3,
        )
    nu2 = n - rank
    proj = pinv(d)
    gram_full = d.T @ d
    grams = {t: d[:, dmatrix.column_spans[t]].T @ d[:, dmatrix.column_spans[t]]
             for t in list(dmatrix.column_spans)}
    spans = dmatrix.column_spans

    if mask is not None:
        mask = _check_mask(x, mask)
        cell_rows = [np.flatnonzero(dmatrix.cell_ids == c)
                     for c in range(int(dmatrix.cell_ids.max()) + 1)]
        grand = _grand_means(x, mask)

    def stats(xv):
        theta = proj @ xv
        total = ssq(xv)
        fitted = _gram_ssq(theta, gram_full)
        resid = max(total - fitted, 0.0)
        per_term = {t: _gram_ssq(theta[spans[t]], grams[t]) for t in all_terms}
        mean_ssq = _gram_ssq(theta[spans[MEAN_TERM]], grams[MEAN_TERM])
        return total, mean_ssq, per_term, resid

    x0 = x if mask is None else impute_cell_means(x, mask, dmatrix, warn_empty=True)
    total0, mean0, term_ssq0, resid0 = stats(x0)
    if resid0 == 0.0:
        raise ZeroResidual("residual sum of squares is zero (saturated model)")
    f_nominal = {
        t: (term_ssq0[t] / dmatrix.dof[t]) / (resid0 / nu2) for t in all_terms
    }

    exhaustive = math.factorial(n) - 1 <= n_permutations
    if exhaustive:
        perms = permute_rows(n, 0, exhaustive=True)
        identity = np.arange(n)
        perms = perms[~np.all(perms == identity, axis=1)]
    else:
        perms = permute_rows(n, n_permutations, seed=seed)
    n_eff = perms.shape[0]

    f_perm = np.empty((n_eff, len(tested)))

    def run_one(i):
        xp = x[perms[i]]
        if mask is not None:
            xp = _impute(xp, mask[perms[i]], cell_rows, grand)
        _, _, per_term, resid = stats(xp)
        for j, t in enumerate(tested):
            f_perm[i, j] = (per_term[t] / dmatrix.dof[t]) / (resid / nu2) \
                if resid > 0.0 else np.inf

    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_one, range(n_eff)))
    else:
        for i in range(n_eff):
            run_one(i)

    p_values = {}
    for j, t in enumerate(tested):
        count = _count_at_or_above(f_perm[:, j], f_nominal[t])
        p_values[t] = (count + 1) / (n_eff + 1)

    rows = [AnovaRow("Mean", mean0, 100.0 * mean0 / total0, 1, mean0)]
    for t in all_terms:
        s = term_ssq0[t]
        nu1 = dmatrix.dof[t]
        rows.append(AnovaRow(t, s, 100.0 * s / total0, nu1, s / nu1,
                             f=f_nominal[t], p_value=p_values.get(t)))
    rows.append(AnovaRow("Residuals", resid0, 100.0 * resid0 / total0,
                         nu2, resid0 / nu2 if nu2 > 0 else 0.0))
    rows.append(AnovaRow("Total", total0, 100.0, n, total0 / n))
    return AnovaTable(rows=tuple(rows), n_permutations=n_eff)


def permutation_test(x, dmatrix, terms=None, n_permutations=1000, seed=0):
    """Row-permutation F-tests for every (or the given) model term.

    The whole model is refitted under each permutation and each tested
    term's F is compared against its nominal value.  Enumeration replaces
    sampling whenever ``n_permutations`` covers all non-identity
    permutations of the rows.
    """
    return _permutation_engine(x, dmatrix, terms, n_permutations, seed, mask=None)


def pcmr_permutation_test(x, mask, dmatrix, terms=None, n_permutations=1000, seed=0):
    """Permutation F-tests with cell-mean replacement of missing entries.

    The mask travels with the permuted rows while the design stays fixed,
    so every iteration re-imputes each missing entry with the mean of the
    observed entries currently occupying its design cell.  With an
    all-false mask the result is identical to :func:`permutation_test`.
    """
    return _permutation_engine(x, dmatrix, terms, n_permutations, seed, mask=mask)

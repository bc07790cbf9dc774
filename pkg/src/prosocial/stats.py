"""Small, dependency-light statistical routines.

Chi-square independence test, Mann-Whitney U with a normal approximation,
logistic regression fitted by iteratively reweighted least squares, and
predictive margins from a fitted model.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np


class DegenerateTableError(ValueError):
    pass


class SeparationError(RuntimeError):
    """The likelihood has no finite maximiser (perfect or quasi separation)."""


@dataclass(frozen=True)
class TestResult:
    statistic: float
    pvalue: float
    df: Optional[float] = None

    # keep pytest from collecting this as a test class
    __test__ = False


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or min(counts.shape) < 2:
            raise ValueError(f"contingency table must be at least 2x2, got shape {counts.shape}")
        if not np.issubdtype(counts.dtype, np.integer):
            if not np.all(np.equal(np.mod(counts, 1), 0)):
                raise ValueError("contingency counts must be integers")
            counts = counts.astype(np.int64)
        if (counts < 0).any():
            raise ValueError("contingency counts must be non-negative")
        object.__setattr__(self, "counts", counts)


# -- incomplete gamma ---------------------------------------------------------

_EPS = 1e-15
_TINY = 1e-300


def _gamma_p_series(a: float, x: float) -> float:
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(10_000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_contfrac(a: float, x: float) -> float:
    # modified Lentz evaluation of the continued fraction for Q(a, x)
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gammaincc(a: float, x: float) -> float:
    """Regularised upper incomplete gamma ``Q(a, x)``.

    Series for ``x < a + 1``, continued fraction above.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _gamma_p_series(a, x))
    return min(1.0, _gamma_q_contfrac(a, x))


def chi2_sf(statistic: float, df: float) -> float:
    if statistic <= 0:
        return 1.0
    return gammaincc(df / 2.0, statistic / 2.0)


def chi_square_independence(table: ContingencyTable) -> TestResult:
    counts = table.counts.astype(float)
    rows = counts.sum(axis=1)
    cols = counts.sum(axis=0)
    if (rows == 0).any() or (cols == 0).any():
        raise DegenerateTableError("contingency table has an all-zero row or column")
    expected = np.outer(rows, cols) / counts.sum()
    stat = float(((counts - expected) ** 2 / expected).sum())
    df = (counts.shape[0] - 1) * (counts.shape[1] - 1)
    return TestResult(statistic=stat, pvalue=chi2_sf(stat, df), df=df)


# -- Mann-Whitney -------------------------------------------------------------

def midranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing the mean of their positions."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(values.size, dtype=float)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def mann_whitney_u(x: Sequence[float], y: Sequence[float]) -> TestResult:
    """U statistic of ``x`` against ``y`` with a two-sided normal p-value.

    ``U`` counts pairs with ``x > y`` (ties count a half). The p-value uses
    the tie-corrected variance and a 0.5 continuity correction.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0 or y.size == 0:
        raise ValueError("both samples must be non-empty")
    n1, n2 = x.size, y.size
    n = n1 + n2
    ranks = midranks(np.concatenate([x, y]))
    u = float(ranks[:n1].sum() - n1 * (n1 + 1) / 2.0)
    mean = n1 * n2 / 2.0
    _, tie_counts = np.unique(np.concatenate([x, y]), return_counts=True)
    tie_term = float((tie_counts**3 - tie_counts).sum())
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1))) if n > 1 else 0.0
    if var <= 0:
        return TestResult(statistic=u, pvalue=1.0)
    z = max(abs(u - mean) - 0.5, 0.0) / math.sqrt(var)
    p = min(1.0, math.erfc(z / math.sqrt(2.0)))
    return TestResult(statistic=u, pvalue=p)


# -- logistic regression ------------------------------------------------------

def _expit(eta: np.ndarray) -> np.ndarray:
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    e = np.exp(eta[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def log_likelihood(beta: np.ndarray, X: np.ndarray, y: np.ndarray) -> float:
    eta = X @ beta
    # y*eta - log(1 + exp(eta)), computed stably
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def score(beta: np.ndarray, X: np.ndarray, y: np.ndarray) -> np.ndarray:
    return X.T @ (y - _expit(X @ beta))


@dataclass(frozen=True, eq=False)
class RegressionFit:
    names: Tuple[str, ...]
    coef: np.ndarray
    stderr: np.ndarray
    loglik: float
    converged: bool
    n: int
    iterations: int = 0
    dropped: Tuple[str, ...] = ()
    loglik_history: Tuple[float, ...] = ()
    covariance: Optional[np.ndarray] = field(default=None, repr=False)

    def __getitem__(self, name: str) -> float:
        return float(self.coef[self.names.index(name)])

    def se(self, name: str) -> float:
        return float(self.stderr[self.names.index(name)])

    def z(self, name: str) -> float:
        return self[name] / self.se(name)

    def table(self) -> List[Dict[str, float]]:
        rows = []
        for name, b, s in zip(self.names, self.coef, self.stderr):
            z = b / s
            rows.append(
                {
                    "term": name,
                    "estimate": float(b),
                    "std_error": float(s),
                    "z": float(z),
                    "p_value": math.erfc(abs(z) / math.sqrt(2.0)),
                }
            )
        return rows


def independent_columns(X: np.ndarray, rtol: float = 1e-10) -> List[int]:
    """Indices of columns kept when scanning left to right and dropping any
    column that lies in the span of those already kept."""
    keep: List[int] = []
    basis = np.zeros((X.shape[0], 0))
    for j in range(X.shape[1]):
        col = X[:, j]
        norm = np.linalg.norm(col)
        if norm == 0:
            continue
        if basis.shape[1]:
            resid = col - basis @ (basis.T @ col)
            resid -= basis @ (basis.T @ resid)
        else:
            resid = col
        rnorm = np.linalg.norm(resid)
        if rnorm <= rtol * norm * max(1.0, math.sqrt(X.shape[1])):
            continue
        keep.append(j)
        basis = np.column_stack([basis, resid / rnorm])
    return keep


def logistic_fit(
    X,
    y,
    names: Optional[Sequence[str]] = None,
    *,
    tol: float = 1e-8,
    max_iter: int = 100,
    separation_bound: float = 36.0,
) -> RegressionFit:
    """Maximum-likelihood logistic regression by IRLS.

    ``X`` is the full design including any intercept column. Columns in the
    span of earlier ones are dropped and listed in ``dropped``. Iteration
    stops once the largest coefficient change is below ``tol``; a Newton
    step that lowers the log-likelihood is halved until it does not.
    Standard errors come from the inverse Fisher information.

    Raises :class:`SeparationError` if ``y`` is constant or the linear
    predictor diverges (fitted probabilities collapse onto 0/1).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, k = X.shape
    if names is None:
        names = [f"x{j}" for j in range(k)]
    names = list(names)
    if len(names) != k:
        raise ValueError(f"{len(names)} names for {k} columns")
    if y.shape != (n,):
        raise ValueError("y must be a vector matching the rows of X")
    if not np.isin(y, (0.0, 1.0)).all():
        raise ValueError("y must be binary (0/1)")
    if y.min() == y.max():
        raise SeparationError(f"outcome is constant (all {int(y[0])}); no finite MLE")

    keep = independent_columns(X)
    dropped = tuple(names[j] for j in range(k) if j not in keep)
    X = X[:, keep]
    names = [names[j] for j in keep]
    if n <= X.shape[1]:
        raise ValueError(f"need more observations ({n}) than columns ({X.shape[1]})")

    beta = np.zeros(X.shape[1])
    ll = log_likelihood(beta, X, y)
    history = [ll]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        p = _expit(X @ beta)
        w = p * (1.0 - p)
        info = X.T @ (w[:, None] * X)
        try:
            step = np.linalg.solve(info, X.T @ (y - p))
        except np.linalg.LinAlgError as exc:
            raise SeparationError("Fisher information became singular") from exc
        new_ll = log_likelihood(beta + step, X, y)
        halvings = 0
        while new_ll < ll and halvings < 30:
            step *= 0.5
            new_ll = log_likelihood(beta + step, X, y)
            halvings += 1
        beta = beta + step
        ll = max(new_ll, ll) if halvings == 30 else new_ll
        history.append(ll)
        eta_max = np.abs(X @ beta).max()
        if eta_max > separation_bound:
            raise SeparationError(
                f"linear predictor diverging (max |eta| = {eta_max:.1f}); "
                "the outcome is (quasi-)separated by the design"
            )
        if np.abs(step).max() < tol:
            converged = True
            break

    p = _expit(X @ beta)
    info = X.T @ ((p * (1.0 - p))[:, None] * X)
    cov = np.linalg.inv(info)
    return RegressionFit(
        names=tuple(names),
        coef=beta,
        stderr=np.sqrt(np.diag(cov)),
        loglik=ll,
        converged=converged,
        n=n,
        iterations=it,
        dropped=dropped,
        loglik_history=tuple(history),
        covariance=cov,
    )


def _term_value(term: str, profile: Mapping[str, float]) -> float:
    if term in profile:
        return float(profile[term])
    if term == "intercept":
        return 1.0
    if ":" in term:
        return math.prod(_term_value(part, profile) for part in term.split(":"))
    return 0.0


def predictive_margin(
    fit: RegressionFit,
    profile: Mapping[str, float],
    axis: str,
    values: Sequence[float],
) -> np.ndarray:
    """Predicted probabilities along ``axis`` with other covariates fixed.

    Terms missing from ``profile`` are zero, except ``intercept`` (1) and
    interaction terms named ``a:b``, which are the product of their parts.
    """
    known = set(fit.names)
    for part_name in fit.names:
        known.update(part_name.split(":"))
    unknown = [k for k in list(profile) + [axis] if k not in known]
    if unknown:
        raise KeyError(f"covariates not in the fit: {unknown}")
    out = []
    for v in values:
        point = dict(profile)
        point[axis] = float(v)
        x = np.array([_term_value(term, point) for term in fit.names])
        out.append(float(x @ fit.coef))
    return _expit(np.array(out))

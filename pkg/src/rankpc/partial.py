"""Partial correlations and the conditioning quantities behind the error bound.

Two independent routes compute the same partial correlation: a recursion that
eliminates one conditioning variable at a time, and direct inversion of the
relevant principal submatrix.  The conditioning functionals (smallest nonzero
partial correlation, smallest submatrix eigenvalue) feed the closed-form
bound on the probability that rank-based structure learning returns a wrong
equivalence class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np
from scipy.linalg import solve_triangular

from .correlation import validate_correlation_matrix

__all__ = [
    "NotPositiveDefiniteError",
    "DegenerateCorrelationError",
    "partial_corr_recursive",
    "partial_corr_inverse",
    "min_nonzero_partial_corr",
    "min_submatrix_eigenvalue",
    "BoundInputs",
    "rank_pc_error_bound",
    "inverse_error_bound_holds",
    "normalized_offdiag_bound_holds",
]

DENOM_TOL = 1e-12
ZERO_TOL = 1e-9


class NotPositiveDefiniteError(ArithmeticError):
    """A principal submatrix admitted no Cholesky factorization."""

    def __init__(self, indices: tuple[int, ...]):
        self.indices = tuple(indices)
        super().__init__(f"submatrix over indices {self.indices} is not positive definite")


class DegenerateCorrelationError(ArithmeticError):
    """A recursion denominator vanished: some intermediate correlation is +-1."""


def _conditioning_tuple(u: int, v: int, s: Iterable[int], p: int) -> tuple[int, ...]:
    cond = tuple(sorted(s))
    if len(set(cond)) != len(cond):
        raise ValueError(f"conditioning set {cond} has duplicates")
    if u == v:
        raise ValueError("u and v must be distinct")
    for x in (u, v) + cond:
        if not 0 <= x < p:
            raise ValueError(f"index {x} out of range for p={p}")
    if u in cond or v in cond:
        raise ValueError("u and v must not belong to the conditioning set")
    return cond


def partial_corr_recursive(sigma, u: int, v: int, s: Iterable[int] = ()) -> float:
    """Partial correlation by eliminating conditioning variables one at a time.

    Each step removes the smallest remaining index w via

        r(u,v|S) = (r(u,v|S') - r(u,w|S') r(v,w|S')) / sqrt((1-r(u,w|S')^2)(1-r(v,w|S')^2))

    with S' = S without w.  Raises :class:`DegenerateCorrelationError` when a
    denominator factor drops to the tolerance.
    """
    mat = validate_correlation_matrix(sigma)
    cond = _conditioning_tuple(u, v, s, mat.shape[0])
    memo: dict[tuple, float] = {}

    def rec(a: int, b: int, ss: tuple[int, ...]) -> float:
        key = (a, b, ss) if a < b else (b, a, ss)
        val = memo.get(key)
        if val is not None:
            return val
        if not ss:
            val = float(mat[a, b])
        else:
            w, rest = ss[0], ss[1:]
            r_ab = rec(a, b, rest)
            r_aw = rec(a, w, rest)
            r_bw = rec(b, w, rest)
            da = 1.0 - r_aw * r_aw
            db = 1.0 - r_bw * r_bw
            if da <= DENOM_TOL or db <= DENOM_TOL:
                raise DegenerateCorrelationError(
                    f"denominator vanished eliminating {w} for ({a}, {b} | {ss})"
                )
            val = (r_ab - r_aw * r_bw) / math.sqrt(da * db)
        memo[key] = val
        return val

    return rec(u, v, cond)


def _inverse_partial(mat: np.ndarray, idx: tuple[int, ...]) -> float:
    """Partial correlation of idx[0], idx[1] given the rest, via Cholesky."""
    sub = mat[np.ix_(idx, idx)]
    try:
        chol = np.linalg.cholesky(sub)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(idx) from None
    rhs = np.zeros((len(idx), 2))
    rhs[0, 0] = 1.0
    rhs[1, 1] = 1.0
    w = solve_triangular(chol, rhs, lower=True, check_finite=False)
    prec_uu = float(w[:, 0] @ w[:, 0])
    prec_vv = float(w[:, 1] @ w[:, 1])
    prec_uv = float(w[:, 0] @ w[:, 1])
    return -prec_uv / math.sqrt(prec_uu * prec_vv)


def partial_corr_inverse(sigma, u: int, v: int, s: Iterable[int] = ()) -> float:
    """Partial correlation from the inverse of the (u, v, S) principal submatrix.

    Raises :class:`NotPositiveDefiniteError` (carrying the index set) when the
    submatrix has no Cholesky factorization; no regularization is applied.
    """
    mat = validate_correlation_matrix(sigma)
    cond = _conditioning_tuple(u, v, s, mat.shape[0])
    a, b = (u, v) if u < v else (v, u)
    return _inverse_partial(mat, (a, b) + cond)


def min_nonzero_partial_corr(sigma, q: int | None = None, zero_tol: float = ZERO_TOL):
    """Smallest nonzero |partial correlation| over conditioning sets.

    With ``q`` given, restricts to |S| <= q - 2, which equals the minimum of
    the unrestricted functional over all q x q principal submatrices.  Values
    at or below ``zero_tol`` in absolute value count as zero.  Returns None
    when every partial correlation vanishes (e.g. the identity matrix).
    Exhaustive enumeration: intended for small p.
    """
    mat = validate_correlation_matrix(sigma)
    p = mat.shape[0]
    if p < 2:
        raise ValueError(f"need at least 2 variables, got p={p}")
    if q is None:
        q = p
    if not 2 <= q <= p:
        raise ValueError(f"q must be in 2..{p}, got {q}")
    best = None
    for u in range(p):
        for v in range(u + 1, p):
            others = [w for w in range(p) if w != u and w != v]
            for size in range(0, q - 1):
                for cond in combinations(others, size):
                    val = abs(_inverse_partial(mat, (u, v) + cond))
                    if val > zero_tol and (best is None or val < best):
                        best = val
    return best


def min_submatrix_eigenvalue(sigma, q: int) -> float:
    """Smallest eigenvalue over all q x q principal submatrices."""
    mat = validate_correlation_matrix(sigma)
    p = mat.shape[0]
    if not 1 <= q <= p:
        raise ValueError(f"q must be in 1..{p}, got {q}")
    best = math.inf
    for idx in combinations(range(p), q):
        vals = np.linalg.eigvalsh(mat[np.ix_(idx, idx)])
        best = min(best, float(vals[0]))
    return best


@dataclass(frozen=True)
class BoundInputs:
    """Inputs to the structure-learning error bound.

    a, b: tail-bound constants of the correlation estimator (A * exp(-B n eps^2));
    p, n: variable count and sample size; q: one more than the reach of the
    conditioning sets (max degree plus 2); c: smallest relevant nonzero
    partial correlation; lam: smallest relevant submatrix eigenvalue.
    """

    a: float
    b: float
    p: int
    n: int
    q: int
    c: float
    lam: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError(f"constants must be positive, got a={self.a}, b={self.b}")
        if self.p < 1:
            raise ValueError(f"p must be positive, got {self.p}")
        if self.q < 2:
            raise ValueError(f"q must be at least 2, got {self.q}")
        if self.n <= self.q:
            raise ValueError(f"need n > q, got n={self.n}, q={self.q}")
        if not 0.0 <= self.c <= 1.0:
            raise ValueError(f"c must lie in [0, 1], got {self.c}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lam must lie in [0, 1], got {self.lam}")


def rank_pc_error_bound(inputs: BoundInputs) -> float:
    """Upper bound on the probability of learning a wrong equivalence class.

    Evaluates (a/2) p^2 exp(-b lam^4 n c^2 / (36 q^2)).  Decreasing in n, c,
    lam; increasing in p and q; equals (a/2) p^2 when c or lam is 0.
    """
    expo = (
        -inputs.b
        * inputs.lam**4
        * inputs.n
        * inputs.c**2
        / (36.0 * inputs.q**2)
    )
    return (inputs.a / 2.0) * inputs.p**2 * math.exp(expo)


def _check_square(name: str, m) -> np.ndarray:
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def inverse_error_bound_holds(sigma, err, eps: float) -> bool:
    """Does the inversion perturbation bound hold for this instance?

    Requires max|err| < eps < lam_min(sigma) / q.  Checks

        max|inv(sigma + err) - inv(sigma)| <= (q eps / lam^2) / (1 - q eps / lam)

    where lam is the smallest eigenvalue of sigma and q its dimension.
    """
    mat = _check_square("sigma", sigma)
    e = _check_square("err", err)
    if e.shape != mat.shape:
        raise ValueError(f"shape mismatch: {mat.shape} vs {e.shape}")
    if not np.allclose(mat, mat.T, atol=1e-10, rtol=0.0):
        raise ValueError("sigma must be symmetric")
    q = mat.shape[0]
    lam = float(np.linalg.eigvalsh(mat)[0])
    if lam <= 0.0:
        raise ValueError("sigma must be positive definite")
    err_norm = float(np.abs(e).max())
    if not err_norm < eps < lam / q:
        raise ValueError(
            f"need max|err| < eps < lam/q, got {err_norm} vs {eps} vs {lam / q}"
        )
    lhs = float(np.abs(np.linalg.inv(mat + e) - np.linalg.inv(mat)).max())
    ratio = q * eps / lam
    rhs = (ratio / lam) / (1.0 - ratio)
    return lhs <= rhs


def normalized_offdiag_bound_holds(a, b, delta: float) -> bool:
    """Stability of the normalized off-diagonal of a perturbed 2x2 matrix.

    For symmetric 2x2 matrices with a positive definite, both diagonal
    entries of a at least 1, and max|a - b| < delta < 1, checks

        |a01/sqrt(a00 a11) - b01/sqrt(b00 b11)| < 2 delta / (1 - delta).
    """
    am = _check_square("a", a)
    bm = _check_square("b", b)
    if am.shape != (2, 2) or bm.shape != (2, 2):
        raise ValueError("both matrices must be 2x2")
    if am[0, 1] != am[1, 0] or bm[0, 1] != bm[1, 0]:
        raise ValueError("both matrices must be symmetric")
    if not (am[0, 0] >= 1.0 and am[1, 1] >= 1.0):
        raise ValueError("diagonal entries of a must be at least 1")
    if np.linalg.eigvalsh(am)[0] <= 0.0:
        raise ValueError("a must be positive definite")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if float(np.abs(am - bm).max()) >= delta:
        raise ValueError("need max|a - b| < delta")
    if bm[0, 0] <= 0.0 or bm[1, 1] <= 0.0:
        raise ValueError("diagonal entries of b must be positive")
    lhs = abs(
        am[0, 1] / math.sqrt(am[0, 0] * am[1, 1])
        - bm[0, 1] / math.sqrt(bm[0, 0] * bm[1, 1])
    )
    return lhs < 2.0 * delta / (1.0 - delta)

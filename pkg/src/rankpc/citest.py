"""Conditional-independence deciders for constraint-based structure learning.

A decider answers "is X_u independent of X_v given X_S?".  The data-driven
decider caches one correlation matrix estimate and derives every partial
correlation from it by submatrix inversion; the oracle decider reads
d-separation off a known DAG.  Two exchangeable decision rules are provided:
a fixed cutoff on |partial correlation| and the z-transform test, which are
equivalent for a cutoff computed by :func:`gamma_threshold`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .correlation import METHODS, Dataset, estimate_correlation_matrix, validate_correlation_matrix
from .graph import Dag, d_separated
from .partial import NotPositiveDefiniteError, _inverse_partial

__all__ = [
    "TestConfig",
    "CiDecider",
    "RankCiDecider",
    "OracleDecider",
    "make_rank_ci_decider",
    "make_oracle_decider",
    "threshold_decide",
    "fisher_z_decide",
    "gamma_threshold",
    "inverse_normal_cdf",
]

VARIANTS = ("threshold", "fisher_z", "oracle")


@dataclass(frozen=True)
class TestConfig:
    """Which decision rule to run and its parameters.

    variant 'threshold' uses ``gamma``; variant 'fisher_z' uses ``alpha``;
    variant 'oracle' needs neither.  ``method`` picks the correlation
    estimator feeding the data-driven decider.
    """

    __test__ = False  # not a test case despite the name

    variant: str
    method: str = "spearman"
    gamma: float | None = None
    alpha: float | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.variant == "threshold":
            if self.gamma is None or not 0.0 <= self.gamma <= 1.0:
                raise ValueError(f"threshold variant needs gamma in [0, 1], got {self.gamma}")
            if self.alpha is not None:
                raise ValueError("alpha is meaningless for the threshold variant")
        elif self.variant == "fisher_z":
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ValueError(f"fisher_z variant needs alpha in (0, 1), got {self.alpha}")
            if self.gamma is not None:
                raise ValueError("gamma is meaningless for the fisher_z variant")
        else:
            if self.gamma is not None or self.alpha is not None:
                raise ValueError("oracle variant takes no gamma or alpha")


def threshold_decide(rho_hat: float, gamma: float) -> bool:
    """Independent exactly when |rho_hat| <= gamma (boundary counts as independent)."""
    if not math.isfinite(rho_hat):
        raise ValueError(f"correlation estimate must be finite, got {rho_hat}")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    return abs(rho_hat) <= gamma


# Rational approximation regions and coefficients (Acklam's method).
_P_LOW = 0.02425
_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)


def inverse_normal_cdf(prob: float) -> float:
    """Quantile of the standard normal distribution.

    Rational approximation refined by one Halley step against the erfc-based
    distribution function; absolute error is far below 1e-9.
    """
    if not 0.0 < prob < 1.0:
        raise ValueError(f"probability must lie strictly in (0, 1), got {prob}")
    if prob < _P_LOW:
        q = math.sqrt(-2.0 * math.log(prob))
        x = (
            ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        ) / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    elif prob <= 1.0 - _P_LOW:
        q = prob - 0.5
        r = q * q
        x = (
            (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5])
            * q
            / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)
        )
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - prob))
        x = -(
            ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        ) / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    # one Halley refinement
    err = 0.5 * math.erfc(-x / math.sqrt(2.0)) - prob
    u = err * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)


def fisher_z_decide(rho_hat: float, n: int, s_size: int, alpha: float) -> bool:
    """z-transform test: independent when the standardized statistic is small.

    Compares sqrt(n - |S| - 3) * |0.5 log((1+r)/(1-r))| against the upper
    alpha/2 normal quantile.  Requires n - s_size - 3 >= 1 and |rho_hat| < 1.
    """
    if not math.isfinite(rho_hat) or abs(rho_hat) >= 1.0:
        raise ValueError(f"need |rho_hat| < 1, got {rho_hat}")
    if s_size < 0:
        raise ValueError(f"conditioning size must be nonnegative, got {s_size}")
    m = n - s_size - 3
    if m < 1:
        raise ValueError(f"need n - s_size - 3 >= 1, got n={n}, s_size={s_size}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    stat = math.sqrt(m) * abs(0.5 * math.log((1.0 + rho_hat) / (1.0 - rho_hat)))
    return stat <= inverse_normal_cdf(1.0 - alpha / 2.0)


def gamma_threshold(n: int, s_size: int, z: float) -> float:
    """Cutoff making the threshold rule match the z-transform rule.

    gamma = (exp(z/sqrt(m)) - 1) / (exp(z/sqrt(m)) + 1) with m = n - s_size - 3;
    z is twice the normal quantile at 1 - alpha/2.
    """
    if s_size < 0:
        raise ValueError(f"conditioning size must be nonnegative, got {s_size}")
    m = n - s_size - 3
    if m < 1:
        raise ValueError(f"need n - s_size - 3 >= 1, got n={n}, s_size={s_size}")
    if z < 0 or not math.isfinite(z):
        raise ValueError(f"z must be finite and nonnegative, got {z}")
    x = z / math.sqrt(m)
    return -math.expm1(-x) / (1.0 + math.exp(-x))


class CiDecider:
    """Base conditional-independence decider.

    ``decide(u, v, s)`` returns True for independent, False for dependent,
    and must be symmetric in (u, v).  ``max_cond_size`` is the largest usable
    conditioning-set size (None for unbounded); skeleton search will not
    query beyond it.  Noteworthy events are appended to ``warnings``.
    """

    max_cond_size: int | None = None

    def __init__(self):
        self.warnings: list[str] = []

    def decide(self, u: int, v: int, s: tuple[int, ...]) -> bool:
        raise NotImplementedError


class RankCiDecider(CiDecider):
    """Decider backed by one cached correlation-matrix estimate.

    Partial correlations come from submatrix inversion.  A submatrix that is
    not positive definite yields a 'dependent' answer and a warning rather
    than an exception, so a run on badly conditioned estimates degrades to
    keeping edges instead of crashing.
    """

    def __init__(self, sigma, n: int, config: TestConfig):
        super().__init__()
        if config.variant == "oracle":
            raise ValueError("oracle variant has no data-driven decider")
        self.sigma = validate_correlation_matrix(sigma)
        self.n = int(n)
        self.config = config
        if config.variant == "fisher_z":
            self.max_cond_size = self.n - 4
            self._crit = inverse_normal_cdf(1.0 - config.alpha / 2.0)
        else:
            self.max_cond_size = None
            self._crit = None

    def decide(self, u: int, v: int, s: Iterable[int] = ()) -> bool:
        a, b = (u, v) if u < v else (v, u)
        cond = tuple(sorted(s))
        try:
            r = _inverse_partial(self.sigma, (a, b) + cond)
        except NotPositiveDefiniteError as err:
            self.warnings.append(f"dependent by default for ({u}, {v} | {cond}): {err}")
            return False
        if self.config.variant == "threshold":
            return threshold_decide(r, self.config.gamma)
        if abs(r) >= 1.0:
            return False  # the z statistic is infinite
        m = self.n - len(cond) - 3
        stat = math.sqrt(m) * abs(0.5 * math.log((1.0 + r) / (1.0 - r)))
        return stat <= self._crit


class OracleDecider(CiDecider):
    """Decider that reads conditional independence off a known DAG."""

    def __init__(self, dag: Dag):
        super().__init__()
        self.dag = dag

    def decide(self, u: int, v: int, s: Iterable[int] = ()) -> bool:
        return d_separated(self.dag, u, v, s)


def make_rank_ci_decider(data: Dataset, config: TestConfig) -> RankCiDecider:
    """Estimate the correlation matrix once, then decide all queries from it."""
    sigma = estimate_correlation_matrix(data, config.method)
    return RankCiDecider(sigma, data.n, config)


def make_oracle_decider(dag: Dag) -> OracleDecider:
    return OracleDecider(dag)

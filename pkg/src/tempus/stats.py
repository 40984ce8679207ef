"""Self-contained statistical kernel.

Descriptives, Welch and paired t-tests with exact two-sided p-values (via a
continued-fraction regularized incomplete beta), Mann-Whitney U with a
tie-corrected normal approximation and eta-squared effect size, IQR outlier
fences, and the fraction of total variance carried by the first principal
component of the correlation matrix (power iteration).

Conventions, fixed once and documented here:

- sample standard deviation uses the n-1 denominator;
- quartiles interpolate linearly between order statistics at zero-based
  position (n-1)*q;
- Mann-Whitney uses midranks for ties, no continuity correction (toggle
  available), eta-squared = z**2 / (na+nb);
- all p-values are two-sided.

Every function here is pure and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import StatsError

__all__ = [
    "Descriptives",
    "TestReport",
    "describe",
    "welch_t",
    "paired_t",
    "mann_whitney",
    "iqr_fences",
    "t_survival",
    "normal_survival",
    "first_pc_variance",
]


@dataclass(frozen=True)
class Descriptives:
    n: int
    mean: float
    sd: float
    min: float
    max: float
    median: float
    q1: float
    q3: float
    iqr: float
    single_sample: bool = False  # True when n == 1 and sd is reported as 0


@dataclass(frozen=True)
class TestReport:
    statistic: float
    df: float | None
    p_two_sided: float
    effect_size: float | None
    method: str
    degenerate: bool = False
    z: float | None = None

    def as_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "df": self.df,
            "p_two_sided": self.p_two_sided,
            "effect_size": self.effect_size,
            "method": self.method,
            "degenerate": self.degenerate,
            "z": self.z,
        }


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def _sample_var(values: Sequence[float], mean: float | None = None) -> float:
    if len(values) < 2:
        raise StatsError("sample variance needs n >= 2")
    m = _mean(values) if mean is None else mean
    return math.fsum((v - m) ** 2 for v in values) / (len(values) - 1)


def _interp_quantile(sorted_values: Sequence[float], q: float) -> float:
    """Linear interpolation between order statistics at position (n-1)*q."""
    pos = (len(sorted_values) - 1) * q
    lo = math.floor(pos)
    hi = math.ceil(pos)
    if lo == hi:
        return float(sorted_values[lo])
    frac = pos - lo
    return float(sorted_values[lo] * (1.0 - frac) + sorted_values[hi] * frac)


def describe(values: Sequence[float]) -> Descriptives:
    if len(values) == 0:
        raise StatsError("describe: empty input")
    vals = sorted(float(v) for v in values)
    n = len(vals)
    mean = _mean(vals)
    single = n == 1
    sd = 0.0 if single else math.sqrt(_sample_var(vals, mean))
    q1 = _interp_quantile(vals, 0.25)
    q3 = _interp_quantile(vals, 0.75)
    return Descriptives(
        n=n,
        mean=mean,
        sd=sd,
        min=vals[0],
        max=vals[-1],
        median=_interp_quantile(vals, 0.5),
        q1=q1,
        q3=q3,
        iqr=q3 - q1,
        single_sample=single,
    )


def iqr_fences(values: Sequence[float]) -> tuple[float, float]:
    """Outlier fences at Q1 - 1.5*IQR and Q3 + 1.5*IQR."""
    if len(values) < 4:
        raise StatsError("iqr_fences: need at least 4 values")
    d = describe(values)
    return d.q1 - 1.5 * d.iqr, d.q3 + 1.5 * d.iqr


# --- t distribution --------------------------------------------------------

_BETA_EPS = 1e-15
_BETA_FPMIN = 1e-300
_BETA_MAXIT = 500


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (Lentz's method)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETA_FPMIN:
        d = _BETA_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_FPMIN:
            d = _BETA_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETA_FPMIN:
            c = _BETA_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_FPMIN:
            d = _BETA_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETA_FPMIN:
            c = _BETA_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    raise StatsError("incomplete beta continued fraction did not converge")


def _betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_bt = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def t_survival(t: float, df: float) -> float:
    """Two-sided p-value for a t statistic: I_{df/(df+t^2)}(df/2, 1/2)."""
    if not math.isfinite(t):
        raise StatsError("t_survival: non-finite t statistic")
    if df <= 0:
        raise StatsError("t_survival: df must be positive")
    x = df / (df + t * t)
    p = _betainc_reg(df / 2.0, 0.5, x)
    return min(1.0, max(0.0, p))


def normal_survival(z: float) -> float:
    """Two-sided p-value under the standard normal."""
    return min(1.0, max(0.0, math.erfc(abs(z) / math.sqrt(2.0))))


# --- tests -----------------------------------------------------------------


def welch_t(a: Sequence[float], b: Sequence[float]) -> TestReport:
    """Welch's unequal-variance t-test, two-sided."""
    if len(a) < 2 or len(b) < 2:
        raise StatsError("welch_t: both samples need n >= 2")
    na, nb = len(a), len(b)
    ma, mb = _mean(a), _mean(b)
    va, vb = _sample_var(a, ma), _sample_var(b, mb)
    se2 = va / na + vb / nb
    if se2 == 0.0:
        # Zero variance in both samples: t is 0 for equal means, otherwise
        # infinite; both reported as degenerate under the pooled-df convention.
        if ma == mb:
            return TestReport(0.0, float(na + nb - 2), 1.0, None, "welch_t", degenerate=True)
        stat = math.inf if ma > mb else -math.inf
        return TestReport(stat, float(na + nb - 2), 0.0, None, "welch_t", degenerate=True)
    t = (ma - mb) / math.sqrt(se2)
    df = se2 * se2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    return TestReport(t, df, t_survival(t, df), None, "welch_t")


def paired_t(a: Sequence[float], b: Sequence[float]) -> TestReport:
    """Paired t-test on equal-length samples, df = n - 1, two-sided."""
    if len(a) != len(b):
        raise StatsError("paired_t: samples must have equal length")
    if len(a) < 2:
        raise StatsError("paired_t: need n >= 2 pairs")
    diffs = [x - y for x, y in zip(a, b)]
    n = len(diffs)
    md = _mean(diffs)
    vd = _sample_var(diffs, md)
    if vd == 0.0:
        if md == 0.0:
            return TestReport(0.0, float(n - 1), 1.0, None, "paired_t", degenerate=True)
        stat = math.inf if md > 0 else -math.inf
        return TestReport(stat, float(n - 1), 0.0, None, "paired_t", degenerate=True)
    t = md / math.sqrt(vd / n)
    df = float(n - 1)
    return TestReport(t, df, t_survival(t, df), None, "paired_t")


def mann_whitney(
    a: Sequence[float], b: Sequence[float], *, continuity_correction: bool = False
) -> TestReport:
    """Mann-Whitney U via midranks, tie-corrected normal approximation.

    Reports U for the first sample, z, two-sided p from the normal survival
    function, and eta-squared = z**2 / (na + nb).  No continuity correction
    unless requested.
    """
    if len(a) < 1 or len(b) < 1:
        raise StatsError("mann_whitney: both samples must be non-empty")
    na, nb = len(a), len(b)
    n = na + nb
    pooled = [(float(v), 0) for v in a] + [(float(v), 1) for v in b]
    pooled.sort(key=lambda pair: pair[0])

    # midranks plus tie-group sizes in one pass
    ranks = [0.0] * n
    tie_term = 0.0
    i = 0
    while i < n:
        j = i
        while j + 1 < n and pooled[j + 1][0] == pooled[i][0]:
            j += 1
        midrank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[k] = midrank
        size = j - i + 1
        tie_term += size**3 - size
        i = j + 1

    rank_sum_a = math.fsum(r for r, (_, grp) in zip(ranks, pooled) if grp == 0)
    u_a = rank_sum_a - na * (na + 1) / 2.0
    mu = na * nb / 2.0
    var = na * nb / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0.0:
        # every pooled value identical
        return TestReport(u_a, None, 1.0, 0.0, "mann_whitney", degenerate=True, z=0.0)
    diff = u_a - mu
    if continuity_correction and diff != 0.0:
        diff -= math.copysign(0.5, diff)
    z = diff / math.sqrt(var)
    p = normal_survival(z)
    eta_sq = z * z / n
    return TestReport(u_a, None, p, eta_sq, "mann_whitney", z=z)


# --- first principal component ---------------------------------------------


def first_pc_variance(
    matrix: Sequence[Sequence[float]] | np.ndarray,
    *,
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> float:
    """Fraction of total variance on the first principal component.

    Columns are standardized to z-scores, the correlation matrix is formed,
    and its dominant eigenvalue lambda_1 is found by power iteration from a
    deterministic all-ones start vector.  Returns lambda_1 / p.
    """
    x = np.asarray(matrix, dtype=float)
    if x.ndim != 2:
        raise StatsError("first_pc_variance: need a 2-D matrix")
    n, p = x.shape
    if n < 2 or p < 1:
        raise StatsError("first_pc_variance: need n >= 2 rows and p >= 1 columns")
    sd = x.std(axis=0, ddof=1)
    if np.any(sd == 0.0):
        cols = [int(i) for i in np.flatnonzero(sd == 0.0)]
        raise StatsError(f"first_pc_variance: constant column(s) {cols}")
    z = (x - x.mean(axis=0)) / sd
    corr = z.T @ z / (n - 1)

    vec = np.ones(p) / math.sqrt(p)
    restart = 0
    for _ in range(max_iter):
        nxt = corr @ vec
        norm = float(np.linalg.norm(nxt))
        if norm < 1e-12:
            # start vector annihilated; deterministic restart on a basis vector
            if restart >= p:
                raise StatsError("first_pc_variance: power iteration broke down")
            vec = np.zeros(p)
            vec[restart] = 1.0
            restart += 1
            continue
        vec = nxt / norm
        lam = float(vec @ (corr @ vec))
        residual = float(np.linalg.norm(corr @ vec - lam * vec))
        if residual <= tol * max(1.0, abs(lam)):
            return lam / p
    raise StatsError("first_pc_variance: power iteration did not converge")

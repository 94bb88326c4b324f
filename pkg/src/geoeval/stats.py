"""Significance tests and fold construction for system comparison.

McNemar's test (chi-squared, 1 dof) compares two geotaggers on matched
per-toponym outcomes; the two-tailed Wilcoxon signed-rank test compares
paired geocoding error lists; the paired t-test compares per-fold scores
from k-fold cross-validation. Folds are dealt at the article level from
a seeded shuffle, never within articles, so they stay independent.

Tail probabilities use closed forms (erfc for the chi-squared(1) and
normal tails, a regularised incomplete beta for Student's t) rather than
table interpolation, so results are bit-reproducible across platforms.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional, Sequence

# Below this many disagreements the chi-squared approximation is poor.
MCNEMAR_RELIABLE_MIN = 25

# Below this many nonzero differences the normal approximation is weak.
WILCOXON_SMALL_N = 10

REPORTING_ALPHAS = (0.05, 0.01)


@dataclass(frozen=True)
class StatTestResult:
    """A row of the significance-test block appended to report CSVs."""

    name: str
    statistic: float
    p_value: float
    n: int


def chi2_sf_1dof(statistic: float) -> float:
    """Upper tail of chi-squared with one degree of freedom."""
    if statistic < 0:
        raise ValueError("chi-squared statistic must be non-negative")
    return math.erfc(math.sqrt(statistic / 2.0))


def normal_sf_two_tailed(z: float) -> float:
    """Two-tailed standard-normal tail probability."""
    return math.erfc(abs(z) / math.sqrt(2.0))


@dataclass(frozen=True)
class McNemarTable:
    """Discordant counts: b = A correct / B wrong, c = A wrong / B correct."""

    b: int
    c: int

    def __post_init__(self):
        if self.b < 0 or self.c < 0:
            raise ValueError("discordant counts must be non-negative")


@dataclass(frozen=True)
class McNemarResult:
    statistic: float
    p_value: float
    corrected: bool
    unreliable: bool  # b + c below MCNEMAR_RELIABLE_MIN
    note: Optional[str] = None


def mcnemar(table: McNemarTable, corrected: bool = True) -> McNemarResult:
    """McNemar's test on a discordant-pair table.

    Applies the continuity correction by default; pass corrected=False
    for the plain (|b - c|)^2 / (b + c) statistic.
    """
    n = table.b + table.c
    if n == 0:
        return McNemarResult(0.0, 1.0, corrected, unreliable=True, note="no disagreements")
    diff = abs(table.b - table.c)
    if corrected:
        diff = max(0.0, diff - 1.0)
    statistic = diff * diff / n
    return McNemarResult(
        statistic=statistic,
        p_value=chi2_sf_1dof(statistic),
        corrected=corrected,
        unreliable=n < MCNEMAR_RELIABLE_MIN,
    )


@dataclass(frozen=True)
class WilcoxonResult:
    z: float
    p_value: float
    n: int  # pairs remaining after zero-difference drop
    w_plus: float
    note: Optional[str] = None


def _midranks(values: Sequence[float]) -> tuple[list[float], float]:
    """Ranks of sorted values with ties mid-ranked; returns the tie term.

    The tie term is sum(t^3 - t) over tie groups, used for the optional
    variance correction.
    """
    n = len(values)
    ranks = [0.0] * n
    tie_term = 0.0
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[j + 1] == values[i]:
            j += 1
        rank = (i + j + 2) / 2.0  # average of 1-based ranks i+1 .. j+1
        for k in range(i, j + 1):
            ranks[k] = rank
        t = j - i + 1
        tie_term += t * t * t - t
        i = j + 1
    return ranks, tie_term


def wilcoxon_signed_rank(
    errors_a: Sequence[float],
    errors_b: Sequence[float],
    tie_corrected_variance: bool = False,
) -> WilcoxonResult:
    """Two-tailed Wilcoxon signed-rank test over paired error lists.

    Zero differences are dropped and tied absolute differences are
    mid-ranked. The z statistic uses the plain variance
    n(n+1)(2n+1)/24 by default; tie_corrected_variance subtracts the
    tie term (matching common library implementations). z is positive
    when errors_a tend to exceed errors_b, and flips sign exactly when
    the arguments swap.
    """
    if len(errors_a) != len(errors_b):
        raise ValueError("paired samples must have equal length")
    diffs = [a - b for a, b in zip(errors_a, errors_b) if a != b]
    n = len(diffs)
    if n == 0:
        return WilcoxonResult(0.0, 1.0, 0, 0.0, note="all differences zero")

    order = sorted(range(n), key=lambda i: abs(diffs[i]))
    sorted_abs = [abs(diffs[i]) for i in order]
    ranks, tie_term = _midranks(sorted_abs)
    w_plus = math.fsum(rank for idx, rank in zip(order, ranks) if diffs[idx] > 0)

    mean = n * (n + 1) / 4.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0
    if tie_corrected_variance:
        variance -= tie_term / 48.0
    z = (w_plus - mean) / math.sqrt(variance)
    note = None
    if n < WILCOXON_SMALL_N:
        note = f"only {n} nonzero differences; normal approximation is weak"
    return WilcoxonResult(z=z, p_value=normal_sf_two_tailed(z), n=n, w_plus=w_plus, note=note)


@dataclass(frozen=True)
class PairedTResult:
    t: float
    p_value: float
    dof: int
    degenerate: bool = False  # zero variance of the differences
    note: Optional[str] = None


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the regularised incomplete beta (Lentz)."""
    max_iterations = 300
    eps = 3e-16
    fpmin = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iterations + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularised incomplete beta function I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_two_tailed(t: float, dof: int) -> float:
    """Two-tailed Student's t tail probability.

    p = I_x(dof/2, 1/2) with x = dof / (dof + t^2). Both x and its
    complement are formed directly from t^2 so neither tail suffers
    cancellation.
    """
    if dof < 1:
        raise ValueError("dof must be >= 1")
    tt = t * t
    x = dof / (dof + tt)
    if x <= 0.5:
        return betainc_reg(dof / 2.0, 0.5, x)
    y = tt / (dof + tt)  # 1 - x, computed without cancellation
    return 1.0 - betainc_reg(0.5, dof / 2.0, y)


def paired_t_test(scores_a: Sequence[float], scores_b: Sequence[float]) -> PairedTResult:
    """Two-tailed paired t-test over per-fold scores (k - 1 dof).

    Constant nonzero differences have zero sample variance; that case is
    reported as p -> 0 with the degenerate flag instead of dividing by
    zero.
    """
    if len(scores_a) != len(scores_b):
        raise ValueError("paired samples must have equal length")
    k = len(scores_a)
    if k < 2:
        raise ValueError("need at least 2 folds")
    diffs = [a - b for a, b in zip(scores_a, scores_b)]
    mean = math.fsum(diffs) / k
    var = math.fsum((d - mean) ** 2 for d in diffs) / (k - 1)
    sd = math.sqrt(var)
    dof = k - 1
    if sd < 1e-12 * max(1.0, abs(mean)):
        if mean == 0.0:
            return PairedTResult(0.0, 1.0, dof, degenerate=True, note="all differences zero")
        t = math.copysign(math.inf, mean)
        return PairedTResult(t, 0.0, dof, degenerate=True, note="zero variance of differences")
    t = mean / (sd / math.sqrt(k))
    return PairedTResult(t=t, p_value=student_t_two_tailed(t, dof), dof=dof)


@dataclass
class FoldPlan:
    k: int
    seed: int
    folds: list[list[str]]


def make_folds(doc_ids: Sequence[str], k: int, seed: int) -> FoldPlan:
    """Deal document ids into k near-equal folds from a seeded shuffle.

    Shuffling happens at the document level only, so folds come from
    disjoint articles. Deterministic for a given (doc_ids, k, seed).
    """
    ids = list(doc_ids)
    if k < 2:
        raise ValueError("k must be >= 2")
    if k > len(ids):
        raise ValueError(f"cannot split {len(ids)} documents into {k} folds")
    if len(set(ids)) != len(ids):
        raise ValueError("document ids must be unique")
    rng = random.Random(seed)
    rng.shuffle(ids)
    base, extra = divmod(len(ids), k)
    folds: list[list[str]] = []
    cursor = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(ids[cursor : cursor + size])
        cursor += size
    return FoldPlan(k=k, seed=seed, folds=folds)
